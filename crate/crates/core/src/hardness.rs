//! Hardness certificates: a two-element algebra all of whose operations are
//! projections, found as a quotient of a subalgebra of a finite power of the
//! (arity-truncated) polymorphism algebra.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::budget::{checked_pow, Budget};
use crate::clone::{polymorphisms, OperationTable};
use crate::closure::close;
use crate::error::{Error, Result};
use crate::structure::FiniteStructure;
use crate::tuple::{unrank, Tuples};
use crate::{Element, Tuple};

/// The projection `π^arity_index` (1-based) of the clone of projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectionId {
    pub arity: usize,
    pub index: usize,
}

impl ProjectionId {
    pub fn new(arity: usize, index: usize) -> Result<Self> {
        if index == 0 || index > arity {
            return Err(Error::Index { index, arity });
        }
        Ok(ProjectionId { arity, index })
    }

    /// `π^k_i ∘ (g_1, ..., g_k) = g_i`.
    pub fn compose(self, gs: &[ProjectionId]) -> Result<ProjectionId> {
        if gs.len() != self.arity {
            return Err(Error::Shape(format!(
                "π^{}_{} composed with {} operations",
                self.arity,
                self.index,
                gs.len()
            )));
        }
        let l = gs[0].arity;
        if gs.iter().any(|g| g.arity != l) {
            return Err(Error::Shape("inner projections have different arities".into()));
        }
        Ok(gs[self.index - 1])
    }
}

impl fmt::Display for ProjectionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "π^{}_{}", self.arity, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionCloneVerdict {
    Yes,
    No(OperationTable),
}

/// Whether every polymorphism of arity `1..=max_arity` is a projection.
pub fn is_projection_clone(s: &FiniteStructure, max_arity: usize, budget: &Budget) -> Result<ProjectionCloneVerdict> {
    for k in 1..=max_arity {
        if let Some(f) = polymorphisms(s, k, budget)?.into_iter().find(|f| !f.is_projection()) {
            return Ok(ProjectionCloneVerdict::No(f));
        }
    }
    Ok(ProjectionCloneVerdict::Yes)
}

/// `S ≤ C^power` with a two-class partition on which every polymorphism of
/// arity at most `max_arity` acts as a projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionQuotientCertificate {
    pub max_arity: usize,
    pub power: usize,
    pub generators: Vec<Tuple>,
    /// Sorted elements of `S`.
    pub subuniverse: Vec<Tuple>,
    /// `class[i]` is 0 or 1 for `subuniverse[i]`; the first element is in 0.
    pub class: Vec<u8>,
    /// For each polymorphism (by arity, then table order) the projection it
    /// induces on `S/θ`.
    pub induced: Vec<(OperationTable, ProjectionId)>,
}

impl ProjectionQuotientCertificate {
    pub fn blocks(&self) -> [Vec<&Tuple>; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for (t, &c) in self.subuniverse.iter().zip(&self.class) {
            out[c as usize].push(t);
        }
        out
    }

    /// Recomputes the polymorphisms of `s` up to the truncation arity and
    /// re-checks closure, the partition and every induced projection.
    pub fn verify(&self, s: &FiniteStructure, budget: &Budget) -> std::result::Result<Vec<String>, String> {
        let ops = truncated_polymorphisms(s, self.max_arity, budget).map_err(|e| e.to_string())?;
        let mut log = Vec::new();
        let n = s.domain_size();
        let members: HashSet<&Tuple> = self.subuniverse.iter().collect();
        if members.len() != self.subuniverse.len() || self.class.len() != self.subuniverse.len() {
            return Err("malformed subuniverse".into());
        }
        if self
            .subuniverse
            .iter()
            .any(|t| t.len() != self.power || t.iter().any(|&x| x >= n))
        {
            return Err("element outside the power".into());
        }
        if self.class.iter().any(|&c| c > 1) || !self.class.contains(&0) || !self.class.contains(&1) {
            return Err("partition does not have exactly two classes".into());
        }
        let generated = generate(&ops, &self.generators, self.power, usize::MAX).map_err(|e| e.to_string())?;
        if generated.iter().collect::<BTreeSet<_>>() != self.subuniverse.iter().collect::<BTreeSet<_>>() {
            return Err("subuniverse is not the closure of the generators".into());
        }
        log.push(format!(
            "S ≤ C^{}: {} elements generated by {} tuples, closed under {} polymorphisms of arity ≤ {}",
            self.power,
            self.subuniverse.len(),
            self.generators.len(),
            ops.len(),
            self.max_arity
        ));
        let view = View::new(&self.subuniverse, self.power);
        if ops.len() != self.induced.len() {
            return Err("transcript does not list every polymorphism".into());
        }
        for (f, (g, claimed)) in ops.iter().zip(&self.induced) {
            if f != g {
                return Err("transcript lists a different operation".into());
            }
            match view.induced_projection(f, &self.class) {
                Some(i) if i == claimed.index && f.arity() == claimed.arity => {}
                _ => return Err(format!("operation {f} does not induce {claimed}")),
            }
        }
        let [a, b] = self.blocks();
        log.push(format!("θ has blocks of sizes {} and {}", a.len(), b.len()));
        for k in 1..=self.max_arity {
            let count = self.induced.iter().filter(|(f, _)| f.arity() == k).count();
            log.push(format!(
                "arity {k}: {count} polymorphisms, each induces a projection on S/θ"
            ));
        }
        Ok(log)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuotientSearch {
    Certificate(ProjectionQuotientCertificate),
    /// Nothing found within the bounds. `obstruction` holds a constant
    /// polymorphism when one exists, which rules out every bound.
    Exhausted {
        max_arity: usize,
        max_power: usize,
        obstruction: Option<OperationTable>,
    },
}

fn truncated_polymorphisms(s: &FiniteStructure, max_arity: usize, budget: &Budget) -> Result<Vec<OperationTable>> {
    let mut ops = Vec::new();
    for k in 1..=max_arity {
        ops.extend(polymorphisms(s, k, budget)?);
    }
    Ok(ops)
}

fn apply_componentwise(f: &OperationTable, args: &[&Tuple], width: usize) -> Tuple {
    let mut row = vec![0; args.len()];
    (0..width)
        .map(|c| {
            for (slot, t) in row.iter_mut().zip(args) {
                *slot = t[c];
            }
            f.apply(&row)
        })
        .collect()
}

fn generate(ops: &[OperationTable], gens: &[Tuple], width: usize, cap: usize) -> Result<Vec<Tuple>> {
    let arities: Vec<usize> = ops.iter().map(OperationTable::arity).collect();
    let c = close(
        gens.to_vec(),
        &arities,
        |op, args| apply_componentwise(&ops[op], args, width),
        cap,
    )?;
    let mut members = c.members;
    members.sort();
    Ok(members)
}

/// Index lookup into a sorted subuniverse.
struct View<'a> {
    members: &'a [Tuple],
    width: usize,
}

impl<'a> View<'a> {
    fn new(members: &'a [Tuple], width: usize) -> Self {
        View { members, width }
    }

    fn index(&self, t: &Tuple) -> Option<usize> {
        self.members.binary_search(t).ok()
    }

    /// The 1-based `i` with `class(f(t)) = class(t_i)` for all `t ∈ S^k`.
    fn induced_projection(&self, f: &OperationTable, class: &[u8]) -> Option<usize> {
        let k = f.arity();
        let mut alive: Vec<bool> = vec![true; k];
        for pick in Tuples::new(self.members.len(), k) {
            let args: Vec<&Tuple> = pick.iter().map(|&i| &self.members[i]).collect();
            let image = apply_componentwise(f, &args, self.width);
            let c = class[self.index(&image)?];
            for (i, slot) in alive.iter_mut().enumerate() {
                if *slot && class[pick[i]] != c {
                    *slot = false;
                }
            }
            if !alive.contains(&true) {
                return None;
            }
        }
        alive.iter().position(|&a| a).map(|i| i + 1)
    }
}

/// Searches `n = 1..=max_power`; subuniverses of `C^n` are visited by
/// number of generators and then lexicographically, and for each one the
/// two-class partitions in order of their bit masks.
pub fn find_projection_quotient(
    s: &FiniteStructure,
    max_arity: usize,
    max_power: usize,
    budget: &Budget,
) -> Result<QuotientSearch> {
    let exhausted = |obstruction| QuotientSearch::Exhausted {
        max_arity,
        max_power,
        obstruction,
    };
    if max_arity == 0 {
        return Ok(exhausted(None));
    }
    let unary = polymorphisms(s, 1, budget)?;
    if let Some(c) = unary.iter().find(|f| s.domain_size() > 1 && f.as_constant().is_some()) {
        return Ok(exhausted(Some(c.clone())));
    }
    let ops = truncated_polymorphisms(s, max_arity, budget)?;
    let d = s.domain_size();
    for n in 1..=max_power {
        let m = budget.check_elements("power of the polymorphism algebra", checked_pow(d, n))?;
        let elements: Vec<Tuple> = (0..m).map(|i| unrank(i, d, n)).collect();
        let mut seen: HashSet<Vec<Tuple>> = HashSet::new();
        let mut closures = 0u64;
        // level 1: one generator each
        let mut level: Vec<(Vec<Tuple>, Vec<Tuple>)> = Vec::new();
        for e in &elements {
            let sub = generate(&ops, std::slice::from_ref(e), n, budget.max_elements)?;
            closures += 1;
            if seen.insert(sub.clone()) {
                level.push((vec![e.clone()], sub));
            }
        }
        while !level.is_empty() {
            budget.check_search("subuniverse closures", Some(closures))?;
            for (_, sub) in &level {
                let bits = sub.len().saturating_sub(1);
                budget.check_search(
                    "two-class partitions",
                    1u64.checked_shl(bits as u32).filter(|_| bits < 64),
                )?;
            }
            let found = level.par_iter().find_map_first(|(gens, sub)| {
                two_class_projection(&ops, sub, n).map(|(class, induced)| ProjectionQuotientCertificate {
                    max_arity,
                    power: n,
                    generators: gens.clone(),
                    subuniverse: sub.clone(),
                    class,
                    induced,
                })
            });
            if let Some(cert) = found {
                return Ok(QuotientSearch::Certificate(cert));
            }
            let mut next = Vec::new();
            for (gens, sub) in &level {
                for e in elements.iter().filter(|e| sub.binary_search(e).is_err()) {
                    let mut more = gens.clone();
                    more.push(e.clone());
                    let ext = generate(&ops, &more, n, budget.max_elements)?;
                    closures += 1;
                    if seen.insert(ext.clone()) {
                        next.push((more, ext));
                    }
                }
            }
            level = next;
        }
    }
    Ok(exhausted(None))
}

type Induced = Vec<(OperationTable, ProjectionId)>;

fn two_class_projection(ops: &[OperationTable], sub: &[Tuple], width: usize) -> Option<(Vec<u8>, Induced)> {
    if sub.len() < 2 {
        return None;
    }
    let view = View::new(sub, width);
    let rest = sub.len() - 1;
    'mask: for mask in 1u64..(1u64 << rest) {
        let class: Vec<u8> = std::iter::once(0)
            .chain((0..rest).map(|b| ((mask >> b) & 1) as u8))
            .collect();
        let mut induced = Vec::with_capacity(ops.len());
        for f in ops {
            match view.induced_projection(f, &class) {
                Some(i) => induced.push((
                    f.clone(),
                    ProjectionId {
                        arity: f.arity(),
                        index: i,
                    },
                )),
                None => continue 'mask,
            }
        }
        return Some((class, induced));
    }
    None
}

/// Outcome of the combined check, printable as a short report.
#[derive(Debug, Clone)]
pub struct HardnessReport {
    pub max_arity: usize,
    pub max_power: usize,
    pub projection_clone: ProjectionCloneVerdict,
    pub search: QuotientSearch,
}

pub fn hardness_report(
    s: &FiniteStructure,
    max_arity: usize,
    max_power: usize,
    budget: &Budget,
) -> Result<HardnessReport> {
    let projection_clone = is_projection_clone(s, max_arity, budget)?;
    let search = find_projection_quotient(s, max_arity, max_power, budget)?;
    Ok(HardnessReport {
        max_arity,
        max_power,
        projection_clone,
        search,
    })
}

impl HardnessReport {
    pub fn is_hard(&self) -> bool {
        matches!(self.search, QuotientSearch::Certificate(_))
    }

    /// The one-line verdict.
    pub fn verdict(&self) -> String {
        let (k, n) = (self.max_arity, self.max_power);
        match (&self.projection_clone, &self.search) {
            (ProjectionCloneVerdict::Yes, QuotientSearch::Certificate(c)) => {
                format!("hard: projection clone at K={k}; certificate n={}", c.power)
            }
            (_, QuotientSearch::Certificate(c)) => format!("hard: certificate at (K={k}, N={})", c.power),
            (
                _,
                QuotientSearch::Exhausted {
                    obstruction: Some(_), ..
                },
            ) => format!(
                "inconclusive at (K={k}, N={n}); constants present ⇒ no 2-class projection quotient exists at any bound"
            ),
            (_, QuotientSearch::Exhausted { .. }) => format!("inconclusive at (K={k}, N={n})"),
        }
    }
}

impl fmt::Display for HardnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.verdict())?;
        match &self.projection_clone {
            ProjectionCloneVerdict::Yes => {
                writeln!(f, "every polymorphism of arity ≤ {} is a projection", self.max_arity)?
            }
            ProjectionCloneVerdict::No(w) => writeln!(f, "non-projection polymorphism of arity {}: {w}", w.arity())?,
        }
        match &self.search {
            QuotientSearch::Certificate(c) => {
                writeln!(f, "power n = {}", c.power)?;
                writeln!(f, "generators: {}", fmt_tuples(c.generators.iter()))?;
                let [a, b] = c.blocks();
                writeln!(f, "S = {}", fmt_tuples(c.subuniverse.iter()))?;
                writeln!(f, "θ block 0: {}", fmt_tuples(a.into_iter()))?;
                writeln!(f, "θ block 1: {}", fmt_tuples(b.into_iter()))?;
                for (op, p) in &c.induced {
                    writeln!(f, "  {op} ↦ {p}")?;
                }
            }
            QuotientSearch::Exhausted { obstruction, .. } => {
                if let Some(c) = obstruction {
                    writeln!(f, "constant polymorphism: {c}")?;
                }
                writeln!(f, "Exhausted is never a proof of tractability.")?;
            }
        }
        Ok(())
    }
}

fn fmt_tuples<'a>(ts: impl Iterator<Item = &'a Tuple>) -> String {
    let parts: Vec<String> = ts
        .map(|t| format!("({})", t.iter().map(Element::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oit() -> FiniteStructure {
        FiniteStructure::new("oit", 2)
            .unwrap()
            .with_relation("OIT", 3, [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]])
            .unwrap()
    }

    fn neq3() -> FiniteStructure {
        FiniteStructure::new("neq3", 3)
            .unwrap()
            .with_relation("N", 2, Tuples::new(3, 2).filter(|t| t[0] != t[1]))
            .unwrap()
    }

    #[test]
    fn projection_law() {
        let p = ProjectionId::new(3, 2).unwrap();
        let gs = [
            ProjectionId::new(2, 1).unwrap(),
            ProjectionId::new(2, 2).unwrap(),
            ProjectionId::new(2, 1).unwrap(),
        ];
        assert_eq!(p.compose(&gs).unwrap(), gs[1]);
        assert!(ProjectionId::new(2, 3).is_err());
    }

    #[test]
    fn oit_is_a_projection_clone() {
        let b = Budget::default();
        assert_eq!(is_projection_clone(&oit(), 3, &b).unwrap(), ProjectionCloneVerdict::Yes);
        let QuotientSearch::Certificate(c) = find_projection_quotient(&oit(), 3, 1, &b).unwrap() else {
            panic!()
        };
        assert_eq!(c.power, 1);
        assert_eq!(c.subuniverse, vec![vec![0], vec![1]]);
        assert_eq!(c.class, vec![0, 1]);
        assert!(c.verify(&oit(), &b).is_ok());
        let r = hardness_report(&oit(), 3, 1, &b).unwrap();
        assert_eq!(r.verdict(), "hard: projection clone at K=3; certificate n=1");
    }

    #[test]
    fn k3_unary_witness() {
        let ProjectionCloneVerdict::No(w) = is_projection_clone(&neq3(), 1, &Budget::default()).unwrap() else {
            panic!()
        };
        assert_eq!(w.values(), &[0, 2, 1]);
    }

    #[test]
    fn singleton_is_a_projection_clone() {
        let s = FiniteStructure::new("one", 1).unwrap();
        assert_eq!(
            is_projection_clone(&s, 2, &Budget::default()).unwrap(),
            ProjectionCloneVerdict::Yes
        );
    }

    #[test]
    fn constants_obstruct() {
        let s = FiniteStructure::new("free", 2).unwrap();
        let r = find_projection_quotient(&s, 3, 2, &Budget::default()).unwrap();
        let QuotientSearch::Exhausted {
            obstruction: Some(c), ..
        } = r
        else {
            panic!()
        };
        assert_eq!(c.as_constant(), Some(0));
        let rep = hardness_report(&s, 3, 2, &Budget::default()).unwrap();
        assert!(rep
            .verdict()
            .starts_with("inconclusive at (K=3, N=2); constants present"));
        assert!(rep.to_string().contains("never a proof of tractability"));
    }

    #[test]
    fn k3_binary_certificate_at_power_two() {
        // with arity ≤ 2 already the diagonal/off-diagonal split of C^2 works
        let b = Budget::default();
        let QuotientSearch::Certificate(c) = find_projection_quotient(&neq3(), 2, 2, &b).unwrap() else {
            panic!()
        };
        assert_eq!(c.power, 2);
        assert_eq!(c.subuniverse.len(), 9);
        let [x, y] = c.blocks();
        let diag: Vec<&Tuple> = x.iter().chain(&y).copied().filter(|t| t[0] == t[1]).collect();
        assert!(diag.len() == 3 && (x.iter().all(|t| t[0] == t[1]) || y.iter().all(|t| t[0] == t[1])));
        assert!(c.verify(&neq3(), &b).is_ok());
    }

    #[test]
    fn tampering_is_caught() {
        let b = Budget::default();
        let QuotientSearch::Certificate(mut c) = find_projection_quotient(&oit(), 2, 1, &b).unwrap() else {
            panic!()
        };
        c.class = vec![0, 0];
        assert!(c.verify(&oit(), &b).is_err());
    }
}
