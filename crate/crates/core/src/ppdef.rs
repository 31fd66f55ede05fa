//! Primitive positive definability of relations in a finite structure.
//!
//! A relation `r` with `m` tuples is pp-definable in `s` iff every `m`-ary
//! polymorphism of `s` maps the tuples of `r` back into `r`. The exact test
//! poses the `m`-ary polymorphisms as a constraint network, fixes the
//! entries at the columns of `r` and asks which images are reachable. Before
//! that, two cheaper routes are tried: direct shortcuts, and an intersection
//! of small existential gadgets that already hold on every tuple of `r`.
//! Every formula produced is model-checked before it is returned.

use std::collections::{BTreeMap, BTreeSet};

use crate::budget::{checked_pow, Budget};
use crate::clone::{
    is_polymorphism, polymorphism_csp, polymorphisms, preserves_relation, OperationTable, Preservation, Violation,
};
use crate::error::{Error, Result};
use crate::structure::{defined_relation, FiniteStructure, Formula, Relation};
use crate::tuple::{rank, Tuples};
use crate::{Element, Tuple};

/// A candidate relation over the host domain.
pub type RelationSpec = Relation;

/// A polymorphism of the host that moves the tuples of `r` outside `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinabilityWitness {
    pub operation: OperationTable,
    pub violation: Violation,
}

impl DefinabilityWitness {
    /// The operation is a polymorphism of `s` and really violates `r`.
    pub fn recheck(&self, s: &FiniteStructure, r: &Relation) -> bool {
        is_polymorphism(&self.operation, s) && self.violation.recheck(&self.operation, r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definability {
    Definable,
    NotDefinable(DefinabilityWitness),
}

impl Definability {
    pub fn is_definable(&self) -> bool {
        matches!(self, Definability::Definable)
    }
}

/// Free variable names used by constructed definitions: `x1..xk`.
pub fn free_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

pub fn is_pp_definable(s: &FiniteStructure, r: &Relation, budget: &Budget) -> Result<Definability> {
    Ok(match decide(s, r, budget, false)? {
        Outcome::Defined(_) => Definability::Definable,
        Outcome::Witness(w) => Definability::NotDefinable(w),
    })
}

/// A pp-formula over `x1..xk` whose defined relation in `s` is exactly `r`.
pub fn construct_pp_definition(s: &FiniteStructure, r: &Relation, budget: &Budget) -> Result<Formula> {
    match decide(s, r, budget, true)? {
        Outcome::Defined(Some(f)) => Ok(f),
        Outcome::Defined(None) => unreachable!("formula requested"),
        Outcome::Witness(w) => Err(Error::NotDefinable(format!(
            "polymorphism {} maps {:?} to {:?}",
            w.operation, w.violation.chosen, w.violation.image
        ))),
    }
}

enum Outcome {
    Defined(Option<Formula>),
    Witness(DefinabilityWitness),
}

fn decide(s: &FiniteStructure, r: &Relation, budget: &Budget, want_formula: bool) -> Result<Outcome> {
    if r.arity() == 0 {
        return Err(Error::Shape("relation arity must be positive".into()));
    }
    r.check_domain(s.domain_size())?;
    let names = free_names(r.arity());

    if let Some(f) = shortcut(s, r, &names) {
        return Ok(Outcome::Defined(Some(checked(s, r, f, &names)?)));
    }
    if let Some(f) = gadget_definition(s, r, &names)? {
        return Ok(Outcome::Defined(Some(checked(s, r, f, &names)?)));
    }

    let m = r.len();
    let n = s.domain_size();
    let table = checked_pow(n, m).filter(|&t| t <= budget.max_table_size);
    if table.is_some() {
        if let Some(w) = exact_witness(s, r)? {
            return Ok(Outcome::Witness(w));
        }
        if !want_formula {
            return Ok(Outcome::Defined(None));
        }
        let f = canonical_formula(s, r, &names, budget)?;
        return Ok(Outcome::Defined(Some(checked(s, r, f, &names)?)));
    }

    // too large for the exact test: a low-arity polymorphism may still refute
    for k in 1..=2.min(m) {
        if budget.check_candidates(n, k).is_err() {
            break;
        }
        for f in polymorphisms(s, k, budget)? {
            if let Preservation::Violated(violation) = preserves_relation(&f, r) {
                return Ok(Outcome::Witness(DefinabilityWitness {
                    operation: f,
                    violation,
                }));
            }
        }
    }
    Err(Error::budget(
        format!("{m}-ary polymorphism table for pp-definability"),
        format!("{n}^{m}"),
        budget.max_table_size,
    ))
}

fn checked(s: &FiniteStructure, r: &Relation, f: Formula, names: &[String]) -> Result<Formula> {
    let defined = defined_relation(s, &f, names)?;
    if &defined != r {
        return Err(Error::NotDefinable(format!(
            "constructed formula defines {} tuples, expected {}",
            defined.len(),
            r.len()
        )));
    }
    Ok(f)
}

fn shortcut(s: &FiniteStructure, r: &Relation, names: &[String]) -> Option<Formula> {
    if r == &Relation::equality(s.domain_size()) {
        return Some(Formula::eq(&names[0], &names[1]));
    }
    if let Some((symbol, _)) = s.relations().iter().find(|(_, rel)| *rel == r) {
        return Some(Formula::rel(symbol, names.iter().cloned()));
    }
    if r == &Relation::full(s.domain_size(), r.arity()) {
        return Some(Formula::And(names.iter().map(|x| Formula::eq(x, x)).collect()));
    }
    None
}

/// Largest `n^k` the gadget route will scan.
const GADGET_SCAN_LIMIT: usize = 1 << 17;
/// Largest number of existential gadgets tried.
const GADGET_LIMIT: usize = 1 << 14;

/// An atom over the free variables `0..k` and the extra variable `k`.
#[derive(Debug, Clone)]
enum Atom {
    Rel(String, Vec<usize>),
    Eq(usize, usize),
}

impl Atom {
    fn to_formula(&self, names: &[String], extra: &str) -> Formula {
        let name = |v: usize| names.get(v).map_or(extra.to_string(), Clone::clone);
        match self {
            Atom::Rel(sym, vars) => Formula::rel(sym, vars.iter().map(|&v| name(v))),
            Atom::Eq(a, b) => Formula::eq(name(*a), name(*b)),
        }
    }
}

/// Tries a conjunction of atoms over the free variables plus gadgets
/// `∃p (A ∧ B)` with one fresh variable, keeping only parts that hold on
/// every tuple of `r`. Sound; returns `None` when the intersection is still
/// strictly larger than `r`.
fn gadget_definition(s: &FiniteStructure, r: &Relation, names: &[String]) -> Result<Option<Formula>> {
    let n = s.domain_size();
    let k = r.arity();
    let Some(scan) = checked_pow(n, k).filter(|&c| c <= GADGET_SCAN_LIMIT) else {
        return Ok(None);
    };

    // free-variable atoms
    let mut free_atoms = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            free_atoms.push(Atom::Eq(i, j));
        }
    }
    for (sym, rel) in s.relations() {
        for vars in Tuples::new(k, rel.arity()) {
            free_atoms.push(Atom::Rel(sym.clone(), vars));
        }
    }
    let holds_free = |atom: &Atom, u: &[Element]| match atom {
        Atom::Eq(a, b) => u[*a] == u[*b],
        Atom::Rel(sym, vars) => {
            let t: Tuple = vars.iter().map(|&v| u[v]).collect();
            s.relations()[sym].contains(&t)
        }
    };
    let kept: Vec<Atom> = free_atoms
        .into_iter()
        .filter(|a| r.iter().all(|u| holds_free(a, u)))
        .collect();
    let mut alive: Vec<Tuple> = Tuples::new(n, k)
        .filter(|u| kept.iter().all(|a| holds_free(a, u)))
        .collect();
    debug_assert!(scan >= alive.len());
    let mut parts: Vec<Formula> = kept.iter().map(|a| a.to_formula(names, "")).collect();
    // variables not constrained by any kept atom still have to be free
    let mut mentioned = BTreeSet::new();
    for a in &kept {
        match a {
            Atom::Eq(x, y) => {
                mentioned.insert(*x);
                mentioned.insert(*y);
            }
            Atom::Rel(_, vars) => mentioned.extend(vars.iter().copied()),
        }
    }

    let finish = |mut parts: Vec<Formula>, mentioned: &BTreeSet<usize>| {
        for (i, x) in names.iter().enumerate() {
            if !mentioned.contains(&i) {
                parts.push(Formula::eq(x, x));
            }
        }
        Formula::and(parts)
    };
    if alive.len() == r.len() {
        return Ok(Some(finish(parts, &mentioned)));
    }
    if n > 64 {
        return Ok(None);
    }

    // atoms that mention the extra variable p = k
    let mut p_atoms = Vec::new();
    for (sym, rel) in s.relations() {
        for vars in Tuples::new(k + 1, rel.arity()) {
            if vars.contains(&k) {
                p_atoms.push(Atom::Rel(sym.clone(), vars));
            }
        }
    }
    // allowed p values for atom `a` at free tuple `u`
    let support = |a: &Atom, u: &[Element]| -> u64 {
        let Atom::Rel(sym, vars) = a else { return 0 };
        let rel = &s.relations()[sym];
        let mut mask = 0u64;
        let mut t = vec![0; vars.len()];
        for p in 0..n {
            for (slot, &v) in t.iter_mut().zip(vars) {
                *slot = if v == k { p } else { u[v] };
            }
            if rel.contains(&t) {
                mask |= 1 << p;
            }
        }
        mask
    };
    let mut gadgets: Vec<Vec<usize>> = (0..p_atoms.len()).map(|i| vec![i]).collect();
    for i in 0..p_atoms.len() {
        for j in i + 1..p_atoms.len() {
            gadgets.push(vec![i, j]);
        }
    }
    if gadgets.len() > GADGET_LIMIT {
        return Ok(None);
    }
    let r_tuples: Vec<&Tuple> = r.iter().collect();
    let r_support: Vec<Vec<u64>> = r_tuples
        .iter()
        .map(|u| p_atoms.iter().map(|a| support(a, u)).collect())
        .collect();
    let mut alive_support: Vec<Vec<u64>> = alive
        .iter()
        .map(|u| p_atoms.iter().map(|a| support(a, u)).collect())
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let gadget_holds = |g: &[usize], sup: &[u64]| g.iter().fold(full, |m, &i| m & sup[i]) != 0;

    let mut fresh = 0;
    for g in gadgets {
        if !r_support.iter().all(|sup| gadget_holds(&g, sup)) {
            continue;
        }
        let before = alive.len();
        let keep: Vec<bool> = alive_support.iter().map(|sup| gadget_holds(&g, sup)).collect();
        if keep.iter().all(|&b| b) {
            continue;
        }
        let mut it = keep.iter();
        alive.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        alive_support.retain(|_| *it.next().unwrap());
        debug_assert!(alive.len() < before);
        fresh += 1;
        let p = format!("p{fresh}");
        let body = Formula::and(g.iter().map(|&i| p_atoms[i].to_formula(names, &p)));
        for &i in &g {
            if let Atom::Rel(_, vars) = &p_atoms[i] {
                mentioned.extend(vars.iter().copied().filter(|&v| v < k));
            }
        }
        parts.push(Formula::exists([p], body));
        if alive.len() == r.len() {
            return Ok(Some(finish(parts, &mentioned)));
        }
    }
    Ok(None)
}

/// The exact test: first reachable image of the columns of `r` under an
/// `m`-ary polymorphism that falls outside `r`, in lexicographic order.
fn exact_witness(s: &FiniteStructure, r: &Relation) -> Result<Option<DefinabilityWitness>> {
    let n = s.domain_size();
    let m = r.len();
    let k = r.arity();
    let rows: Vec<Tuple> = r.iter().cloned().collect();
    let columns: Vec<usize> = (0..k)
        .map(|i| {
            let col: Vec<Element> = rows.iter().map(|t| t[i]).collect();
            rank(&col, n)
        })
        .collect();
    for u in Tuples::new(n, k) {
        if r.contains(&u) {
            continue;
        }
        // columns that coincide must receive equal values
        if (0..k).any(|i| (0..i).any(|j| columns[i] == columns[j] && u[i] != u[j])) {
            continue;
        }
        let mut csp = polymorphism_csp(s, m)?;
        for (i, &c) in columns.iter().enumerate() {
            csp.fix(c, u[i]);
        }
        if let Some(values) = csp.solve_first() {
            let operation = OperationTable::new(n, m, values)?;
            return Ok(Some(DefinabilityWitness {
                operation,
                violation: Violation { chosen: rows, image: u },
            }));
        }
    }
    Ok(None)
}

/// The canonical definition: one existential variable per element of
/// `D^m`, one atom per coordinatewise-valid tuple of those variables, and
/// the free variables tied to the columns of `r`.
fn canonical_formula(s: &FiniteStructure, r: &Relation, names: &[String], budget: &Budget) -> Result<Formula> {
    let n = s.domain_size();
    let m = r.len();
    let rows: Vec<Tuple> = r.iter().cloned().collect();
    let size =
        checked_pow(n, m).ok_or_else(|| Error::budget("canonical formula", "overflow", budget.max_table_size))?;
    let mut atoms_total: u64 = 0;
    for rel in s.relations().values() {
        atoms_total = atoms_total.saturating_add((rel.len() as u64).saturating_pow(m as u32));
    }
    budget.check_search("canonical formula atoms", Some(atoms_total))?;

    let var = |idx: usize| format!("v{idx}");
    let mut parts = Vec::new();
    for (i, x) in names.iter().enumerate() {
        let col: Vec<Element> = rows.iter().map(|t| t[i]).collect();
        parts.push(Formula::eq(x, var(rank(&col, n))));
    }
    let mut seen = BTreeSet::new();
    for (sym, rel) in s.relations() {
        let tuples: Vec<&Tuple> = rel.iter().collect();
        if tuples.is_empty() {
            if m == 0 {
                parts.push(Formula::rel(sym, vec![var(0); rel.arity()]));
            }
            continue;
        }
        let mut pick = vec![0usize; m];
        loop {
            let vars: Vec<usize> = (0..rel.arity())
                .map(|j| {
                    let col: Vec<Element> = pick.iter().map(|&p| tuples[p][j]).collect();
                    rank(&col, n)
                })
                .collect();
            if seen.insert((sym.clone(), vars.clone())) {
                parts.push(Formula::rel(sym, vars.into_iter().map(var)));
            }
            if !crate::tuple::advance(&mut pick, tuples.len()) {
                break;
            }
        }
    }
    Ok(Formula::exists((0..size).map(var), Formula::And(parts)))
}

/// The relation on `d`-tuples `{ (a, b) : h(a) = h(b) }` as a `2d`-ary
/// relation, for maps given as an explicit table.
pub(crate) fn kernel_relation(map: &BTreeMap<Tuple, Element>, d: usize) -> Relation {
    let mut tuples = Vec::new();
    for (a, ha) in map {
        for (b, hb) in map {
            if ha == hb {
                tuples.push(a.iter().chain(b).copied().collect());
            }
        }
    }
    Relation::new(2 * d, tuples).expect("kernel tuples have length 2d")
}
