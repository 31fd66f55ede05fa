//! Primitive positive interpretations between finite structures.
//!
//! An interpretation of a target in a host of dimension `d` consists of a
//! domain formula over `x1..xd`, one defining formula per target relation
//! over `x1..x(k·d)` (argument `j`, coordinate `c` is `x((j-1)·d + c)`), the
//! formula for `=` over `x1..xd, y1..yd`, and optionally the coordinate map
//! from the defined domain onto the target.

mod bi;
mod translate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use indexmap::IndexMap;
use rayon::prelude::*;

pub use bi::{check_bi_interpretation, composite_relations, BiFailure, BiInterpretation, Side};
pub use translate::translate_sentence;

use crate::budget::{checked_pow, Budget};
use crate::error::{Error, Result};
use crate::ppdef::{construct_pp_definition, free_names, kernel_relation};
use crate::structure::text::{lines, parse_usize};
use crate::structure::{defined_relation, eval_formula, Assignment, FiniteStructure, Formula, Relation};
use crate::tuple::unrank;
use crate::{Element, Tuple};

/// The reserved key of the defining formula for equality.
pub const EQ: &str = "=";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub dim: usize,
    pub domain: Formula,
    /// Keyed by target relation symbol, plus [`EQ`].
    pub defining: IndexMap<String, Formula>,
    pub map: Option<BTreeMap<Tuple, Element>>,
}

/// Variable names for the defining formula of a `k`-ary symbol.
pub fn atom_names(k: usize, d: usize) -> Vec<String> {
    free_names(k * d)
}

/// Variable names `x1..xd, y1..yd` for the equality formula.
pub fn eq_names(d: usize) -> Vec<String> {
    let mut v = free_names(d);
    v.extend((1..=d).map(|i| format!("y{i}")));
    v
}

impl Interpretation {
    /// `s` inside itself: `d = 1`, every symbol defined by its own atom,
    /// `h` the identity.
    pub fn identity(s: &FiniteStructure) -> Self {
        let mut defining = IndexMap::new();
        defining.insert(EQ.to_string(), Formula::eq("x1", "y1"));
        for (sym, r) in s.relations() {
            defining.insert(sym.clone(), Formula::rel(sym, free_names(r.arity())));
        }
        Interpretation {
            dim: 1,
            domain: Formula::truth(),
            defining,
            map: Some((0..s.domain_size()).map(|a| (vec![a], a)).collect()),
        }
    }

    pub fn map(&self) -> Result<&BTreeMap<Tuple, Element>> {
        self.map.as_ref().ok_or(Error::MissingMap)
    }

    /// The formula defining `symbol`, or an error naming the missing symbol.
    pub fn formula(&self, symbol: &str) -> Result<&Formula> {
        self.defining
            .get(symbol)
            .ok_or_else(|| Error::UnknownRelation(symbol.to_string()))
    }

    /// Checks that every formula only uses the variables it is allowed to and
    /// that every target symbol has a defining formula.
    pub fn check_against(&self, target: &FiniteStructure) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInterpretation("dimension must be positive".into()));
        }
        check_vars("domain", &self.domain, &free_names(self.dim), self.dim)?;
        let eq = self
            .defining
            .get(EQ)
            .ok_or_else(|| Error::InvalidInterpretation("missing formula for `=`".into()))?;
        check_vars(EQ, eq, &eq_names(self.dim), 2 * self.dim)?;
        for (sym, r) in target.relations() {
            let f = self
                .defining
                .get(sym)
                .ok_or_else(|| Error::InvalidInterpretation(format!("no defining formula for `{sym}`")))?;
            check_vars(sym, f, &atom_names(r.arity(), self.dim), r.arity() * self.dim)?;
        }
        Ok(())
    }

    /// Reads the interpretation file format. Formulas may continue over
    /// several lines while parentheses are open.
    pub fn parse(text: &str) -> Result<Self> {
        let ls = lines(text);
        let head = ls.first().ok_or_else(|| Error::parse(1, "empty interpretation file"))?;
        let dim = match head.words.as_slice() {
            ["interpretation", spec] => match spec.strip_prefix("d=") {
                Some(v) => parse_usize(head, v, "dimension")?,
                None => return Err(Error::parse(head.number, "expected `interpretation d=<d>`")),
            },
            ["interpretation", "d", "=", v] => parse_usize(head, v, "dimension")?,
            _ => return Err(Error::parse(head.number, "expected `interpretation d=<d>`")),
        };
        if dim == 0 {
            return Err(Error::parse(head.number, "dimension must be positive"));
        }
        let mut domain = None;
        let mut defining = IndexMap::new();
        let mut map = None;
        let mut pos = 1;
        // gathers a formula starting at word `from` of line `pos`
        let formula_at = |pos: &mut usize, from: usize| -> Result<Formula> {
            let start = ls[*pos].number;
            let mut buf = ls[*pos].words[from..].join(" ");
            let depth = |s: &str| s.matches('(').count() as isize - s.matches(')').count() as isize;
            while depth(&buf) > 0 {
                *pos += 1;
                let more = ls
                    .get(*pos)
                    .ok_or_else(|| Error::parse(start, "unbalanced parentheses"))?;
                buf.push(' ');
                buf.push_str(&more.words.join(" "));
            }
            *pos += 1;
            Formula::parse(&buf).map_err(|e| match e {
                Error::Parse { reason, .. } => Error::parse(start, reason),
                other => other,
            })
        };
        while pos < ls.len() {
            let line = &ls[pos];
            match line.words[0] {
                "domain" if line.words.len() > 1 => {
                    if domain.is_some() {
                        return Err(Error::parse(line.number, "duplicate `domain`"));
                    }
                    domain = Some(formula_at(&mut pos, 1)?);
                }
                "atom" if line.words.len() > 2 => {
                    let sym = line.words[1].to_string();
                    let number = line.number;
                    let f = formula_at(&mut pos, 2)?;
                    if defining.insert(sym.clone(), f).is_some() {
                        return Err(Error::parse(number, format!("duplicate atom `{sym}`")));
                    }
                }
                "map" => {
                    let mut m = BTreeMap::new();
                    pos += 1;
                    loop {
                        let l = ls
                            .get(pos)
                            .ok_or_else(|| Error::parse(line.number, "missing `end` after `map`"))?;
                        if l.words == ["end"] {
                            pos += 1;
                            break;
                        }
                        let joined = l.words.join(" ").replace(['(', ')', ','], " ");
                        let (lhs, rhs) = joined
                            .split_once("->")
                            .ok_or_else(|| Error::parse(l.number, "expected `<tuple> -> <element>`"))?;
                        let t = lhs
                            .split_whitespace()
                            .map(|w| parse_usize(l, w, "element"))
                            .collect::<Result<Vec<_>>>()?;
                        if t.len() != dim {
                            return Err(Error::parse(l.number, format!("expected a {dim}-tuple")));
                        }
                        let v = match rhs.split_whitespace().collect::<Vec<_>>().as_slice() {
                            [w] => parse_usize(l, w, "element")?,
                            _ => return Err(Error::parse(l.number, "expected one target element")),
                        };
                        if m.insert(t, v).is_some() {
                            return Err(Error::parse(l.number, "tuple mapped twice"));
                        }
                        pos += 1;
                    }
                    map = Some(m);
                }
                "end" => pos += 1,
                w => return Err(Error::parse(line.number, format!("unexpected `{w}`"))),
            }
        }
        if !defining.contains_key(EQ) {
            return Err(Error::parse(head.number, "missing `atom =`"));
        }
        // keep `=` first
        let eq = defining.shift_remove(EQ).unwrap();
        let mut ordered = IndexMap::new();
        ordered.insert(EQ.to_string(), eq);
        ordered.extend(defining);
        Ok(Interpretation {
            dim,
            domain: domain.unwrap_or_else(Formula::truth),
            defining: ordered,
            map,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "interpretation d={}", self.dim);
        let _ = writeln!(out, "domain {}", self.domain);
        for (sym, f) in &self.defining {
            let _ = writeln!(out, "atom {sym} {f}");
        }
        if let Some(m) = &self.map {
            let _ = writeln!(out, "map");
            for (t, v) in m {
                let coords: Vec<String> = t.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{} -> {v}", coords.join(" "));
            }
            let _ = writeln!(out, "end");
        }
        out
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn check_vars(symbol: &str, f: &Formula, allowed: &[String], expected: usize) -> Result<()> {
    f.validate()?;
    for v in f.free_vars() {
        if allowed.contains(&v) {
            continue;
        }
        // x<j> beyond the allowed range is an arity problem, anything else undeclared
        if let Some(j) = v.strip_prefix('x').and_then(|n| n.parse::<usize>().ok()) {
            return Err(Error::ArityMismatch {
                symbol: symbol.to_string(),
                expected,
                found: j,
            });
        }
        return Err(Error::UndeclaredVariable(v));
    }
    Ok(())
}

/// Why an interpretation fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    /// The atomic formula `symbol` applied to the images of `tuples` has
    /// truth value `target_holds` in the target but its defining formula
    /// has `host_holds` in the host.
    Atom {
        symbol: String,
        tuples: Vec<Tuple>,
        target_holds: bool,
        host_holds: bool,
    },
    /// A tuple satisfying the domain formula has no image.
    MapUndefined(Tuple),
    /// A mapped tuple does not satisfy the domain formula.
    OutsideDomain(Tuple),
    /// A target element is not in the image.
    NotSurjective(Element),
}

impl Counterexample {
    /// Re-evaluates an atom counterexample directly with the evaluator.
    pub fn recheck(&self, host: &FiniteStructure, target: &FiniteStructure, i: &Interpretation) -> Result<bool> {
        let Counterexample::Atom {
            symbol,
            tuples,
            target_holds,
            host_holds,
        } = self
        else {
            return Ok(true);
        };
        let map = i.map()?;
        let images: Vec<Element> = tuples.iter().map(|t| map[t]).collect();
        let t_holds = if symbol == EQ {
            images[0] == images[1]
        } else {
            target.relation(symbol)?.contains(&images)
        };
        let names = if symbol == EQ {
            eq_names(i.dim)
        } else {
            atom_names(tuples.len(), i.dim)
        };
        let a: Assignment = names.into_iter().zip(tuples.iter().flatten().copied()).collect();
        let h_holds = eval_formula(host, i.formula(symbol)?, &a)?;
        Ok(t_holds == *target_holds && h_holds == *host_holds && t_holds != h_holds)
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::Atom {
                symbol,
                tuples,
                target_holds,
                host_holds,
            } => write!(
                f,
                "atom {symbol} at {tuples:?}: target {target_holds}, host formula {host_holds}"
            ),
            Counterexample::MapUndefined(t) => write!(f, "{t:?} satisfies the domain formula but has no image"),
            Counterexample::OutsideDomain(t) => write!(f, "{t:?} is mapped but fails the domain formula"),
            Counterexample::NotSurjective(e) => write!(f, "target element {e} is not an image"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Valid,
    Invalid(Counterexample),
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verification::Valid)
    }
}

/// The tuples satisfying the domain formula, sorted.
pub fn interpreted_domain(host: &FiniteStructure, i: &Interpretation) -> Result<Vec<Tuple>> {
    Ok(defined_relation(host, &i.domain, &free_names(i.dim))?
        .iter()
        .cloned()
        .collect())
}

/// Checks the interpretation on every atomic formula: `=` first, then the
/// target relations in order; within an atom, tuple choices are scanned in
/// lexicographic order and the first disagreement is reported.
pub fn verify_interpretation(
    host: &FiniteStructure,
    target: &FiniteStructure,
    i: &Interpretation,
    budget: &Budget,
) -> Result<Verification> {
    let map = i.map()?;
    i.check_against(target)?;
    let domain = interpreted_domain(host, i)?;
    let in_domain: BTreeSet<&Tuple> = domain.iter().collect();
    for (t, &v) in map {
        if v >= target.domain_size() {
            return Err(Error::Domain {
                value: v,
                domain_size: target.domain_size(),
            });
        }
        if !in_domain.contains(t) {
            return Ok(Verification::Invalid(Counterexample::OutsideDomain(t.clone())));
        }
    }
    if let Some(t) = domain.iter().find(|t| !map.contains_key(*t)) {
        return Ok(Verification::Invalid(Counterexample::MapUndefined(t.clone())));
    }
    let image: BTreeSet<Element> = map.values().copied().collect();
    if let Some(e) = (0..target.domain_size()).find(|e| !image.contains(e)) {
        return Ok(Verification::Invalid(Counterexample::NotSurjective(e)));
    }

    let images: Vec<Element> = domain.iter().map(|t| map[t]).collect();
    let mut atoms: Vec<(String, usize, Option<&Relation>)> = vec![(EQ.to_string(), 2, None)];
    for (sym, r) in target.relations() {
        atoms.push((sym.clone(), r.arity(), Some(r)));
    }
    for (sym, k, rel) in atoms {
        let names = if rel.is_none() {
            eq_names(i.dim)
        } else {
            atom_names(k, i.dim)
        };
        let host_rel = defined_relation(host, i.formula(&sym)?, &names)?;
        let count = checked_pow(domain.len(), k);
        budget.check_search("atom instances to verify", count.map(|c| c as u64))?;
        let found = (0..count.unwrap()).into_par_iter().find_map_first(|idx| {
            let pick = unrank(idx, domain.len(), k);
            let imgs: Vec<Element> = pick.iter().map(|&p| images[p]).collect();
            let target_holds = match rel {
                None => imgs[0] == imgs[1],
                Some(r) => r.contains(&imgs),
            };
            let flat: Tuple = pick.iter().flat_map(|&p| domain[p].iter().copied()).collect();
            let host_holds = host_rel.contains(&flat);
            (target_holds != host_holds).then(|| Counterexample::Atom {
                symbol: sym.clone(),
                tuples: pick.iter().map(|&p| domain[p].clone()).collect(),
                target_holds,
                host_holds,
            })
        });
        if let Some(c) = found {
            return Ok(Verification::Invalid(c));
        }
    }
    Ok(Verification::Valid)
}

/// Builds an interpretation from a coordinate map `h` defined on a set of
/// `d`-tuples of the host: every formula is the pp-definition of the
/// corresponding relation on host tuples.
pub fn build_interpretation(
    host: &FiniteStructure,
    target: &FiniteStructure,
    d: usize,
    h: &BTreeMap<Tuple, Element>,
    budget: &Budget,
) -> Result<Interpretation> {
    if d == 0 {
        return Err(Error::InvalidInterpretation("dimension must be positive".into()));
    }
    for (t, &v) in h {
        if t.len() != d {
            return Err(Error::Shape(format!("map key {t:?} is not a {d}-tuple")));
        }
        if let Some(&x) = t.iter().find(|&&x| x >= host.domain_size()) {
            return Err(Error::Domain {
                value: x,
                domain_size: host.domain_size(),
            });
        }
        if v >= target.domain_size() {
            return Err(Error::Domain {
                value: v,
                domain_size: target.domain_size(),
            });
        }
    }
    let image: BTreeSet<Element> = h.values().copied().collect();
    if image.len() != target.domain_size() {
        return Err(Error::InvalidInterpretation("coordinate map is not surjective".into()));
    }
    let define = |name: &str, r: &Relation| -> Result<Formula> {
        construct_pp_definition(host, r, budget).map_err(|e| match e {
            Error::NotDefinable(w) => Error::NotInterpretable {
                relation: name.to_string(),
                witness: w,
            },
            other => other,
        })
    };
    let domain_rel = Relation::new(d, h.keys().cloned())?;
    let domain = define("domain", &domain_rel)?;

    let mut defining = IndexMap::new();
    let kernel = kernel_relation(h, d);
    let renaming: BTreeMap<String, String> = free_names(2 * d).into_iter().zip(eq_names(d)).collect();
    defining.insert(EQ.to_string(), define(EQ, &kernel)?.rename_free(&renaming));

    let keys: Vec<&Tuple> = h.keys().collect();
    for (sym, r) in target.relations() {
        let k = r.arity();
        let count = checked_pow(keys.len(), k).map(|c| c as u64);
        budget.check_search("preimage tuples", count)?;
        let mut tuples = Vec::new();
        for idx in 0..count.unwrap() as usize {
            let pick = unrank(idx, keys.len(), k);
            let imgs: Vec<Element> = pick.iter().map(|&p| h[keys[p]]).collect();
            if r.contains(&imgs) {
                tuples.push(pick.iter().flat_map(|&p| keys[p].iter().copied()).collect());
            }
        }
        let pre = Relation::new(k * d, tuples)?;
        defining.insert(sym.clone(), define(sym, &pre)?);
    }
    let i = Interpretation {
        dim: d,
        domain,
        defining,
        map: Some(h.clone()),
    };
    match verify_interpretation(host, target, &i, budget)? {
        Verification::Valid => Ok(i),
        Verification::Invalid(c) => Err(Error::InvalidInterpretation(c.to_string())),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::tuple::Tuples;

    pub(crate) fn oit() -> FiniteStructure {
        FiniteStructure::new("oit", 2)
            .unwrap()
            .with_relation("OIT", 3, [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]])
            .unwrap()
    }

    pub(crate) fn neq3() -> FiniteStructure {
        FiniteStructure::new("neq3", 3)
            .unwrap()
            .with_relation("N", 2, Tuples::new(3, 2).filter(|t| t[0] != t[1]))
            .unwrap()
    }

    /// `({0..n-1}; =)`: a domain with no relations.
    pub(crate) fn bare(n: usize) -> FiniteStructure {
        FiniteStructure::new(format!("eq{n}"), n).unwrap()
    }

    /// Pairs over `0..n`, ranked `a·n + b`, with `M(u, v)` iff `u2 = v1`.
    pub(crate) fn pairs(n: usize) -> FiniteStructure {
        let m = Tuples::new(n * n, 2).filter(|t| t[0] % n == t[1] / n);
        FiniteStructure::new(format!("pairs{n}"), n * n)
            .unwrap()
            .with_relation("M", 2, m)
            .unwrap()
    }

    /// Pairs inside the bare domain: `d = 2`, `h` the ranking.
    pub(crate) fn pairs_in_bare(n: usize) -> Interpretation {
        let mut defining = IndexMap::new();
        defining.insert(EQ.to_string(), Formula::parse("(and (= x1 y1) (= x2 y2))").unwrap());
        defining.insert("M".to_string(), Formula::parse("(= x2 x3)").unwrap());
        Interpretation {
            dim: 2,
            domain: Formula::truth(),
            defining,
            map: Some(Tuples::new(n, 2).map(|t| (t.clone(), t[0] * n + t[1])).collect()),
        }
    }

    #[test]
    fn identity_is_valid() {
        for s in [oit(), neq3(), pairs(2)] {
            let i = Interpretation::identity(&s);
            assert_eq!(
                verify_interpretation(&s, &s, &i, &Budget::default()).unwrap(),
                Verification::Valid
            );
        }
    }

    #[test]
    fn pairs_in_equality_fragment() {
        for n in 2..=4 {
            let v = verify_interpretation(&bare(n), &pairs(n), &pairs_in_bare(n), &Budget::default()).unwrap();
            assert_eq!(v, Verification::Valid);
        }
    }

    #[test]
    fn missing_map() {
        let mut i = Interpretation::identity(&oit());
        i.map = None;
        assert_eq!(
            verify_interpretation(&oit(), &oit(), &i, &Budget::default()),
            Err(Error::MissingMap)
        );
    }

    #[test]
    fn arity_mismatch() {
        let mut i = Interpretation::identity(&oit());
        i.defining
            .insert("OIT".into(), Formula::parse("(rel OIT x1 x2 x4)").unwrap());
        assert!(matches!(
            verify_interpretation(&oit(), &oit(), &i, &Budget::default()),
            Err(Error::ArityMismatch {
                found: 4,
                expected: 3,
                ..
            })
        ));
        i.defining
            .insert("OIT".into(), Formula::parse("(rel OIT x1 x2 z)").unwrap());
        assert_eq!(
            verify_interpretation(&oit(), &oit(), &i, &Budget::default()),
            Err(Error::UndeclaredVariable("z".into()))
        );
    }

    #[test]
    fn wrong_formula_gives_rechecked_counterexample() {
        let mut i = Interpretation::identity(&neq3());
        i.defining.insert("N".into(), Formula::parse("(= x1 x2)").unwrap());
        let Verification::Invalid(c) = verify_interpretation(&neq3(), &neq3(), &i, &Budget::default()).unwrap() else {
            panic!()
        };
        assert_eq!(
            c,
            Counterexample::Atom {
                symbol: "N".into(),
                tuples: vec![vec![0], vec![0]],
                target_holds: false,
                host_holds: true
            }
        );
        assert!(c.recheck(&neq3(), &neq3(), &i).unwrap());
    }

    #[test]
    fn map_shape_problems() {
        let mut i = Interpretation::identity(&oit());
        i.map.as_mut().unwrap().remove(&vec![1]);
        assert_eq!(
            verify_interpretation(&oit(), &oit(), &i, &Budget::default()).unwrap(),
            Verification::Invalid(Counterexample::MapUndefined(vec![1]))
        );
        let mut i = Interpretation::identity(&oit());
        i.map.as_mut().unwrap().insert(vec![1], 0);
        assert_eq!(
            verify_interpretation(&oit(), &oit(), &i, &Budget::default()).unwrap(),
            Verification::Invalid(Counterexample::NotSurjective(1))
        );
    }

    #[test]
    fn build_identity_data() {
        let h: BTreeMap<Tuple, Element> = (0..2).map(|a| (vec![a], a)).collect();
        let i = build_interpretation(&oit(), &oit(), 1, &h, &Budget::default()).unwrap();
        assert_eq!(i.defining["OIT"], Formula::rel("OIT", free_names(3)));
        assert_eq!(i.defining[EQ], Formula::eq("x1", "y1"));
    }

    #[test]
    fn build_reports_the_failing_relation() {
        // U = {0} pulled back along the identity
        let target = FiniteStructure::new("t", 3)
            .unwrap()
            .with_relation("U", 1, [vec![0]])
            .unwrap();
        let h: BTreeMap<Tuple, Element> = (0..3).map(|a| (vec![a], a)).collect();
        let err = build_interpretation(&neq3(), &target, 1, &h, &Budget::default()).unwrap_err();
        let Error::NotInterpretable { relation, witness } = err else {
            panic!("{err:?}")
        };
        assert_eq!(relation, "U");
        assert!(witness.contains("1 0 2"), "{witness}");
    }

    #[test]
    fn build_two_dimensional() {
        // pairs over {0,1} inside the bare 2-element set
        let h: BTreeMap<Tuple, Element> = Tuples::new(2, 2).map(|t| (t.clone(), t[0] * 2 + t[1])).collect();
        let i = build_interpretation(&bare(2), &pairs(2), 2, &h, &Budget::default()).unwrap();
        assert!(verify_interpretation(&bare(2), &pairs(2), &i, &Budget::default())
            .unwrap()
            .is_valid());
    }

    #[test]
    fn text_round_trip() {
        let i = pairs_in_bare(2);
        let text = i.to_text();
        assert!(text.starts_with(
            "interpretation d=2\ndomain (and)\natom = (and (= x1 y1) (= x2 y2))\natom M (= x2 x3)\nmap\n0 0 -> 0\n"
        ));
        assert_eq!(Interpretation::parse(&text).unwrap(), i);
        let multi = "interpretation d=1\ndomain true\natom = (exists (p)\n  (and (rel M p x1)\n       (rel M p y1)))\n";
        let j = Interpretation::parse(multi).unwrap();
        assert_eq!(j.defining[EQ].atom_count(), 2);
        assert!(j.map.is_none());
        assert!(matches!(
            Interpretation::parse("interpretation d=1\natom = (= x1 y1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Interpretation::parse("interpretation d=1\natom = (= x1 y1)\nmap\n(0) -> 0\n(0) -> 1\nend\n"),
            Err(Error::Parse { line: 5, .. })
        ));
    }
}
