use std::collections::HashMap;
use std::fmt;

use crate::algebra::{birkhoff_bound, hsp_fin_member, AlgebraSpec, HspResult};
use crate::budget::{checked_pow, Budget};
use crate::error::{Error, Result};
use crate::tuple::Tuples;
use crate::Element;

pub const DEFAULT_TERM_DEPTH: usize = 3;

/// A term over variables `0..v` in the signature of an algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn eval(&self, a: &AlgebraSpec, assignment: &[Element]) -> Result<Element> {
        match self {
            Term::Var(i) => assignment.get(*i).copied().ok_or(Error::Index {
                index: *i + 1,
                arity: assignment.len(),
            }),
            Term::App(s, args) => {
                let f = a
                    .op(s)
                    .ok_or_else(|| Error::SignatureMismatch(format!("no operation `{s}` in {}", a.name())))?;
                let vals = args.iter().map(|t| t.eval(a, assignment)).collect::<Result<Vec<_>>>()?;
                if vals.len() != f.arity() {
                    return Err(Error::Shape(format!("`{s}` applied to {} arguments", vals.len())));
                }
                Ok(f.apply(&vals))
            }
        }
    }

    /// The term operation on `vars` variables as a table over `A^vars`.
    pub fn table(&self, a: &AlgebraSpec, vars: usize) -> Result<Vec<Element>> {
        Tuples::new(a.domain_size(), vars).map(|t| self.eval(a, &t)).collect()
    }
}

const NAMES: [&str; 3] = ["x", "y", "z"];

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => match NAMES.get(*i) {
                Some(n) => f.write_str(n),
                None => write!(f, "x{}", i + 1),
            },
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NatHom {
    Exists,
    /// `s` and `t` induce the same operation on `A` but not on `B`.
    Fails {
        s: Term,
        t: Term,
        vars: usize,
    },
    /// No separating equation up to this depth, and membership could not be
    /// confirmed.
    Inconclusive(usize),
}

pub fn natural_homomorphism_exists(a: &AlgebraSpec, b: &AlgebraSpec, budget: &Budget) -> Result<NatHom> {
    natural_homomorphism_with_depth(a, b, DEFAULT_TERM_DEPTH, budget)
}

/// Looks for an equation true in `a` and false in `b` among terms of depth
/// at most `depth` in `max(|B|, 1)` variables; then asks for membership of
/// `b` in the pseudovariety of `a` at the Birkhoff bound.
///
/// Terms are deduplicated by the pair of their operations on `a` and `b`;
/// if the set of pairs stops growing before `depth`, every term has been
/// seen and the absence of a separating equation is conclusive.
pub fn natural_homomorphism_with_depth(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    depth: usize,
    budget: &Budget,
) -> Result<NatHom> {
    a.check_same_signature(b)?;
    let vars = b.domain_size().max(1);
    let rows_a = budget.check_elements("term table", checked_pow(a.domain_size(), vars))?;
    budget.check_elements("term table", checked_pow(b.domain_size(), vars))?;
    let points_a: Vec<Vec<Element>> = Tuples::new(a.domain_size(), vars).collect();
    let points_b: Vec<Vec<Element>> = Tuples::new(b.domain_size(), vars).collect();
    debug_assert_eq!(points_a.len(), rows_a);

    // representatives: (term, table on A, table on B)
    let mut reps: Vec<(Term, Vec<Element>, Vec<Element>)> = Vec::new();
    let mut by_a: HashMap<Vec<Element>, usize> = HashMap::new();
    let mut saturated = false;

    let mut consider = |term: Term,
                        ta: Vec<Element>,
                        tb: Vec<Element>,
                        reps: &mut Vec<(Term, Vec<Element>, Vec<Element>)>|
     -> Option<NatHom> {
        match by_a.get(&ta) {
            Some(&i) => {
                let (ref s, _, ref sb) = reps[i];
                (sb != &tb).then(|| NatHom::Fails {
                    s: s.clone(),
                    t: term,
                    vars,
                })
            }
            None => {
                by_a.insert(ta.clone(), reps.len());
                reps.push((term, ta, tb));
                None
            }
        }
    };

    for v in 0..vars {
        let ta = points_a.iter().map(|p| p[v]).collect();
        let tb = points_b.iter().map(|p| p[v]).collect();
        if let Some(w) = consider(Term::Var(v), ta, tb, &mut reps) {
            return Ok(w);
        }
    }
    let tables_a: Vec<_> = a.ops().iter().collect();
    let mut level_start = 0;
    for _ in 0..depth {
        let known = reps.len();
        for (symbol, f) in &tables_a {
            let g = &b.ops()[*symbol];
            let k = f.arity();
            let combos = checked_pow(known, k).map(|c| c as u64);
            budget.check_search("term combinations", combos)?;
            for pick in Tuples::new(known, k) {
                // at least one argument from the previous level
                if k > 0 && pick.iter().all(|&i| i < level_start) {
                    continue;
                }
                if k == 0 && level_start > 0 {
                    continue;
                }
                let mut row = vec![0; k];
                let ta: Vec<Element> = (0..points_a.len())
                    .map(|p| {
                        for (slot, &i) in row.iter_mut().zip(&pick) {
                            *slot = reps[i].1[p];
                        }
                        f.apply(&row)
                    })
                    .collect();
                let tb: Vec<Element> = (0..points_b.len())
                    .map(|p| {
                        for (slot, &i) in row.iter_mut().zip(&pick) {
                            *slot = reps[i].2[p];
                        }
                        g.apply(&row)
                    })
                    .collect();
                let term = Term::App(symbol.to_string(), pick.iter().map(|&i| reps[i].0.clone()).collect());
                if let Some(w) = consider(term, ta, tb, &mut reps) {
                    return Ok(w);
                }
            }
        }
        if reps.len() == known {
            saturated = true;
            break;
        }
        level_start = known;
    }

    let n = birkhoff_bound(a, b).unwrap_or(usize::MAX);
    match hsp_fin_member(a, b, n, budget) {
        Ok(HspResult::Certificate(_)) => Ok(NatHom::Exists),
        Ok(_) if saturated => Err(Error::Shape(
            "term search saturated without a separating equation but membership failed".into(),
        )),
        Ok(_) => Ok(NatHom::Inconclusive(depth)),
        Err(e) if e.is_budget() && saturated => Ok(NatHom::Exists),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::{and, binary, trivial, xor};

    #[test]
    fn identity() {
        assert_eq!(
            natural_homomorphism_exists(&and(), &and(), &Budget::default()).unwrap(),
            NatHom::Exists
        );
    }

    #[test]
    fn xor_to_and_fails() {
        let r = natural_homomorphism_exists(&xor(), &and(), &Budget::default()).unwrap();
        let NatHom::Fails { s, t, vars } = r else {
            panic!("{r:?}")
        };
        assert_eq!(s.to_string(), "f(x,x)");
        assert_eq!(t.to_string(), "f(y,y)");
        assert_eq!(vars, 2);
        // the witness re-checks
        assert_eq!(s.table(&xor(), 2).unwrap(), t.table(&xor(), 2).unwrap());
        assert_ne!(s.table(&and(), 2).unwrap(), t.table(&and(), 2).unwrap());
    }

    #[test]
    fn to_trivial_algebra() {
        assert_eq!(
            natural_homomorphism_exists(&and(), &trivial(), &Budget::default()).unwrap(),
            NatHom::Exists
        );
    }

    #[test]
    fn commutativity_separates() {
        // first projection is not commutative; AND is
        let p = binary("p", 2, |x, _| x);
        let r = natural_homomorphism_exists(&and(), &p, &Budget::default()).unwrap();
        assert!(matches!(r, NatHom::Fails { .. }));
    }

    #[test]
    fn display() {
        let t = Term::App("g".into(), vec![Term::Var(0), Term::Var(4)]);
        assert_eq!(t.to_string(), "g(x,x5)");
        assert_eq!(t.depth(), 1);
    }
}
