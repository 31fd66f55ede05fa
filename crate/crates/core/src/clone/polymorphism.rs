use std::collections::HashSet;
use std::sync::Arc;

use crate::budget::{checked_pow, Budget};
use crate::clone::OperationTable;
use crate::error::{Error, Result};
use crate::structure::{Csp, FiniteStructure, Relation};
use crate::tuple::rank;
use crate::Tuple;

/// A failed preservation check: applying the operation row-wise to
/// `chosen` (one relation tuple per argument) gives `image`, which is not
/// in the relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub chosen: Vec<Tuple>,
    pub image: Tuple,
}

impl Violation {
    /// Re-applies `f` and confirms the image really falls outside `r`.
    pub fn recheck(&self, f: &OperationTable, r: &Relation) -> bool {
        self.chosen.len() == f.arity()
            && self.chosen.iter().all(|t| r.contains(t))
            && apply_rows(f, &self.chosen, r.arity()) == self.image
            && !r.contains(&self.image)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preservation {
    Preserved,
    Violated(Violation),
}

impl Preservation {
    pub fn holds(&self) -> bool {
        matches!(self, Preservation::Preserved)
    }
}

pub(crate) fn apply_rows(f: &OperationTable, chosen: &[Tuple], width: usize) -> Tuple {
    let mut args = vec![0; chosen.len()];
    (0..width)
        .map(|j| {
            for (slot, t) in args.iter_mut().zip(chosen) {
                *slot = t[j];
            }
            f.apply(&args)
        })
        .collect()
}

/// Checks `f` against every choice of `arity(f)` tuples of `r`; the first
/// violating choice in lexicographic order is returned.
pub fn preserves_relation(f: &OperationTable, r: &Relation) -> Preservation {
    let tuples: Vec<&Tuple> = r.iter().collect();
    let k = f.arity();
    if k > 0 && tuples.is_empty() {
        return Preservation::Preserved;
    }
    let mut pick = vec![0usize; k];
    loop {
        let chosen: Vec<Tuple> = pick.iter().map(|&i| tuples[i].clone()).collect();
        let image = apply_rows(f, &chosen, r.arity());
        if !r.contains(&image) {
            return Preservation::Violated(Violation { chosen, image });
        }
        if !crate::tuple::advance(&mut pick, tuples.len()) {
            return Preservation::Preserved;
        }
    }
}

pub fn preserves(f: &OperationTable, s: &FiniteStructure, symbol: &str) -> Result<Preservation> {
    let r = s.relation(symbol)?;
    if f.domain_size() != s.domain_size() {
        return Err(Error::Shape(format!(
            "operation on {} elements, structure on {}",
            f.domain_size(),
            s.domain_size()
        )));
    }
    Ok(preserves_relation(f, r))
}

pub fn is_polymorphism(f: &OperationTable, s: &FiniteStructure) -> bool {
    f.domain_size() == s.domain_size() && s.relations().values().all(|r| preserves_relation(f, r).holds())
}

/// The constraint network whose solutions are exactly the `k`-ary
/// polymorphisms of `s`: variable `i` is the table entry at rank `i`.
pub(crate) fn polymorphism_csp(s: &FiniteStructure, k: usize) -> Result<Csp> {
    let n = s.domain_size();
    let size = checked_pow(n, k).ok_or_else(|| Error::budget("table size", "overflow", usize::MAX))?;
    let mut csp = Csp::new(n, size);
    for (symbol, r) in s.relations() {
        let tuples: Vec<Tuple> = r.iter().cloned().collect();
        let shared = Arc::new(tuples.clone());
        if tuples.is_empty() {
            if k == 0 {
                // a constant cannot land in an empty relation
                csp.restrict(0, []);
            }
            continue;
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut pick = vec![0usize; k];
        let mut args = vec![0; k];
        loop {
            let vars: Vec<usize> = (0..r.arity())
                .map(|j| {
                    for (slot, &i) in args.iter_mut().zip(&pick) {
                        *slot = tuples[i][j];
                    }
                    rank(&args, n)
                })
                .collect();
            if seen.insert(vars.clone()) {
                csp.add_table(vars, shared.clone(), symbol);
            }
            if !crate::tuple::advance(&mut pick, tuples.len()) {
                break;
            }
        }
    }
    Ok(csp)
}

/// All `k`-ary polymorphisms of `s`, in lexicographic order of their tables.
pub fn polymorphisms(s: &FiniteStructure, k: usize, budget: &Budget) -> Result<Vec<OperationTable>> {
    budget.check_candidates(s.domain_size(), k)?;
    let mut csp = polymorphism_csp(s, k)?;
    Ok(csp
        .all_solutions_parallel()
        .into_iter()
        .map(|values| OperationTable::new(s.domain_size(), k, values).expect("solver returned a table"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone::projection;
    use crate::tuple::Tuples;

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

    fn brute_force(s: &FiniteStructure, k: usize) -> Vec<OperationTable> {
        let n = s.domain_size();
        Tuples::new(n, n.pow(k as u32))
            .map(|v| OperationTable::new(n, k, v).unwrap())
            .filter(|f| is_polymorphism(f, s))
            .collect()
    }

    #[test]
    fn identity_preserves_oit() {
        let id = projection(2, 1, 1).unwrap();
        assert_eq!(preserves(&id, &oit(), "OIT").unwrap(), Preservation::Preserved);
    }

    #[test]
    fn negation_violates_oit() {
        let neg = OperationTable::from_fn(2, 1, |t| 1 - t[0]);
        let p = preserves(&neg, &oit(), "OIT").unwrap();
        let Preservation::Violated(v) = p else { panic!() };
        assert_eq!(v.chosen, vec![vec![0, 0, 1]]);
        assert_eq!(v.image, vec![1, 1, 0]);
        assert!(v.recheck(&neg, oit().relation("OIT").unwrap()));
    }

    #[test]
    fn and_violates_oit() {
        let and = OperationTable::from_fn(2, 2, |t| t[0] & t[1]);
        let Preservation::Violated(v) = preserves(&and, &oit(), "OIT").unwrap() else {
            panic!()
        };
        assert_eq!(v.chosen, vec![vec![0, 0, 1], vec![0, 1, 0]]);
        assert_eq!(v.image, vec![0, 0, 0]);
    }

    #[test]
    fn unknown_relation() {
        let id = projection(2, 1, 1).unwrap();
        assert_eq!(preserves(&id, &oit(), "R"), Err(Error::UnknownRelation("R".into())));
    }

    #[test]
    fn oit_polymorphisms_are_projections() {
        let b = Budget::default();
        assert_eq!(
            polymorphisms(&oit(), 1, &b).unwrap(),
            vec![projection(2, 1, 1).unwrap()]
        );
        assert_eq!(
            polymorphisms(&oit(), 2, &b).unwrap(),
            vec![projection(2, 2, 1).unwrap(), projection(2, 2, 2).unwrap()]
        );
        // brute force agrees: constants and negation each break some OIT tuple
        assert_eq!(brute_force(&oit(), 1).len(), 1);
    }

    #[test]
    fn unary_polymorphisms_of_k3_are_permutations() {
        let pols = polymorphisms(&neq3(), 1, &Budget::default()).unwrap();
        assert_eq!(pols, brute_force(&neq3(), 1));
        assert_eq!(pols.len(), 6);
        for p in &pols {
            let mut v = p.values().to_vec();
            v.sort();
            assert_eq!(v, vec![0, 1, 2]);
        }
    }

    #[test]
    fn agrees_with_brute_force_on_binary_k3() {
        let pols = polymorphisms(&neq3(), 2, &Budget::default()).unwrap();
        assert_eq!(pols, brute_force(&neq3(), 2));
        assert_eq!(pols.len(), 12);
    }

    #[test]
    fn budget_guard() {
        let err = polymorphisms(&neq3(), 3, &Budget::default()).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn nullary_polymorphisms_are_loops() {
        let s = FiniteStructure::new("s", 3)
            .unwrap()
            .with_relation("R", 2, [vec![1, 1], vec![0, 2]])
            .unwrap();
        let pols = polymorphisms(&s, 0, &Budget::default()).unwrap();
        assert_eq!(pols, vec![OperationTable::new(3, 0, vec![1]).unwrap()]);
    }
}
