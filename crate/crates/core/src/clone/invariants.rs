use crate::budget::{checked_pow, Budget};
use crate::clone::{preserves_relation, OperationTable};
use crate::error::{Error, Result};
use crate::structure::Relation;
use crate::tuple::unrank;

/// All relations of arity `1..=max_arity` preserved by every operation in
/// `ops`, ordered by arity and then by the bitmask of their tuple ranks.
pub fn invariants(ops: &[OperationTable], max_arity: usize, budget: &Budget) -> Result<Vec<Relation>> {
    let n = match ops.first() {
        Some(f) => f.domain_size(),
        None => return Err(Error::Shape("need at least one operation".into())),
    };
    if ops.iter().any(|f| f.domain_size() != n) {
        return Err(Error::Shape("operations on different domains".into()));
    }
    let mut out = Vec::new();
    for arity in 1..=max_arity {
        let width = checked_pow(n, arity).filter(|&w| w < 64);
        let width = match width {
            Some(w) => w,
            None => return Err(Error::budget("relations to enumerate", "2^(n^m)", budget.max_search)),
        };
        budget.check_search("relations to enumerate", 1u64.checked_shl(width as u32))?;
        for mask in 0..(1u64 << width) {
            let tuples = (0..width).filter(|b| mask & (1 << b) != 0).map(|b| unrank(b, n, arity));
            let r = Relation::new(arity, tuples)?;
            if ops.iter().all(|f| preserves_relation(f, &r).holds()) {
                out.push(r);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone::projection;

    #[test]
    fn identity_preserves_all_unary() {
        let id = projection(2, 1, 1).unwrap();
        assert_eq!(invariants(&[id], 1, &Budget::default()).unwrap().len(), 4);
    }

    #[test]
    fn negation_fixes_only_trivial_sets() {
        let neg = OperationTable::from_fn(2, 1, |t| 1 - t[0]);
        let id = projection(2, 1, 1).unwrap();
        let inv = invariants(&[neg, id], 1, &Budget::default()).unwrap();
        assert_eq!(inv, vec![Relation::empty(1), Relation::full(2, 1)]);
    }

    #[test]
    fn and_preserves_order() {
        let and = OperationTable::from_fn(2, 2, |t| t[0] & t[1]);
        let inv = invariants(&[and], 2, &Budget::default()).unwrap();
        let le = Relation::new(2, [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert!(inv.contains(&le));
        let xor_graph = Relation::new(2, [vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!inv.contains(&xor_graph));
    }

    #[test]
    fn budget() {
        let id = projection(3, 1, 1).unwrap();
        let b = Budget {
            max_search: 100,
            ..Budget::default()
        };
        assert!(invariants(&[id], 2, &b).unwrap_err().is_budget());
    }
}
