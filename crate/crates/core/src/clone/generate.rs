use crate::budget::Budget;
use crate::clone::table::compose_unchecked;
use crate::clone::{projection, OperationTable};
use crate::closure::{close, Origin};
use crate::error::{Error, Result};

/// How a member of a [`CloneFragment`] layer was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// `π^l_i`, 1-based.
    Projection(usize),
    /// `gens[generator]` applied to earlier members of the same layer.
    Composition { generator: usize, args: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub table: OperationTable,
    pub provenance: Provenance,
}

/// The operations of arity `1..=max_arity` in the clone generated by a set
/// of operations.
#[derive(Debug, Clone)]
pub struct CloneFragment {
    domain_size: usize,
    max_arity: usize,
    generators: Vec<OperationTable>,
    layers: Vec<Vec<Member>>,
}

impl CloneFragment {
    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn generators(&self) -> &[OperationTable] {
        &self.generators
    }

    /// Members of the given arity in discovery order (projections first).
    pub fn layer(&self, arity: usize) -> &[Member] {
        arity
            .checked_sub(1)
            .and_then(|i| self.layers.get(i))
            .map_or(&[], Vec::as_slice)
    }

    pub fn tables(&self, arity: usize) -> Vec<&OperationTable> {
        self.layer(arity).iter().map(|m| &m.table).collect()
    }

    pub fn contains(&self, f: &OperationTable) -> bool {
        self.layer(f.arity()).iter().any(|m| &m.table == f)
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Least set of operations of arity at most `max_arity` that contains the
/// generators and all projections and is closed under composition.
///
/// Layer `l` is computed as the closure of the `l` projections under the
/// generators applied pointwise, which is the set of `l`-ary term
/// operations; intermediate arities never exceed `max_arity`.
pub fn generate_clone(gens: &[OperationTable], max_arity: usize, budget: &Budget) -> Result<CloneFragment> {
    let n = match gens.first() {
        Some(g) => g.domain_size(),
        None => return Err(Error::Shape("need at least one generator".into())),
    };
    if gens.iter().any(|g| g.domain_size() != n) {
        return Err(Error::Shape("generators on different domains".into()));
    }
    if let Some(g) = gens.iter().find(|g| g.arity() > max_arity) {
        return Err(Error::Shape(format!(
            "generator of arity {} above the bound {max_arity}",
            g.arity()
        )));
    }
    let arities: Vec<usize> = gens.iter().map(OperationTable::arity).collect();
    let mut layers = Vec::new();
    let mut total = 0usize;
    for l in 1..=max_arity {
        let seeds = (1..=l).map(|i| projection(n, l, i)).collect::<Result<Vec<_>>>()?;
        let cap = budget.max_clone_size.saturating_sub(total);
        let closure = close(
            seeds,
            &arities,
            |op, args| {
                if args.is_empty() {
                    OperationTable::constant(n, l, gens[op].values()[0])
                } else {
                    compose_unchecked(&gens[op], args)
                }
            },
            cap,
        )?;
        total += closure.members.len();
        let layer = closure
            .members
            .into_iter()
            .zip(closure.origins)
            .map(|(table, origin)| Member {
                table,
                provenance: match origin {
                    Origin::Seed(i) => Provenance::Projection(i + 1),
                    Origin::Apply { op, args } => Provenance::Composition { generator: op, args },
                },
            })
            .collect();
        layers.push(layer);
    }
    Ok(CloneFragment {
        domain_size: n,
        max_arity,
        generators: gens.to_vec(),
        layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone::compose;

    fn sorted(tables: Vec<&OperationTable>) -> Vec<OperationTable> {
        let mut v: Vec<_> = tables.into_iter().cloned().collect();
        v.sort();
        v
    }

    #[test]
    fn identity_generates_projections() {
        let id = projection(2, 1, 1).unwrap();
        let c = generate_clone(std::slice::from_ref(&id), 2, &Budget::default()).unwrap();
        assert_eq!(sorted(c.tables(1)), vec![id]);
        assert_eq!(
            sorted(c.tables(2)),
            vec![projection(2, 2, 1).unwrap(), projection(2, 2, 2).unwrap()]
        );
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn negation_is_an_involution() {
        let neg = OperationTable::from_fn(2, 1, |t| 1 - t[0]);
        let c = generate_clone(std::slice::from_ref(&neg), 1, &Budget::default()).unwrap();
        assert_eq!(sorted(c.tables(1)), sorted(vec![&projection(2, 1, 1).unwrap(), &neg]));
        assert_eq!(
            c.layer(1)[1].provenance,
            Provenance::Composition {
                generator: 0,
                args: vec![0]
            }
        );
    }

    #[test]
    fn and_adds_no_new_binary_tables() {
        let and = OperationTable::from_fn(2, 2, |t| t[0] & t[1]);
        let c = generate_clone(std::slice::from_ref(&and), 2, &Budget::default()).unwrap();
        assert_eq!(
            sorted(c.tables(2)),
            sorted(vec![&projection(2, 2, 1).unwrap(), &projection(2, 2, 2).unwrap(), &and])
        );
    }

    #[test]
    fn closed_under_composition() {
        // majority on {0,1} up to arity 3
        let maj = OperationTable::from_fn(2, 3, |t| usize::from(t[0] + t[1] + t[2] >= 2));
        let c = generate_clone(&[maj], 3, &Budget::default()).unwrap();
        for m in 1..=3 {
            for f in c.tables(m) {
                for l in 1..=3 {
                    let layer = c.tables(l);
                    let mut pick = vec![0usize; m];
                    loop {
                        let gs: Vec<OperationTable> = pick.iter().map(|&i| layer[i].clone()).collect();
                        assert!(c.contains(&compose(f, &gs).unwrap()));
                        if !crate::tuple::advance(&mut pick, layer.len()) {
                            break;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn size_cap() {
        let and = OperationTable::from_fn(2, 2, |t| t[0] & t[1]);
        let b = Budget {
            max_clone_size: 3,
            ..Budget::default()
        };
        assert!(generate_clone(&[and], 2, &b).unwrap_err().is_budget());
    }
}
