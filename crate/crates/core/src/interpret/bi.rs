use std::fmt;

use crate::budget::{checked_pow, Budget};
use crate::error::{Error, Result};
use crate::interpret::{interpreted_domain, verify_interpretation, Interpretation, Verification};
use crate::ppdef::{is_pp_definable, Definability, DefinabilityWitness};
use crate::structure::{FiniteStructure, Relation};
use crate::tuple::unrank;
use crate::Tuple;

/// Which composite coordinate relation failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `R_IJ`, a relation over `Δ`.
    Ij,
    /// `R_JI`, a relation over `Γ`.
    Ji,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Ij => "R_IJ",
            Side::Ji => "R_JI",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiFailure {
    pub side: Side,
    pub relation: Relation,
    pub witness: DefinabilityWitness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BiInterpretation {
    BiInterpretable,
    /// Every composite relation that is not pp-definable, with its witness.
    Fails(Vec<BiFailure>),
}

/// `{(x, y_1, ..., y_{d_outer}) : x = h_outer(h_inner(y_1), ...)}` over the
/// host of `inner`, where the `y_c` range over the domain of `inner` and
/// their images must lie in the domain of `outer`.
fn composite(
    outer: &Interpretation,
    inner: &Interpretation,
    inner_domain: &[Tuple],
    budget: &Budget,
) -> Result<Relation> {
    let h_outer = outer.map()?;
    let h_inner = inner.map()?;
    let d = outer.dim;
    let count = checked_pow(inner_domain.len(), d);
    budget.check_search("composite tuples", count.map(|c| c as u64))?;
    let mut tuples = Vec::new();
    for idx in 0..count.unwrap() {
        let pick = unrank(idx, inner_domain.len(), d);
        let mid: Tuple = pick.iter().map(|&p| h_inner[&inner_domain[p]]).collect();
        if let Some(&x) = h_outer.get(&mid) {
            let mut t = vec![x];
            for &p in &pick {
                t.extend(&inner_domain[p]);
            }
            tuples.push(t);
        }
    }
    Relation::new(1 + d * inner.dim, tuples)
}

/// `(R_IJ over Δ, R_JI over Γ)` for `i` interpreting `Δ` in `Γ` and `j`
/// interpreting `Γ` in `Δ`.
pub fn composite_relations(
    gamma: &FiniteStructure,
    delta: &FiniteStructure,
    i: &Interpretation,
    j: &Interpretation,
    budget: &Budget,
) -> Result<(Relation, Relation)> {
    let dom_i = interpreted_domain(gamma, i)?;
    let dom_j = interpreted_domain(delta, j)?;
    let r_ij = composite(i, j, &dom_j, budget)?;
    let r_ji = composite(j, i, &dom_i, budget)?;
    Ok((r_ij, r_ji))
}

/// Checks that `i: Δ in Γ` and `j: Γ in Δ` form a pp-bi-interpretation:
/// both are valid and both composite coordinate relations are pp-definable
/// in their host.
pub fn check_bi_interpretation(
    gamma: &FiniteStructure,
    delta: &FiniteStructure,
    i: &Interpretation,
    j: &Interpretation,
    budget: &Budget,
) -> Result<BiInterpretation> {
    for (name, host, target, x) in [("I", gamma, delta, i), ("J", delta, gamma, j)] {
        if let Verification::Invalid(c) = verify_interpretation(host, target, x, budget)? {
            return Err(Error::InvalidInterpretation(format!("{name}: {c}")));
        }
    }
    let (r_ij, r_ji) = composite_relations(gamma, delta, i, j, budget)?;
    let mut failures = Vec::new();
    for (side, host, r) in [(Side::Ij, delta, r_ij), (Side::Ji, gamma, r_ji)] {
        if let Definability::NotDefinable(witness) = is_pp_definable(host, &r, budget)? {
            failures.push(BiFailure {
                side,
                relation: r,
                witness,
            });
        }
    }
    Ok(if failures.is_empty() {
        BiInterpretation::BiInterpretable
    } else {
        BiInterpretation::Fails(failures)
    })
}
