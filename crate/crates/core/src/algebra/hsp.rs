use std::collections::BTreeMap;

use crate::algebra::{AlgebraSpec, Congruence};
use crate::budget::{checked_pow, Budget};
use crate::clone::OperationTable;
use crate::closure::close_labelled;
use crate::error::Result;
use crate::tuple::{unrank, Tuples};
use crate::{Element, Tuple};

/// `B` is a homomorphic image of the subalgebra of `A^power` generated by
/// `generators`, via `map`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HspCertificate {
    pub power: usize,
    /// `generators[b]` is sent to `b`.
    pub generators: Vec<Tuple>,
    /// The surjection `h: S -> B`; its keys are exactly the elements of `S`.
    pub map: BTreeMap<Tuple, Element>,
}

impl HspCertificate {
    pub fn subuniverse(&self) -> Vec<&Tuple> {
        self.map.keys().collect()
    }

    /// The kernel of `h` as a partition of `S`, elements of `S` indexed in
    /// sorted order.
    pub fn kernel(&self) -> Congruence {
        Congruence::from_labels(&self.map.values().copied().collect::<Vec<_>>())
    }

    /// Re-checks the certificate from scratch and returns a transcript.
    pub fn verify(&self, a: &AlgebraSpec, b: &AlgebraSpec) -> std::result::Result<Vec<String>, String> {
        a.check_same_signature(b).map_err(|e| e.to_string())?;
        let n = a.domain_size();
        let mut log = Vec::new();
        for (t, &v) in &self.map {
            if t.len() != self.power || t.iter().any(|&x| x >= n) || v >= b.domain_size() {
                return Err(format!("entry {t:?} -> {v} out of range"));
            }
        }
        for (i, g) in self.generators.iter().enumerate() {
            if self.map.get(g) != Some(&i) {
                return Err(format!("generator {g:?} is not sent to {i}"));
            }
        }
        if self.generators.len() != b.domain_size() {
            return Err("need one generator per element of B".into());
        }
        log.push(format!(
            "S has {} elements in A^{}; h is onto the {} elements of B",
            self.map.len(),
            self.power,
            b.domain_size()
        ));
        let members: Vec<&Tuple> = self.map.keys().collect();
        for (symbol, f) in a.ops() {
            let g = &b.ops()[symbol];
            let mut points = 0u64;
            for pick in Tuples::new(members.len(), f.arity()) {
                let args: Vec<&Tuple> = pick.iter().map(|&i| members[i]).collect();
                let image = apply_componentwise(f, &args, self.power);
                let Some(&hv) = self.map.get(&image) else {
                    return Err(format!("S is not closed under {symbol}: {args:?} gives {image:?}"));
                };
                let mapped: Vec<Element> = args.iter().map(|t| self.map[*t]).collect();
                if g.apply(&mapped) != hv {
                    return Err(format!("h does not commute with {symbol} at {args:?}"));
                }
                points += 1;
            }
            log.push(format!("{symbol}: S closed and h commutes at {points} points"));
        }
        log.push(format!(
            "kernel of h: {} blocks, a congruence of S",
            self.kernel().block_count()
        ));
        Ok(log)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HspResult {
    Certificate(HspCertificate),
    NotMember,
    /// The search up to this power was inconclusive.
    Exhausted(usize),
}

/// `|A|^|B|`: at this power the search is complete.
pub fn birkhoff_bound(a: &AlgebraSpec, b: &AlgebraSpec) -> Option<usize> {
    checked_pow(a.domain_size(), b.domain_size())
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

/// Closes `gens[b] -> b` in `A^width x B`; `Some` when the closure is the
/// graph of a map.
fn try_generators(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    gens: &[Tuple],
    width: usize,
    cap: usize,
) -> Result<Option<HspCertificate>> {
    let tables_a: Vec<&OperationTable> = a.ops().values().collect();
    let tables_b = a.aligned(b);
    let seeds = gens.iter().cloned().zip(0..).collect();
    let closed = close_labelled(
        seeds,
        &a.arities(),
        |op, args| apply_componentwise(tables_a[op], args, width),
        |op, labels| tables_b[op].apply(&labels.iter().map(|&&l| l).collect::<Vec<_>>()),
        cap,
    )?;
    Ok(closed.map(|members| HspCertificate {
        power: width,
        generators: gens.to_vec(),
        map: members.into_iter().collect(),
    }))
}

/// Largest number of generator choices tried per power when the free
/// generators have already produced a certificate.
const SMALL_POWER_SEARCH: u64 = 1 << 16;

/// Searches for `B` as a homomorphic image of a subalgebra of `A^n`,
/// `n = 1..=n_max`. Subalgebras are generated by one tuple per element of
/// `B`; the first certificate in order of `n` and then of generator choice
/// is returned. At `n = |A|^|B|` the free generators decide membership, so
/// when `n_max` reaches that bound the decisive check runs first and the
/// small powers are only searched for a smaller certificate.
pub fn hsp_fin_member(a: &AlgebraSpec, b: &AlgebraSpec, n_max: usize, budget: &Budget) -> Result<HspResult> {
    a.check_same_signature(b)?;
    let bound = birkhoff_bound(a, b).filter(|&bd| bd <= n_max);
    let Some(bd) = bound else {
        return Ok(match small_powers(a, b, n_max, budget.max_search, budget)? {
            Some(c) => HspResult::Certificate(c),
            None => HspResult::Exhausted(n_max),
        });
    };
    let Some(free) = canonical(a, b, bd, budget)? else {
        return Ok(HspResult::NotMember);
    };
    let smaller = small_powers(a, b, bd - 1, SMALL_POWER_SEARCH.min(budget.max_search), budget)?;
    Ok(HspResult::Certificate(smaller.unwrap_or(free)))
}

/// First certificate with `n <= n_max`, stopping at the first power whose
/// generator choices exceed `max_maps`.
fn small_powers(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    n_max: usize,
    max_maps: u64,
    budget: &Budget,
) -> Result<Option<HspCertificate>> {
    let na = a.domain_size();
    let nb = b.domain_size();
    for n in 1..=n_max {
        let maps = checked_pow(na, n * nb).map(|m| m as u64);
        if maps.is_none_or(|m| m > max_maps) {
            break;
        }
        let cap = budget.max_elements;
        for flat in Tuples::new(na, n * nb) {
            let gens: Vec<Tuple> = flat.chunks(n.max(1)).map(<[Element]>::to_vec).collect();
            if (0..nb).any(|i| (0..i).any(|j| gens[i] == gens[j])) {
                continue;
            }
            if let Some(cert) = try_generators(a, b, &gens, n, cap)? {
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

/// The free generators `x_b(α) = α(b)` over all `α: B -> A`.
fn canonical(a: &AlgebraSpec, b: &AlgebraSpec, n: usize, budget: &Budget) -> Result<Option<HspCertificate>> {
    let na = a.domain_size();
    let nb = b.domain_size();
    let cap = budget.max_elements;
    budget.check_elements("coordinates of the free generators", Some(n))?;
    let alphas: Vec<Tuple> = (0..n).map(|i| unrank(i, na, nb)).collect();
    let gens: Vec<Tuple> = (0..nb).map(|bi| alphas.iter().map(|al| al[bi]).collect()).collect();
    try_generators(a, b, &gens, n, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::{and, binary, trivial, xor};

    fn cert(r: HspResult) -> HspCertificate {
        match r {
            HspResult::Certificate(c) => c,
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn algebra_in_its_own_pseudovariety() {
        let c = cert(hsp_fin_member(&and(), &and(), 1, &Budget::default()).unwrap());
        assert_eq!(c.power, 1);
        assert_eq!(c.map, BTreeMap::from([(vec![0], 0), (vec![1], 1)]));
        assert!(c.verify(&and(), &and()).is_ok());
    }

    #[test]
    fn xor_does_not_generate_and() {
        assert_eq!(
            hsp_fin_member(&xor(), &and(), 4, &Budget::default()).unwrap(),
            HspResult::NotMember
        );
        assert_eq!(
            hsp_fin_member(&xor(), &and(), 3, &Budget::default()).unwrap(),
            HspResult::Exhausted(3)
        );
    }

    #[test]
    fn trivial_algebra_everywhere() {
        let c = cert(hsp_fin_member(&and(), &trivial(), 1, &Budget::default()).unwrap());
        assert_eq!(c.power, 1);
        assert_eq!(c.kernel().block_count(), 1);
        assert!(c.verify(&and(), &trivial()).is_ok());
    }

    #[test]
    fn z2_from_z4_needs_a_quotient() {
        let z4 = binary("z4", 4, |x, y| (x + y) % 4);
        let z2 = binary("z2", 2, |x, y| (x + y) % 2);
        let c = cert(hsp_fin_member(&z4, &z2, 1, &Budget::default()).unwrap());
        assert!(c.verify(&z4, &z2).is_ok());
        assert_eq!(c.kernel().block_count(), 2);
        // Z4 is not a quotient of subgroups of powers of Z2 (exponent 2)
        assert_eq!(
            hsp_fin_member(&z2, &z4, 16, &Budget::default()).unwrap(),
            HspResult::NotMember
        );
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut c = cert(hsp_fin_member(&and(), &and(), 1, &Budget::default()).unwrap());
        c.map.insert(vec![0], 1);
        assert!(c.verify(&and(), &and()).is_err());
    }

    #[test]
    fn canonical_check_agrees_with_search() {
        // semilattices generate the 2-element semilattice at power 1
        let or = binary("or", 2, |x, y| x | y);
        let c = canonical(&or, &and(), 4, &Budget::default()).unwrap().unwrap();
        assert_eq!(c.power, 4);
        assert!(c.verify(&or, &and()).is_ok());
        assert!(matches!(
            hsp_fin_member(&or, &and(), 1, &Budget::default()).unwrap(),
            HspResult::Certificate(_)
        ));
    }
}
