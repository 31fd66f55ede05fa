//! Semi-naive closure of a seed set under finitary operations. Shared by
//! subalgebra generation, clone generation and the hardness search.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Seed(usize),
    /// `ops[op]` applied to earlier members.
    Apply {
        op: usize,
        args: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Closure<T> {
    pub members: Vec<T>,
    pub origins: Vec<Origin>,
}

/// Closes `seeds` under operations of the given arities. `apply(op, args)`
/// computes one application. Members appear in discovery order; every
/// argument tuple is evaluated exactly once.
pub(crate) fn close<T, F>(seeds: Vec<T>, arities: &[usize], mut apply: F, cap: usize) -> Result<Closure<T>>
where
    T: Clone + Eq + Hash,
    F: FnMut(usize, &[&T]) -> T,
{
    let mut members: Vec<T> = Vec::new();
    let mut origins = Vec::new();
    let mut index: HashMap<T, usize> = HashMap::new();
    let mut push = |item: T, origin: Origin, members: &mut Vec<T>, origins: &mut Vec<Origin>| -> Result<()> {
        if index.contains_key(&item) {
            return Ok(());
        }
        if members.len() >= cap {
            return Err(Error::budget("closure size", members.len() + 1, cap));
        }
        index.insert(item.clone(), members.len());
        members.push(item);
        origins.push(origin);
        Ok(())
    };
    for (i, s) in seeds.into_iter().enumerate() {
        push(s, Origin::Seed(i), &mut members, &mut origins)?;
    }
    for (op, &k) in arities.iter().enumerate() {
        if k == 0 {
            let item = apply(op, &[]);
            push(item, Origin::Apply { op, args: vec![] }, &mut members, &mut origins)?;
        }
    }
    let mut next = 0;
    while next < members.len() {
        let newest = next;
        next += 1;
        for (op, &k) in arities.iter().enumerate() {
            if k == 0 {
                continue;
            }
            // argument tuples over 0..=newest whose largest entry is newest
            for first in 0..k {
                let mut args = vec![0usize; k];
                args[first] = newest;
                loop {
                    let refs: Vec<&T> = args.iter().map(|&a| &members[a]).collect();
                    let item = apply(op, &refs);
                    push(
                        item,
                        Origin::Apply { op, args: args.clone() },
                        &mut members,
                        &mut origins,
                    )?;
                    if !advance_args(&mut args, first, newest) {
                        break;
                    }
                }
            }
        }
    }
    Ok(Closure { members, origins })
}

/// Closes `seeds` while carrying a label along each member, computed by
/// `label(op, labels)` in parallel with `apply`. Returns `None` as soon as one
/// member would receive two different labels, i.e. when the labelling does
/// not extend to a homomorphism on the closure.
pub(crate) fn close_labelled<T, L, F, G>(
    seeds: Vec<(T, L)>,
    arities: &[usize],
    mut apply: F,
    mut label: G,
    cap: usize,
) -> Result<Option<Vec<(T, L)>>>
where
    T: Clone + Eq + Hash,
    L: Clone + Eq,
    F: FnMut(usize, &[&T]) -> T,
    G: FnMut(usize, &[&L]) -> L,
{
    let mut members: Vec<(T, L)> = Vec::new();
    let mut index: HashMap<T, usize> = HashMap::new();
    // Ok(false) signals a conflict
    let mut push = |item: T, l: L, members: &mut Vec<(T, L)>| -> Result<bool> {
        if let Some(&i) = index.get(&item) {
            return Ok(members[i].1 == l);
        }
        if members.len() >= cap {
            return Err(Error::budget("closure size", members.len() + 1, cap));
        }
        index.insert(item.clone(), members.len());
        members.push((item, l));
        Ok(true)
    };
    for (t, l) in seeds {
        if !push(t, l, &mut members)? {
            return Ok(None);
        }
    }
    for (op, &k) in arities.iter().enumerate() {
        if k == 0 && !push(apply(op, &[]), label(op, &[]), &mut members)? {
            return Ok(None);
        }
    }
    let mut next = 0;
    while next < members.len() {
        let newest = next;
        next += 1;
        for (op, &k) in arities.iter().enumerate() {
            if k == 0 {
                continue;
            }
            for first in 0..k {
                let mut args = vec![0usize; k];
                args[first] = newest;
                loop {
                    let item = apply(op, &args.iter().map(|&a| &members[a].0).collect::<Vec<_>>());
                    let l = label(op, &args.iter().map(|&a| &members[a].1).collect::<Vec<_>>());
                    if !push(item, l, &mut members)? {
                        return Ok(None);
                    }
                    if !advance_args(&mut args, first, newest) {
                        break;
                    }
                }
            }
        }
    }
    Ok(Some(members))
}

/// Positions before `first` range over `0..newest`, positions after over
/// `0..=newest`, position `first` stays at `newest`.
fn advance_args(args: &mut [usize], first: usize, newest: usize) -> bool {
    for pos in (0..args.len()).rev() {
        if pos == first {
            continue;
        }
        let bound = if pos < first { newest } else { newest + 1 };
        args[pos] += 1;
        if args[pos] < bound {
            return true;
        }
        args[pos] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_tuple_is_visited_once() {
        let mut seen = Vec::new();
        let c = close(
            vec![0u32, 1, 2],
            &[2],
            |_, a| {
                seen.push((*a[0], *a[1]));
                *a[0]
            },
            100,
        )
        .unwrap();
        assert_eq!(c.members, vec![0, 1, 2]);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn additive_closure_mod_7() {
        let c = close(vec![3u32], &[2], |_, a| (a[0] + a[1]) % 7, 100).unwrap();
        let mut m = c.members.clone();
        m.sort();
        assert_eq!(m, (0..7).collect::<Vec<_>>());
        assert!(close(vec![3u32], &[2], |_, a| (a[0] + a[1]) % 7, 3).is_err());
    }

    #[test]
    fn labels_detect_conflicts() {
        // x -> x mod 2 is a homomorphism Z7 -> Z2 only if it respects +, which it does not
        let seeds = vec![(3u32, 1u32)];
        let r = close_labelled(
            seeds.clone(),
            &[2],
            |_, a| (a[0] + a[1]) % 7,
            |_, l| (l[0] + l[1]) % 2,
            100,
        )
        .unwrap();
        assert!(r.is_none());
        // the zero map is a homomorphism
        let r = close_labelled(
            vec![(3u32, 0u32)],
            &[2],
            |_, a| (a[0] + a[1]) % 7,
            |_, l| (l[0] + l[1]) % 2,
            100,
        )
        .unwrap()
        .unwrap();
        assert_eq!(r.len(), 7);
    }

    #[test]
    fn constants_are_added() {
        let c = close(
            Vec::<u32>::new(),
            &[0, 1],
            |op, a| if op == 0 { 5 } else { a[0] + 1 },
            3,
        )
        .unwrap_err();
        assert!(c.is_budget());
    }
}
