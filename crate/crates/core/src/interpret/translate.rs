use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::interpret::{atom_names, eq_names, Interpretation, EQ};
use crate::ppdef::free_names;
use crate::structure::Formula;

/// A pp-formula in prenex form: bound variables and atoms.
struct Prenex {
    bound: Vec<String>,
    atoms: Vec<Formula>,
}

fn flatten(f: &Formula, scope: &BTreeMap<String, String>, used: &mut BTreeSet<String>, out: &mut Prenex) {
    let name = |v: &String| scope.get(v).unwrap_or(v).clone();
    match f {
        Formula::Rel(sym, vars) => out
            .atoms
            .push(Formula::Rel(sym.clone(), vars.iter().map(name).collect())),
        Formula::Eq(a, b) => out.atoms.push(Formula::Eq(name(a), name(b))),
        Formula::And(parts) => parts.iter().for_each(|p| flatten(p, scope, used, out)),
        Formula::Exists(vars, body) => {
            let mut inner = scope.clone();
            for v in vars {
                let mut fresh = v.clone();
                while used.contains(&fresh) {
                    fresh.push('\'');
                }
                used.insert(fresh.clone());
                out.bound.push(fresh.clone());
                inner.insert(v.clone(), fresh);
            }
            flatten(body, &inner, used, out);
        }
    }
}

/// Renames the free variables of `f` by `map` and every bound variable `b`
/// to `b~tag`.
fn instance(f: &Formula, map: &BTreeMap<String, String>, tag: usize) -> Formula {
    match f {
        Formula::Rel(sym, vars) => Formula::Rel(
            sym.clone(),
            vars.iter().map(|v| map.get(v).unwrap_or(v).clone()).collect(),
        ),
        Formula::Eq(a, b) => Formula::Eq(map.get(a).unwrap_or(a).clone(), map.get(b).unwrap_or(b).clone()),
        Formula::And(parts) => Formula::And(parts.iter().map(|p| instance(p, map, tag)).collect()),
        Formula::Exists(vars, body) => {
            let mut inner = map.clone();
            let fresh: Vec<String> = vars.iter().map(|v| format!("{v}~{tag}")).collect();
            for (v, n) in vars.iter().zip(&fresh) {
                inner.insert(v.clone(), n.clone());
            }
            Formula::Exists(fresh, Box::new(instance(body, &inner, tag)))
        }
    }
}

fn coords(v: &str, d: usize) -> Vec<String> {
    (1..=d).map(|c| format!("{v}@{c}")).collect()
}

/// Translates a pp-formula over the target signature into one over the host:
/// each variable `v` becomes `v@1..v@d`, constrained by the domain formula,
/// and each atom is replaced by an instance of its defining formula. Free
/// variable `v` of `phi` becomes the free variables `v@1..v@d`.
///
/// For sentences, `phi` holds in the target iff the translation holds in the
/// host.
pub fn translate_sentence(i: &Interpretation, phi: &Formula) -> Result<Formula> {
    phi.validate()?;
    let d = i.dim;
    let free = phi.free_vars();
    let mut used: BTreeSet<String> = free.iter().cloned().collect();
    let mut p = Prenex {
        bound: Vec::new(),
        atoms: Vec::new(),
    };
    flatten(phi, &BTreeMap::new(), &mut used, &mut p);

    let mut tag = 0;
    let mut parts = Vec::new();
    let mut next = |f: &Formula, map: BTreeMap<String, String>| {
        tag += 1;
        instance(f, &map, tag)
    };
    if i.domain != Formula::truth() {
        for v in free.iter().chain(&p.bound) {
            let map = free_names(d).into_iter().zip(coords(v, d)).collect();
            parts.push(next(&i.domain, map));
        }
    }
    for atom in &p.atoms {
        let (key, args, names) = match atom {
            Formula::Eq(a, b) => (EQ, vec![a.clone(), b.clone()], eq_names(d)),
            Formula::Rel(sym, vars) => (sym.as_str(), vars.clone(), atom_names(vars.len(), d)),
            _ => unreachable!("prenex atoms"),
        };
        let f = i
            .defining
            .get(key)
            .ok_or_else(|| Error::UnknownRelation(key.to_string()))?;
        let actual: Vec<String> = args.iter().flat_map(|a| coords(a, d)).collect();
        parts.push(next(f, names.into_iter().zip(actual).collect()));
    }
    let bound: Vec<String> = p.bound.iter().flat_map(|v| coords(v, d)).collect();
    Ok(Formula::exists(bound, Formula::and(parts)))
}
