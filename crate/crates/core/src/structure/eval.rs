use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::structure::{Csp, FiniteStructure, Formula, Relation};
use crate::{Element, Tuple};

/// Values for the free variables of a formula.
pub type Assignment = BTreeMap<String, Element>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// Witness values for the outermost existential block.
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

/// A formula lowered to a constraint network: the given free variables are
/// CSP variables `0..free.len()`, bound variables follow in binding order.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub csp: Csp,
    pub free: usize,
    /// CSP indices of the outermost existential block.
    pub outer: Vec<(String, usize)>,
}

pub(crate) fn compile(s: &FiniteStructure, f: &Formula, free: &[String]) -> Result<Compiled> {
    f.validate()?;
    let mut names: Vec<String> = free.to_vec();
    let mut scope: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, v) in free.iter().enumerate() {
        scope.entry(v.clone()).or_default().push(i);
    }
    let mut atoms = Vec::new();
    let mut outer = Vec::new();
    lower(f, &mut names, &mut scope, &mut atoms, &mut outer, true)?;

    let mut csp = Csp::new(s.domain_size(), names.len());
    let mut tables: HashMap<&str, Arc<Vec<Tuple>>> = HashMap::new();
    for atom in atoms {
        match atom {
            Lowered::Eq(a, b) => csp.add_eq(a, b),
            Lowered::Rel(sym, vars) => {
                let rel = s.relation(&sym)?;
                if rel.arity() != vars.len() {
                    return Err(Error::ArityMismatch {
                        symbol: sym,
                        expected: rel.arity(),
                        found: vars.len(),
                    });
                }
                let key = s.relations().get_key_value(&sym).unwrap().0.as_str();
                let tuples = tables
                    .entry(key)
                    .or_insert_with(|| Arc::new(rel.iter().cloned().collect()))
                    .clone();
                csp.add_table(vars, tuples, &sym);
            }
        }
    }
    Ok(Compiled {
        csp,
        free: free.len(),
        outer,
    })
}

enum Lowered {
    Rel(String, Vec<usize>),
    Eq(usize, usize),
}

fn lookup(scope: &HashMap<String, Vec<usize>>, v: &str) -> Result<usize> {
    scope
        .get(v)
        .and_then(|s| s.last().copied())
        .ok_or_else(|| Error::UnboundVariable(v.to_string()))
}

fn lower(
    f: &Formula,
    names: &mut Vec<String>,
    scope: &mut HashMap<String, Vec<usize>>,
    atoms: &mut Vec<Lowered>,
    outer: &mut Vec<(String, usize)>,
    top: bool,
) -> Result<()> {
    match f {
        Formula::Rel(sym, vars) => {
            let idx = vars.iter().map(|v| lookup(scope, v)).collect::<Result<Vec<_>>>()?;
            atoms.push(Lowered::Rel(sym.clone(), idx));
        }
        Formula::Eq(a, b) => atoms.push(Lowered::Eq(lookup(scope, a)?, lookup(scope, b)?)),
        Formula::And(parts) => {
            for p in parts {
                lower(p, names, scope, atoms, outer, false)?;
            }
        }
        Formula::Exists(vars, body) => {
            for v in vars {
                let idx = names.len();
                names.push(v.clone());
                scope.entry(v.clone()).or_default().push(idx);
                if top {
                    outer.push((v.clone(), idx));
                }
            }
            lower(body, names, scope, atoms, outer, top)?;
            for v in vars {
                scope.get_mut(v).unwrap().pop();
            }
        }
    }
    Ok(())
}

/// Evaluates `f` in `s` under `a`. Existential quantifiers range over the
/// whole domain.
pub fn eval_formula(s: &FiniteStructure, f: &Formula, a: &Assignment) -> Result<bool> {
    let free = f.free_vars();
    let mut compiled = compile(s, f, &free)?;
    for (i, v) in free.iter().enumerate() {
        let value = *a.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
        if value >= s.domain_size() {
            return Err(Error::Domain {
                value,
                domain_size: s.domain_size(),
            });
        }
        compiled.csp.fix(i, value);
    }
    Ok(compiled.csp.is_satisfiable())
}

/// Decides a pp-sentence. The witness is the lexicographically first
/// satisfying assignment of the outermost existential block.
pub fn solve_pp_sentence(s: &FiniteStructure, f: &Formula) -> Result<SolveResult> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(Error::UnboundVariable(v));
    }
    let mut compiled = compile(s, f, &[])?;
    Ok(match compiled.csp.solve_first() {
        Some(values) => SolveResult::Sat(
            compiled
                .outer
                .iter()
                .map(|(name, idx)| (name.clone(), values[*idx]))
                .collect(),
        ),
        None => SolveResult::Unsat,
    })
}

/// The relation `{ (a_1..a_k) : s |= f(a_1..a_k) }` over the listed free
/// variables (which may include variables absent from `f`).
pub fn defined_relation(s: &FiniteStructure, f: &Formula, free: &[String]) -> Result<Relation> {
    let mut compiled = compile(s, f, free)?;
    let tuples = compiled.csp.projected_solutions(compiled.free);
    Relation::new(free.len(), tuples)
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn assign(pairs: &[(&str, usize)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn oit_atom() {
        let f = Formula::parse("(rel OIT x y z)").unwrap();
        assert!(eval_formula(&oit(), &f, &assign(&[("x", 0), ("y", 0), ("z", 1)])).unwrap());
        assert!(!eval_formula(&oit(), &f, &assign(&[("x", 1), ("y", 1), ("z", 0)])).unwrap());
    }

    #[test]
    fn existential_over_oit() {
        // z = 1 is the only completion of OIT(0, 0, z); nothing completes OIT(1, 1, z)
        let f = Formula::parse("(exists (z) (rel OIT x x z))").unwrap();
        assert!(eval_formula(&oit(), &f, &assign(&[("x", 0)])).unwrap());
        assert!(!eval_formula(&oit(), &f, &assign(&[("x", 1)])).unwrap());
    }

    #[test]
    fn equality_is_reflexive() {
        let f = Formula::eq("x", "y");
        assert!(eval_formula(&oit(), &f, &assign(&[("x", 0), ("y", 0)])).unwrap());
    }

    #[test]
    fn structural_errors() {
        let s = oit();
        let a = assign(&[("x", 0), ("y", 0)]);
        assert!(matches!(
            eval_formula(&s, &Formula::parse("(rel OIT x y)").unwrap(), &a),
            Err(Error::ArityMismatch {
                expected: 3,
                found: 2,
                ..
            })
        ));
        assert_eq!(
            eval_formula(&s, &Formula::parse("(rel E x y)").unwrap(), &a),
            Err(Error::UnknownRelation("E".into()))
        );
        assert_eq!(
            eval_formula(&s, &Formula::parse("(= x w)").unwrap(), &a),
            Err(Error::UnboundVariable("w".into()))
        );
        assert!(matches!(
            eval_formula(&s, &Formula::eq("x", "y"), &assign(&[("x", 5), ("y", 0)])),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn triangle_sentence_has_ordered_witness() {
        let f = Formula::parse("(exists (x y z) (and (rel N x y) (rel N y z) (rel N x z)))").unwrap();
        assert_eq!(
            solve_pp_sentence(&neq3(), &f).unwrap(),
            SolveResult::Sat(assign(&[("x", 0), ("y", 1), ("z", 2)]))
        );
    }

    #[test]
    fn k4_sentence_is_unsat() {
        let f = Formula::parse(
            "(exists (a b c d) (and (rel N a b) (rel N a c) (rel N a d) (rel N b c) (rel N b d) (rel N c d)))",
        )
        .unwrap();
        // brute force over the 81 assignments
        let brute = Tuples::new(3, 4).any(|t| (0..4).all(|i| (i + 1..4).all(|j| t[i] != t[j])));
        assert!(!brute);
        assert_eq!(solve_pp_sentence(&neq3(), &f).unwrap(), SolveResult::Unsat);
    }

    #[test]
    fn empty_conjunction_is_sat() {
        assert_eq!(
            solve_pp_sentence(&oit(), &Formula::truth()).unwrap(),
            SolveResult::Sat(Assignment::new())
        );
    }

    #[test]
    fn shadowing_is_scoped() {
        // inner x is a different variable from the outer one
        let f = Formula::parse("(exists (x) (and (rel N x x) ))").unwrap();
        assert_eq!(solve_pp_sentence(&neq3(), &f).unwrap(), SolveResult::Unsat);
        let g = Formula::parse("(exists (x) (and (exists (x) (= x x)) (rel N x y)))").unwrap();
        let rel = defined_relation(&neq3(), &g, &["y".to_string()]).unwrap();
        assert_eq!(rel.len(), 3);
    }

    #[test]
    fn defined_relation_of_existential() {
        let f = Formula::parse("(exists (z) (rel OIT x y z))").unwrap();
        let rel = defined_relation(&oit(), &f, &["x".into(), "y".into()]).unwrap();
        let expected: Vec<Tuple> = vec![vec![0, 0], vec![0, 1], vec![1, 0]];
        assert_eq!(rel.iter().cloned().collect::<Vec<_>>(), expected);
    }
}
