use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::sexpr::{self, Sexpr};
use crate::structure::text::is_identifier;

/// A primitive positive formula over a relational signature.
///
/// Text form: `(rel R x y)`, `(= x y)`, `(and f ...)`, `(exists (x ...) f)`.
/// `(and)` (or the bare word `true`) is the empty conjunction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Rel(String, Vec<String>),
    Eq(String, String),
    And(Vec<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn truth() -> Self {
        Formula::And(Vec::new())
    }

    pub fn rel<S: Into<String>>(symbol: &str, vars: impl IntoIterator<Item = S>) -> Self {
        Formula::Rel(symbol.to_string(), vars.into_iter().map(Into::into).collect())
    }

    pub fn eq(x: impl Into<String>, y: impl Into<String>) -> Self {
        Formula::Eq(x.into(), y.into())
    }

    /// Conjunction, flattening nested `And`s one level.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::And(out)
        }
    }

    pub fn exists<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Self {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        self.collect_free(&mut HashMap::new(), &mut seen, &mut out);
        out
    }

    /// `bound` counts the enclosing quantifiers binding each name.
    fn collect_free<'a>(
        &'a self,
        bound: &mut HashMap<&'a str, usize>,
        seen: &mut HashSet<&'a str>,
        out: &mut Vec<String>,
    ) {
        let mut visit = |v: &'a str, bound: &HashMap<&str, usize>| {
            if !bound.contains_key(v) && seen.insert(v) {
                out.push(v.to_string());
            }
        };
        match self {
            Formula::Rel(_, vars) => vars.iter().for_each(|v| visit(v, bound)),
            Formula::Eq(a, b) => {
                visit(a, bound);
                visit(b, bound);
            }
            Formula::And(parts) => parts.iter().for_each(|p| p.collect_free(bound, seen, out)),
            Formula::Exists(vars, body) => {
                for v in vars {
                    *bound.entry(v.as_str()).or_default() += 1;
                }
                body.collect_free(bound, seen, out);
                for v in vars {
                    let count = bound.get_mut(v.as_str()).expect("bound above");
                    *count -= 1;
                    if *count == 0 {
                        bound.remove(v.as_str());
                    }
                }
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of atoms (relational and equality).
    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Rel(..) | Formula::Eq(..) => 1,
            Formula::And(parts) => parts.iter().map(Formula::atom_count).sum(),
            Formula::Exists(_, body) => body.atom_count(),
        }
    }

    /// Syntactic size: atoms plus variable occurrences plus binders.
    pub fn size(&self) -> usize {
        match self {
            Formula::Rel(_, vars) => 1 + vars.len(),
            Formula::Eq(..) => 3,
            Formula::And(parts) => 1 + parts.iter().map(Formula::size).sum::<usize>(),
            Formula::Exists(vars, body) => 1 + vars.len() + body.size(),
        }
    }

    /// Checks that every `Exists` binds distinct variables.
    pub fn validate(&self) -> Result<()> {
        match self {
            Formula::Rel(..) | Formula::Eq(..) => Ok(()),
            Formula::And(parts) => parts.iter().try_for_each(Formula::validate),
            Formula::Exists(vars, body) => {
                let set: BTreeSet<&String> = vars.iter().collect();
                if set.len() != vars.len() {
                    return Err(Error::Shape(format!("repeated bound variable in ({})", vars.join(" "))));
                }
                body.validate()
            }
        }
    }

    /// Renames free variables. Bound variables that would capture a new name
    /// are renamed apart with a `'` suffix.
    pub fn rename_free(&self, map: &BTreeMap<String, String>) -> Formula {
        match self {
            Formula::Rel(sym, vars) => Formula::Rel(
                sym.clone(),
                vars.iter().map(|v| map.get(v).unwrap_or(v).clone()).collect(),
            ),
            Formula::Eq(a, b) => Formula::Eq(map.get(a).unwrap_or(a).clone(), map.get(b).unwrap_or(b).clone()),
            Formula::And(parts) => Formula::And(parts.iter().map(|p| p.rename_free(map)).collect()),
            Formula::Exists(vars, body) => {
                let targets: BTreeSet<&String> = map.values().collect();
                let mut inner = map.clone();
                let mut new_vars = Vec::with_capacity(vars.len());
                for v in vars {
                    inner.remove(v);
                    let mut fresh = v.clone();
                    while targets.contains(&fresh) {
                        fresh.push('\'');
                    }
                    if &fresh != v {
                        inner.insert(v.clone(), fresh.clone());
                    }
                    new_vars.push(fresh);
                }
                Formula::Exists(new_vars, Box::new(body.rename_free(&inner)))
            }
        }
    }

    /// Relation symbols used, in first-occurrence order.
    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit_atoms(&mut |f| {
            if let Formula::Rel(sym, _) = f {
                if !out.contains(sym) {
                    out.push(sym.clone());
                }
            }
        });
        out
    }

    pub(crate) fn visit_atoms(&self, f: &mut impl FnMut(&Formula)) {
        match self {
            Formula::Rel(..) | Formula::Eq(..) => f(self),
            Formula::And(parts) => parts.iter().for_each(|p| p.visit_atoms(f)),
            Formula::Exists(_, body) => body.visit_atoms(f),
        }
    }

    pub fn parse(text: &str) -> Result<Formula> {
        let f = from_sexpr(&sexpr::parse(text)?)?;
        f.validate()?;
        Ok(f)
    }
}

fn variable(e: &Sexpr) -> Result<String> {
    match e.as_atom() {
        Some(v) if is_identifier(v) => Ok(v.to_string()),
        _ => Err(Error::parse(1, format!("expected a variable, found {e:?}"))),
    }
}

fn from_sexpr(e: &Sexpr) -> Result<Formula> {
    let items = match e {
        Sexpr::Atom(a) if a == "true" => return Ok(Formula::truth()),
        Sexpr::Atom(a) => return Err(Error::parse(1, format!("unexpected atom `{a}`"))),
        Sexpr::List(items) => items,
    };
    let head = items
        .first()
        .and_then(Sexpr::as_atom)
        .ok_or_else(|| Error::parse(1, "formula must start with a keyword"))?;
    match head {
        "rel" => {
            let sym = items
                .get(1)
                .and_then(Sexpr::as_atom)
                .filter(|s| is_identifier(s))
                .ok_or_else(|| Error::parse(1, "`rel` needs a relation symbol"))?;
            let vars = items[2..].iter().map(variable).collect::<Result<_>>()?;
            Ok(Formula::Rel(sym.to_string(), vars))
        }
        "=" => {
            if items.len() != 3 {
                return Err(Error::parse(1, "`=` takes two variables"));
            }
            Ok(Formula::Eq(variable(&items[1])?, variable(&items[2])?))
        }
        "and" => Ok(Formula::And(items[1..].iter().map(from_sexpr).collect::<Result<_>>()?)),
        "exists" => {
            if items.len() != 3 {
                return Err(Error::parse(1, "`exists` takes a variable list and a body"));
            }
            let Sexpr::List(vars) = &items[1] else {
                return Err(Error::parse(1, "`exists` needs a parenthesized variable list"));
            };
            let vars = vars.iter().map(variable).collect::<Result<_>>()?;
            Ok(Formula::Exists(vars, Box::new(from_sexpr(&items[2])?)))
        }
        other => Err(Error::parse(1, format!("unknown formula keyword `{other}`"))),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Rel(sym, vars) => {
                write!(f, "(rel {sym}")?;
                for v in vars {
                    write!(f, " {v}")?;
                }
                write!(f, ")")
            }
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::And(parts) => {
                write!(f, "(and")?;
                for p in parts {
                    write!(f, " {p}")?;
                }
                write!(f, ")")
            }
            Formula::Exists(vars, body) => write!(f, "(exists ({}) {body})", vars.join(" ")),
        }
    }
}
