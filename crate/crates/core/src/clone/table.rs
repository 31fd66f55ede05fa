use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::structure::text::{is_identifier, lines, parse_usize};
use crate::tuple::{rank, unrank, Tuples};
use crate::Element;

/// A total `k`-ary operation on `0..n`, stored as the list of its values on
/// all argument tuples in lexicographic order.
///
/// Arity 0 is allowed: such a table holds one value, a constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperationTable {
    domain_size: usize,
    arity: usize,
    values: Vec<Element>,
}

impl OperationTable {
    pub fn new(domain_size: usize, arity: usize, values: Vec<Element>) -> Result<Self> {
        let expected = crate::budget::checked_pow(domain_size, arity)
            .ok_or_else(|| Error::Shape("table size overflows".into()))?;
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "{arity}-ary table on {domain_size} elements needs {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= domain_size) {
            return Err(Error::Domain { value: v, domain_size });
        }
        Ok(OperationTable {
            domain_size,
            arity,
            values,
        })
    }

    pub fn from_fn(domain_size: usize, arity: usize, f: impl Fn(&[Element]) -> Element) -> Self {
        let values = Tuples::new(domain_size, arity).map(|t| f(&t)).collect();
        OperationTable::new(domain_size, arity, values).expect("from_fn produced a bad value")
    }

    pub fn constant(domain_size: usize, arity: usize, value: Element) -> Self {
        OperationTable::from_fn(domain_size, arity, |_| value)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Element] {
        &self.values
    }

    pub fn apply(&self, args: &[Element]) -> Element {
        debug_assert_eq!(args.len(), self.arity);
        self.values[rank(args, self.domain_size)]
    }

    /// `Some(i)` (1-based) when the table equals the projection onto `i`.
    /// On a one-element domain every table is the first projection.
    pub fn as_projection(&self) -> Option<usize> {
        (1..=self.arity).find(|&i| {
            self.values
                .iter()
                .enumerate()
                .all(|(idx, &v)| unrank(idx, self.domain_size, self.arity)[i - 1] == v)
        })
    }

    pub fn is_projection(&self) -> bool {
        self.as_projection().is_some()
    }

    /// `Some(c)` when the operation is constant with value `c`.
    pub fn as_constant(&self) -> Option<Element> {
        let first = *self.values.first()?;
        self.values.iter().all(|&v| v == first).then_some(first)
    }

    /// Reads `op <name> arity <k> domain <n>` followed by a `values` line.
    pub fn parse(text: &str) -> Result<(String, OperationTable)> {
        let ls = lines(text);
        let head = ls.first().ok_or_else(|| Error::parse(1, "empty operation file"))?;
        let w = &head.words;
        if w.len() != 6 || w[0] != "op" || w[2] != "arity" || w[4] != "domain" {
            return Err(Error::parse(head.number, "expected `op <name> arity <k> domain <n>`"));
        }
        if !is_identifier(w[1]) {
            return Err(Error::parse(head.number, format!("bad name `{}`", w[1])));
        }
        let arity = parse_usize(head, w[3], "arity")?;
        let n = parse_usize(head, w[5], "domain size")?;
        let body = ls
            .get(1)
            .ok_or_else(|| Error::parse(head.number, "missing `values` line"))?;
        if body.words[0] != "values" {
            return Err(Error::parse(body.number, "expected `values`"));
        }
        let values = body.words[1..]
            .iter()
            .map(|x| parse_usize(body, x, "value"))
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = ls.get(2) {
            return Err(Error::parse(extra.number, "trailing input"));
        }
        let table = OperationTable::new(n, arity, values).map_err(|e| match e {
            Error::Shape(reason) => Error::parse(body.number, reason),
            other => other,
        })?;
        Ok((w[1].to_string(), table))
    }

    pub fn to_text(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "op {name} arity {} domain {}", self.arity, self.domain_size);
        let _ = writeln!(out, "values {self}");
        out
    }
}

impl fmt::Display for OperationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// The `k`-ary projection onto coordinate `i` (1-based).
pub fn projection(domain_size: usize, arity: usize, i: usize) -> Result<OperationTable> {
    if i == 0 || i > arity {
        return Err(Error::Index { index: i, arity });
    }
    Ok(OperationTable::from_fn(domain_size, arity, |t| t[i - 1]))
}

/// `t -> f(g_1(t), ..., g_m(t))`.
pub fn compose(f: &OperationTable, gs: &[OperationTable]) -> Result<OperationTable> {
    if gs.len() != f.arity {
        return Err(Error::Shape(format!(
            "{}-ary operation composed with {} inner operations",
            f.arity,
            gs.len()
        )));
    }
    if let Some(g) = gs.iter().find(|g| g.domain_size != f.domain_size) {
        return Err(Error::Shape(format!(
            "domain sizes {} and {} differ",
            f.domain_size, g.domain_size
        )));
    }
    let Some(first) = gs.first() else {
        // nullary outer operation: the result is a 0-ary constant
        return Ok(f.clone());
    };
    let l = first.arity;
    if gs.iter().any(|g| g.arity != l) {
        return Err(Error::Shape("inner operations have different arities".into()));
    }
    Ok(compose_unchecked(f, &gs.iter().collect::<Vec<_>>()))
}

pub(crate) fn compose_unchecked(f: &OperationTable, gs: &[&OperationTable]) -> OperationTable {
    let n = f.domain_size;
    let len = gs[0].values.len();
    let mut args = vec![0; gs.len()];
    let values = (0..len)
        .map(|idx| {
            for (slot, g) in args.iter_mut().zip(gs) {
                *slot = g.values[idx];
            }
            f.values[rank(&args, n)]
        })
        .collect();
    OperationTable {
        domain_size: n,
        arity: gs[0].arity,
        values,
    }
}
