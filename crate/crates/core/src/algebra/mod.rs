//! Finite algebras: powers, generated subalgebras, congruences, quotients,
//! membership in the pseudovariety generated by an algebra, and the natural
//! clone homomorphism test.

mod congruence;
mod hsp;
mod term;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use indexmap::IndexMap;

pub use congruence::{congruences, quotient, Congruence, ReplacementWitness};
pub use hsp::{birkhoff_bound, hsp_fin_member, HspCertificate, HspResult};
pub use term::{natural_homomorphism_exists, natural_homomorphism_with_depth, NatHom, Term, DEFAULT_TERM_DEPTH};

use crate::budget::{checked_pow, Budget};
use crate::clone::OperationTable;
use crate::closure::close;
use crate::error::{Error, Result};
use crate::structure::text::{expect_words, is_identifier, lines, parse_usize};
use crate::tuple::{rank, unrank, Tuples};
use crate::Element;

/// A finite algebra on `0..n` with named operations in signature order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSpec {
    name: String,
    domain_size: usize,
    ops: IndexMap<String, OperationTable>,
}

impl AlgebraSpec {
    pub fn new(name: impl Into<String>, domain_size: usize) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::Shape("domain must have at least one element".into()));
        }
        Ok(AlgebraSpec {
            name: name.into(),
            domain_size,
            ops: IndexMap::new(),
        })
    }

    pub fn with_op(mut self, symbol: impl Into<String>, table: OperationTable) -> Result<Self> {
        self.add_op(symbol, table)?;
        Ok(self)
    }

    pub fn add_op(&mut self, symbol: impl Into<String>, table: OperationTable) -> Result<()> {
        let symbol = symbol.into();
        if !is_identifier(&symbol) {
            return Err(Error::Shape(format!("invalid operation symbol `{symbol}`")));
        }
        if table.domain_size() != self.domain_size {
            return Err(Error::Shape(format!(
                "operation `{symbol}` on {} elements, algebra on {}",
                table.domain_size(),
                self.domain_size
            )));
        }
        if self.ops.contains_key(&symbol) {
            return Err(Error::DuplicateSymbol(symbol));
        }
        self.ops.insert(symbol, table);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn ops(&self) -> &IndexMap<String, OperationTable> {
        &self.ops
    }

    pub fn op(&self, symbol: &str) -> Option<&OperationTable> {
        self.ops.get(symbol)
    }

    pub fn signature(&self) -> Vec<(String, usize)> {
        self.ops.iter().map(|(s, t)| (s.clone(), t.arity())).collect()
    }

    pub(crate) fn arities(&self) -> Vec<usize> {
        self.ops.values().map(OperationTable::arity).collect()
    }

    /// Errors unless both algebras interpret the same symbols with the same
    /// arities (order may differ).
    pub fn check_same_signature(&self, other: &AlgebraSpec) -> Result<()> {
        let mut mine = self.signature();
        let mut theirs = other.signature();
        mine.sort();
        theirs.sort();
        if mine != theirs {
            return Err(Error::SignatureMismatch(format!(
                "{} has {:?}, {} has {:?}",
                self.name, mine, other.name, theirs
            )));
        }
        Ok(())
    }

    /// The table of `other`'s operations listed in this algebra's signature
    /// order. Assumes the signatures agree.
    pub(crate) fn aligned<'a>(&self, other: &'a AlgebraSpec) -> Vec<&'a OperationTable> {
        self.ops.keys().map(|s| &other.ops[s]).collect()
    }

    /// Reads an algebra file: `algebra <name>`, `domain <n>`, then sections
    /// `op <SYMBOL> <k>` / `values ...` / `end`.
    pub fn parse(text: &str) -> Result<Self> {
        let ls = lines(text);
        let head = ls.first().ok_or_else(|| Error::parse(1, "empty algebra file"))?;
        if head.words[0] != "algebra" && head.words[0] != "structure" {
            return Err(Error::parse(head.number, "expected `algebra <name>`"));
        }
        expect_words(head, 2, head.words[0])?;
        let dom = ls
            .get(1)
            .ok_or_else(|| Error::parse(head.number, "missing `domain` line"))?;
        if dom.words[0] != "domain" {
            return Err(Error::parse(dom.number, "expected `domain <n>`"));
        }
        expect_words(dom, 2, "domain")?;
        let n = parse_usize(dom, dom.words[1], "domain size")?;
        if n == 0 {
            return Err(Error::parse(dom.number, "domain size must be positive"));
        }
        let mut a = AlgebraSpec::new(head.words[1], n)?;
        let mut pos = 2;
        while let Some(line) = ls.get(pos) {
            if line.words[0] != "op" {
                return Err(Error::parse(
                    line.number,
                    format!("expected `op`, found `{}`", line.words[0]),
                ));
            }
            expect_words(line, 3, "op")?;
            let symbol = line.words[1];
            let arity = parse_usize(line, line.words[2], "arity")?;
            let body = ls
                .get(pos + 1)
                .filter(|l| l.words[0] == "values")
                .ok_or_else(|| Error::parse(line.number, "expected a `values` line"))?;
            let values = body.words[1..]
                .iter()
                .map(|w| parse_usize(body, w, "value"))
                .collect::<Result<Vec<_>>>()?;
            match ls.get(pos + 2) {
                Some(l) if l.words == ["end"] => {}
                Some(l) => return Err(Error::parse(l.number, "expected `end`")),
                None => return Err(Error::parse(body.number, "missing `end`")),
            }
            let table = OperationTable::new(n, arity, values).map_err(|e| match e {
                Error::Shape(reason) => Error::parse(body.number, reason),
                other => other,
            })?;
            a.add_op(symbol, table).map_err(|e| match e {
                Error::DuplicateSymbol(_) | Error::Shape(_) => Error::parse(line.number, e.to_string()),
                other => other,
            })?;
            pos += 3;
        }
        Ok(a)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "algebra {}", self.name);
        let _ = writeln!(out, "domain {}", self.domain_size);
        for (s, t) in &self.ops {
            let _ = writeln!(out, "op {s} {}", t.arity());
            let _ = writeln!(out, "values {t}");
            let _ = writeln!(out, "end");
        }
        out
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `a^n`; element `i` encodes the `n`-tuple `unrank(i)`.
pub fn power(a: &AlgebraSpec, n: usize, budget: &Budget) -> Result<AlgebraSpec> {
    if n == 0 {
        return Err(Error::Shape("power must be positive".into()));
    }
    let size = budget.check_elements("power carrier", checked_pow(a.domain_size, n))?;
    let mut p = AlgebraSpec::new(format!("{}^{n}", a.name), size)?;
    for (s, f) in &a.ops {
        let k = f.arity();
        budget.check_elements("power operation table", checked_pow(size, k))?;
        let table = OperationTable::from_fn(size, k, |args| {
            let decoded: Vec<Vec<Element>> = args.iter().map(|&x| unrank(x, a.domain_size, n)).collect();
            let out: Vec<Element> = (0..n)
                .map(|c| f.apply(&decoded.iter().map(|t| t[c]).collect::<Vec<_>>()))
                .collect();
            rank(&out, a.domain_size)
        });
        p.add_op(s.clone(), table)?;
    }
    Ok(p)
}

/// The least subset containing `gens` closed under every operation.
pub fn subalgebra_generated(a: &AlgebraSpec, gens: &[Element]) -> Result<BTreeSet<Element>> {
    if let Some(&g) = gens.iter().find(|&&g| g >= a.domain_size) {
        return Err(Error::Domain {
            value: g,
            domain_size: a.domain_size,
        });
    }
    let arities = a.arities();
    if gens.is_empty() && !arities.contains(&0) {
        return Err(Error::EmptyGenerators);
    }
    let tables: Vec<&OperationTable> = a.ops.values().collect();
    let c = close(
        gens.to_vec(),
        &arities,
        |op, args| tables[op].apply(&args.iter().map(|&&x| x).collect::<Vec<_>>()),
        usize::MAX,
    )?;
    Ok(c.members.into_iter().collect())
}

/// First point where `map: a -> b` breaks the homomorphism law, as
/// `(symbol, args)`.
pub fn homomorphism_violation(a: &AlgebraSpec, b: &AlgebraSpec, map: &[Element]) -> Option<(String, Vec<Element>)> {
    for (s, f) in &a.ops {
        let g = b.op(s)?;
        for args in Tuples::new(a.domain_size, f.arity()) {
            let mapped: Vec<Element> = args.iter().map(|&x| map[x]).collect();
            if map[f.apply(&args)] != g.apply(&mapped) {
                return Some((s.clone(), args));
            }
        }
    }
    None
}
