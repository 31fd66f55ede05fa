//! Finite relational structures, primitive positive formulas and the
//! backtracking solver that decides pp-sentences over them.

mod csp;
mod eval;
mod formula;
pub(crate) mod text;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::tuple::Tuples;
use crate::{Element, Tuple};

pub use csp::{Constraint, Csp, Solution};
pub use eval::{defined_relation, eval_formula, solve_pp_sentence, Assignment, SolveResult};
pub use formula::Formula;

use text::{expect_words, is_identifier, lines, parse_usize, tuple_block};

/// A finitary relation over `0..n`, stored as a sorted tuple set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Tuple>,
}

impl Relation {
    pub fn new(arity: usize, tuples: impl IntoIterator<Item = Tuple>) -> Result<Self> {
        let tuples: BTreeSet<Tuple> = tuples.into_iter().collect();
        if let Some(bad) = tuples.iter().find(|t| t.len() != arity) {
            return Err(Error::Shape(format!("tuple {bad:?} does not have arity {arity}")));
        }
        Ok(Relation { arity, tuples })
    }

    pub fn empty(arity: usize) -> Self {
        Relation {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    /// The binary equality relation on `0..n`.
    pub fn equality(n: usize) -> Self {
        Relation {
            arity: 2,
            tuples: (0..n).map(|a| vec![a, a]).collect(),
        }
    }

    pub fn full(n: usize, arity: usize) -> Self {
        Relation {
            arity,
            tuples: Tuples::new(n, arity).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Element]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter()
    }

    pub fn max_element(&self) -> Option<Element> {
        self.tuples.iter().flatten().copied().max()
    }

    pub(crate) fn check_domain(&self, n: usize) -> Result<()> {
        match self.max_element() {
            Some(v) if v >= n => Err(Error::Domain {
                value: v,
                domain_size: n,
            }),
            _ => Ok(()),
        }
    }

    /// Reads a headerless `relation <SYMBOL> <arity>` block. The domain size
    /// comes from the structure the relation is meant for.
    pub fn parse(text: &str, domain_size: usize) -> Result<(String, Relation)> {
        let lines = lines(text);
        let Some(head) = lines.first() else {
            return Err(Error::parse(1, "empty relation file"));
        };
        if head.words[0] != "relation" {
            return Err(Error::parse(head.number, "expected `relation`"));
        }
        let (symbol, arity) = relation_header(head)?;
        let (tuples, next) = tuple_block(&lines, 1, arity, domain_size, head.number)?;
        if let Some(extra) = lines.get(next) {
            return Err(Error::parse(extra.number, "trailing input after `end`"));
        }
        Ok((symbol, Relation::new(arity, tuples)?))
    }

    pub fn to_text(&self, symbol: &str) -> String {
        let mut out = String::new();
        write_relation(&mut out, symbol, self);
        out
    }
}

/// A finite relational structure with domain `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    name: String,
    domain_size: usize,
    relations: IndexMap<String, Relation>,
}

impl FiniteStructure {
    pub fn new(name: impl Into<String>, domain_size: usize) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::Shape("domain must have at least one element".into()));
        }
        Ok(FiniteStructure {
            name: name.into(),
            domain_size,
            relations: IndexMap::new(),
        })
    }

    pub fn with_relation(
        mut self,
        symbol: impl Into<String>,
        arity: usize,
        tuples: impl IntoIterator<Item = Tuple>,
    ) -> Result<Self> {
        self.add_relation(symbol, Relation::new(arity, tuples)?)?;
        Ok(self)
    }

    pub fn add_relation(&mut self, symbol: impl Into<String>, relation: Relation) -> Result<()> {
        let symbol = symbol.into();
        if !is_identifier(&symbol) || symbol == "=" {
            return Err(Error::Shape(format!("invalid relation symbol `{symbol}`")));
        }
        if relation.arity == 0 {
            return Err(Error::Shape(format!("relation `{symbol}` has arity 0")));
        }
        relation.check_domain(self.domain_size)?;
        if self.relations.contains_key(&symbol) {
            return Err(Error::DuplicateSymbol(symbol));
        }
        self.relations.insert(symbol, relation);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn relations(&self) -> &IndexMap<String, Relation> {
        &self.relations
    }

    pub fn relation(&self, symbol: &str) -> Result<&Relation> {
        self.relations
            .get(symbol)
            .ok_or_else(|| Error::UnknownRelation(symbol.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let lines = lines(text);
        let mut pos = 0;
        let name = match lines.first() {
            Some(l) if l.words[0] == "structure" => {
                expect_words(l, 2, "structure")?;
                pos += 1;
                l.words[1].to_string()
            }
            Some(l) => return Err(Error::parse(l.number, "expected `structure <name>`")),
            None => return Err(Error::parse(1, "empty structure file")),
        };
        let domain_size = match lines.get(pos) {
            Some(l) if l.words[0] == "domain" => {
                expect_words(l, 2, "domain")?;
                pos += 1;
                let n = parse_usize(l, l.words[1], "domain size")?;
                if n == 0 {
                    return Err(Error::parse(l.number, "domain size must be positive"));
                }
                n
            }
            Some(l) => return Err(Error::parse(l.number, "expected `domain <n>`")),
            None => return Err(Error::parse(1, "missing `domain` line")),
        };
        let mut s = FiniteStructure::new(name, domain_size)?;
        while let Some(line) = lines.get(pos) {
            if line.words[0] != "relation" {
                return Err(Error::parse(
                    line.number,
                    format!("expected `relation`, found `{}`", line.words[0]),
                ));
            }
            let (symbol, arity) = relation_header(line)?;
            let (tuples, next) = tuple_block(&lines, pos + 1, arity, domain_size, line.number)?;
            pos = next;
            s.add_relation(symbol, Relation::new(arity, tuples)?)
                .map_err(|e| match e {
                    Error::DuplicateSymbol(sym) => Error::parse(line.number, format!("duplicate relation `{sym}`")),
                    other => other,
                })?;
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "structure {}", self.name);
        let _ = writeln!(out, "domain {}", self.domain_size);
        for (symbol, rel) in &self.relations {
            write_relation(&mut out, symbol, rel);
        }
        out
    }
}

impl fmt::Display for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn relation_header(line: &text::Line<'_>) -> Result<(String, usize)> {
    expect_words(line, 3, "relation")?;
    let symbol = line.words[1];
    if !is_identifier(symbol) || symbol == "=" {
        return Err(Error::parse(line.number, format!("bad symbol `{symbol}`")));
    }
    let arity = parse_usize(line, line.words[2], "arity")?;
    if arity == 0 {
        return Err(Error::parse(line.number, "arity must be positive"));
    }
    Ok((symbol.to_string(), arity))
}

fn write_relation(out: &mut String, symbol: &str, rel: &Relation) {
    let _ = writeln!(out, "relation {symbol} {}", rel.arity);
    for t in &rel.tuples {
        let row: Vec<String> = t.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let _ = writeln!(out, "end");
}
