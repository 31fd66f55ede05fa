use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::structure::text::{expect_words, is_identifier, lines};

/// A Betweenness instance: `Betw(a, b, c)` constraints over named variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BetwInstance {
    vars: Vec<String>,
    constraints: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BetwSolution {
    /// Variable indices from smallest to largest.
    Sat(Vec<usize>),
    Unsat,
}

impl BetwSolution {
    pub fn is_sat(&self) -> bool {
        matches!(self, BetwSolution::Sat(_))
    }
}

impl BetwInstance {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Result<Self> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::Shape(format!("`{v}` is not a variable name")));
            }
            if vars[..i].contains(v) {
                return Err(Error::DuplicateSymbol(v.clone()));
            }
        }
        Ok(BetwInstance {
            vars,
            constraints: Vec::new(),
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn constraints(&self) -> &[[usize; 3]] {
        &self.constraints
    }

    fn index(&self, v: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|w| w == v)
            .ok_or_else(|| Error::UndeclaredVariable(v.to_string()))
    }

    pub fn betw(&mut self, a: &str, b: &str, c: &str) -> Result<()> {
        let t = [self.index(a)?, self.index(b)?, self.index(c)?];
        self.constraints.push(t);
        Ok(())
    }

    pub fn with(mut self, a: &str, b: &str, c: &str) -> Result<Self> {
        self.betw(a, b, c)?;
        Ok(self)
    }

    /// Adds a constraint by variable indices.
    pub fn push(&mut self, t: [usize; 3]) -> Result<()> {
        if let Some(&v) = t.iter().find(|&&v| v >= self.vars.len()) {
            return Err(Error::UndeclaredVariable(format!("#{v}")));
        }
        self.constraints.push(t);
        Ok(())
    }

    /// Does the order (smallest first) satisfy every constraint?
    pub fn satisfied_by(&self, order: &[usize]) -> bool {
        let n = self.vars.len();
        if order.len() != n {
            return false;
        }
        let mut pos = vec![usize::MAX; n];
        for (p, &v) in order.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return false;
            }
            pos[v] = p;
        }
        self.constraints
            .iter()
            .all(|&[a, b, c]| super::betw(&pos[a], &pos[b], &pos[c]))
    }

    pub fn names(&self, order: &[usize]) -> Vec<&str> {
        order.iter().map(|&v| self.vars[v].as_str()).collect()
    }

    /// `vars a b c` then `betw a b c` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let ls = lines(text);
        let head = ls.first().ok_or_else(|| Error::parse(1, "empty instance"))?;
        if head.words[0] != "vars" {
            return Err(Error::parse(head.number, "expected `vars ...`"));
        }
        let mut inst =
            BetwInstance::new(head.words[1..].iter().copied()).map_err(|e| Error::parse(head.number, e.to_string()))?;
        for l in &ls[1..] {
            expect_words(l, 4, "betw")?;
            inst.betw(l.words[1], l.words[2], l.words[3])?;
        }
        Ok(inst)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("vars {}\n", self.vars.join(" "));
        for &[a, b, c] in &self.constraints {
            let _ = writeln!(out, "betw {} {} {}", self.vars[a], self.vars[b], self.vars[c]);
        }
        out
    }
}

/// Can the prefix still be extended to satisfy `Betw(a, b, c)`?
fn feasible(&[a, b, c]: &[usize; 3], pos: &[Option<usize>]) -> bool {
    match (pos[a], pos[b], pos[c]) {
        (Some(x), Some(y), Some(z)) => super::betw(&x, &y, &z),
        (Some(x), Some(y), None) | (None, Some(y), Some(x)) => x < y,
        (None, Some(_), None) => false,
        (Some(_), None, Some(_)) => false,
        _ => true,
    }
}

/// Builds the order left to right, pruning on constraints that can no
/// longer be met. The first solution in lexicographic order of the variable
/// sequence is returned.
pub fn solve_betweenness(inst: &BetwInstance) -> BetwSolution {
    let n = inst.vars.len();
    if inst.constraints.iter().any(|&[a, b, c]| a == b || b == c || a == c) {
        return BetwSolution::Unsat;
    }
    if n == 0 {
        return BetwSolution::Sat(Vec::new());
    }
    let mut touching = vec![Vec::new(); n];
    for (i, t) in inst.constraints.iter().enumerate() {
        for &v in t {
            touching[v].push(i);
        }
    }
    let found = (0..n).into_par_iter().find_map_first(|first| {
        let mut pos = vec![None; n];
        let mut order = Vec::with_capacity(n);
        pos[first] = Some(0);
        order.push(first);
        if !touching[first].iter().all(|&i| feasible(&inst.constraints[i], &pos)) {
            return None;
        }
        extend(inst, &touching, &mut pos, &mut order).then_some(order)
    });
    match found {
        Some(order) => BetwSolution::Sat(order),
        None => BetwSolution::Unsat,
    }
}

fn extend(inst: &BetwInstance, touching: &[Vec<usize>], pos: &mut [Option<usize>], order: &mut Vec<usize>) -> bool {
    let n = pos.len();
    if order.len() == n {
        return true;
    }
    for v in 0..n {
        if pos[v].is_some() {
            continue;
        }
        pos[v] = Some(order.len());
        order.push(v);
        if touching[v].iter().all(|&i| feasible(&inst.constraints[i], pos)) && extend(inst, touching, pos, order) {
            return true;
        }
        order.pop();
        pos[v] = None;
    }
    false
}

/// Tries every permutation; the reference the solver is tested against.
pub fn brute_force_betweenness(inst: &BetwInstance) -> BetwSolution {
    let n = inst.vars.len();
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        if inst.satisfied_by(&order) {
            return BetwSolution::Sat(order);
        }
        // next permutation in lexicographic order
        let Some(i) = (1..n).rev().find(|&i| order[i - 1] < order[i]) else {
            return BetwSolution::Unsat;
        };
        let j = (i..n).rev().find(|&j| order[j] > order[i - 1]).unwrap();
        order.swap(i - 1, j);
        order[i..].reverse();
    }
}
