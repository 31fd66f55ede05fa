//! Backtracking constraint solver over a finite domain.
//!
//! Variables are branched on in index order and values are tried in
//! ascending order, so solutions come out lexicographically sorted.
//! After every decision the table constraints are revised to generalized arc
//! consistency. The revision queue always picks the pending constraint with
//! the smallest relation first (ties: relation symbol, then insertion order).

use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use rayon::prelude::*;

use crate::{Element, Tuple};

#[derive(Debug, Clone)]
pub enum Constraint {
    /// `(vars[0], ..., vars[k-1])` must be one of `tuples`.
    Table {
        vars: Vec<usize>,
        tuples: Arc<Vec<Tuple>>,
        tag: Arc<str>,
    },
    Eq(usize, usize),
}

impl Constraint {
    fn vars(&self) -> Vec<usize> {
        match self {
            Constraint::Table { vars, .. } => vars.clone(),
            Constraint::Eq(a, b) => vec![*a, *b],
        }
    }

    fn priority(&self) -> (usize, &str) {
        match self {
            Constraint::Table { tuples, tag, .. } => (tuples.len(), tag),
            Constraint::Eq(..) => (0, ""),
        }
    }
}

pub type Solution = Vec<Element>;

/// A constraint network; build it, then call one of the search methods.
#[derive(Debug, Clone)]
pub struct Csp {
    domain_size: usize,
    words: usize,
    initial: Vec<u64>,
    constraints: Vec<Constraint>,
    watch: Vec<Vec<usize>>,
    sorted: bool,
}

impl Csp {
    pub fn new(domain_size: usize, num_vars: usize) -> Self {
        let words = domain_size.div_ceil(64).max(1);
        let mut full = vec![0u64; words];
        for v in 0..domain_size {
            full[v / 64] |= 1 << (v % 64);
        }
        let initial = (0..num_vars).flat_map(|_| full.iter().copied()).collect();
        Csp {
            domain_size,
            words,
            initial,
            constraints: Vec::new(),
            watch: vec![Vec::new(); num_vars],
            sorted: true,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.watch.len()
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn add_table(&mut self, vars: Vec<usize>, tuples: Arc<Vec<Tuple>>, tag: &str) {
        self.push(Constraint::Table {
            vars,
            tuples,
            tag: Arc::from(tag),
        });
    }

    pub fn add_eq(&mut self, a: usize, b: usize) {
        if a != b {
            self.push(Constraint::Eq(a, b));
        }
    }

    fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
        self.sorted = false;
    }

    /// Restricts `var` to the given values before search starts.
    pub fn restrict(&mut self, var: usize, values: impl IntoIterator<Item = Element>) {
        let base = var * self.words;
        let mut mask = vec![0u64; self.words];
        for v in values {
            if v < self.domain_size {
                mask[v / 64] |= 1 << (v % 64);
            }
        }
        for (w, m) in mask.into_iter().enumerate() {
            self.initial[base + w] &= m;
        }
    }

    pub fn fix(&mut self, var: usize, value: Element) {
        self.restrict(var, [value]);
    }

    fn prepare(&mut self) {
        if self.sorted {
            return;
        }
        // stable: equal priorities keep insertion order
        let mut order: Vec<usize> = (0..self.constraints.len()).collect();
        order.sort_by(|&a, &b| self.constraints[a].priority().cmp(&self.constraints[b].priority()));
        let mut sorted = Vec::with_capacity(order.len());
        for i in order {
            sorted.push(self.constraints[i].clone());
        }
        self.constraints = sorted;
        for w in &mut self.watch {
            w.clear();
        }
        for (ci, c) in self.constraints.iter().enumerate() {
            let mut vs = c.vars();
            vs.sort_unstable();
            vs.dedup();
            for v in vs {
                self.watch[v].push(ci);
            }
        }
        self.sorted = true;
    }

    /// First solution in lexicographic order.
    pub fn solve_first(&mut self) -> Option<Solution> {
        let mut out = None;
        self.for_each_solution(|s| {
            out = Some(s.to_vec());
            ControlFlow::Break(())
        });
        out
    }

    pub fn is_satisfiable(&mut self) -> bool {
        self.solve_first().is_some()
    }

    /// Visits solutions in lexicographic order until the callback breaks.
    pub fn for_each_solution(&mut self, mut visit: impl FnMut(&[Element]) -> ControlFlow<()>) {
        self.prepare();
        let search = Search { csp: self };
        let mut doms = self.initial.clone();
        let queue: BTreeSet<usize> = (0..self.constraints.len()).collect();
        if !search.propagate(&mut doms, queue) {
            return;
        }
        let _ = search.branch(doms, &mut |d| visit(&search.values(d)), usize::MAX);
    }

    pub fn all_solutions(&mut self) -> Vec<Solution> {
        let mut out = Vec::new();
        self.for_each_solution(|s| {
            out.push(s.to_vec());
            ControlFlow::Continue(())
        });
        out
    }

    /// All solutions, with the top-level branches explored in parallel.
    /// The output order is the same lexicographic order as
    /// [`Csp::all_solutions`].
    pub fn all_solutions_parallel(&mut self) -> Vec<Solution> {
        self.prepare();
        let search = Search { csp: self };
        let mut doms = self.initial.clone();
        let queue: BTreeSet<usize> = (0..self.constraints.len()).collect();
        if !search.propagate(&mut doms, queue) {
            return Vec::new();
        }
        let Some(var) = search.pick(&doms) else {
            return vec![search.values(&doms)];
        };
        let values: Vec<Element> = search.domain_values(&doms, var).collect();
        let parts: Vec<Vec<Solution>> = values
            .par_iter()
            .map(|&value| {
                let mut out = Vec::new();
                if let Some(next) = search.assign(&doms, var, value) {
                    let _ = search.branch(
                        next,
                        &mut |d| {
                            out.push(search.values(d));
                            ControlFlow::Continue(())
                        },
                        usize::MAX,
                    );
                }
                out
            })
            .collect();
        parts.into_iter().flatten().collect()
    }

    /// Distinct assignments of variables `0..prefix` that extend to a full
    /// solution, in lexicographic order.
    pub fn projected_solutions(&mut self, prefix: usize) -> Vec<Solution> {
        self.prepare();
        let search = Search { csp: self };
        let mut doms = self.initial.clone();
        let queue: BTreeSet<usize> = (0..self.constraints.len()).collect();
        let mut out = Vec::new();
        if !search.propagate(&mut doms, queue) {
            return out;
        }
        let _ = search.branch(
            doms,
            &mut |d| {
                out.push(search.values(d)[..prefix].to_vec());
                ControlFlow::Continue(())
            },
            prefix,
        );
        out
    }
}

struct Search<'a> {
    csp: &'a Csp,
}

impl Search<'_> {
    fn words(&self) -> usize {
        self.csp.words
    }

    fn dom<'d>(&self, doms: &'d [u64], var: usize) -> &'d [u64] {
        &doms[var * self.words()..(var + 1) * self.words()]
    }

    fn has(&self, doms: &[u64], var: usize, value: Element) -> bool {
        doms[var * self.words() + value / 64] & (1 << (value % 64)) != 0
    }

    fn size(&self, doms: &[u64], var: usize) -> u32 {
        self.dom(doms, var).iter().map(|w| w.count_ones()).sum()
    }

    fn domain_values<'d>(&self, doms: &'d [u64], var: usize) -> impl Iterator<Item = Element> + 'd {
        let words = self.words();
        let base = var * words;
        (0..self.csp.domain_size).filter(move |&v| doms[base + v / 64] & (1 << (v % 64)) != 0)
    }

    fn values(&self, doms: &[u64]) -> Vec<Element> {
        (0..self.csp.num_vars())
            .map(|var| {
                self.domain_values(doms, var)
                    .next()
                    .expect("solution has singleton domains")
            })
            .collect()
    }

    fn pick(&self, doms: &[u64]) -> Option<usize> {
        (0..self.csp.num_vars()).find(|&v| self.size(doms, v) > 1)
    }

    fn assign(&self, doms: &[u64], var: usize, value: Element) -> Option<Vec<u64>> {
        let mut next = doms.to_vec();
        let base = var * self.words();
        for w in 0..self.words() {
            next[base + w] = 0;
        }
        next[base + value / 64] = 1 << (value % 64);
        let queue: BTreeSet<usize> = self.csp.watch[var].iter().copied().collect();
        self.propagate(&mut next, queue).then_some(next)
    }

    /// Depth-first search. When `prefix` is finite, the search stops
    /// branching as soon as variables `0..prefix` are fixed and only asks
    /// whether the rest is satisfiable.
    fn branch(
        &self,
        doms: Vec<u64>,
        visit: &mut dyn FnMut(&[u64]) -> ControlFlow<()>,
        prefix: usize,
    ) -> ControlFlow<()> {
        let Some(var) = self.pick(&doms) else {
            return visit(&doms);
        };
        if prefix != usize::MAX && var >= prefix {
            // prefix fixed: one witness is enough
            let mut found = None;
            let _ = self.branch_inner(&doms, var, &mut |d| {
                found = Some(d.to_vec());
                ControlFlow::Break(())
            });
            return match found {
                Some(d) => visit(&d),
                None => ControlFlow::Continue(()),
            };
        }
        let values: Vec<Element> = self.domain_values(&doms, var).collect();
        for value in values {
            if let Some(next) = self.assign(&doms, var, value) {
                self.branch(next, visit, prefix)?;
            }
        }
        ControlFlow::Continue(())
    }

    fn branch_inner(
        &self,
        doms: &[u64],
        var: usize,
        visit: &mut dyn FnMut(&[u64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let values: Vec<Element> = self.domain_values(doms, var).collect();
        for value in values {
            if let Some(next) = self.assign(doms, var, value) {
                match self.pick(&next) {
                    None => visit(&next)?,
                    Some(v) => self.branch_inner(&next, v, visit)?,
                }
            }
        }
        ControlFlow::Continue(())
    }

    fn propagate(&self, doms: &mut [u64], mut queue: BTreeSet<usize>) -> bool {
        while let Some(ci) = queue.pop_first() {
            let changed = match &self.csp.constraints[ci] {
                Constraint::Eq(a, b) => self.revise_eq(doms, *a, *b),
                Constraint::Table { vars, tuples, .. } => self.revise_table(doms, vars, tuples),
            };
            let Some(changed) = changed else {
                return false;
            };
            for var in changed {
                for &other in &self.csp.watch[var] {
                    if other != ci {
                        queue.insert(other);
                    }
                }
            }
        }
        true
    }

    fn revise_eq(&self, doms: &mut [u64], a: usize, b: usize) -> Option<Vec<usize>> {
        let w = self.words();
        let mut changed = Vec::new();
        let mut a_changed = false;
        let mut b_changed = false;
        let mut empty = true;
        for i in 0..w {
            let (x, y) = (doms[a * w + i], doms[b * w + i]);
            let both = x & y;
            a_changed |= both != x;
            b_changed |= both != y;
            empty &= both == 0;
            doms[a * w + i] = both;
            doms[b * w + i] = both;
        }
        if empty {
            return None;
        }
        if a_changed {
            changed.push(a);
        }
        if b_changed {
            changed.push(b);
        }
        Some(changed)
    }

    fn revise_table(&self, doms: &mut [u64], vars: &[usize], tuples: &[Tuple]) -> Option<Vec<usize>> {
        let w = self.words();
        let mut support = vec![0u64; vars.len() * w];
        let mut any = false;
        'tuples: for t in tuples {
            for (p, &var) in vars.iter().enumerate() {
                if !self.has(doms, var, t[p]) {
                    continue 'tuples;
                }
                // repeated variable must take one value
                if let Some(q) = vars[..p].iter().position(|&u| u == var) {
                    if t[q] != t[p] {
                        continue 'tuples;
                    }
                }
            }
            any = true;
            for (p, &value) in t.iter().enumerate() {
                support[p * w + value / 64] |= 1 << (value % 64);
            }
        }
        if !any {
            return None;
        }
        let mut changed = Vec::new();
        for (p, &var) in vars.iter().enumerate() {
            let mut differs = false;
            for i in 0..w {
                let old = doms[var * w + i];
                let new = old & support[p * w + i];
                differs |= new != old;
                doms[var * w + i] = new;
            }
            if differs && !changed.contains(&var) {
                changed.push(var);
            }
        }
        Some(changed)
    }
}
