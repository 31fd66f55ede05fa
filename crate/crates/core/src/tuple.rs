//! Lexicographic ranking of tuples over `0..n`, first coordinate most
//! significant. Every table index in the crate uses this convention.

use crate::Element;

pub fn rank(tuple: &[Element], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * n + x)
}

pub fn unrank(mut index: usize, n: usize, len: usize) -> Vec<Element> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

/// Iterates all tuples of `0..n` of length `len` in lexicographic order.
pub struct Tuples {
    n: usize,
    current: Option<Vec<Element>>,
}

impl Tuples {
    pub fn new(n: usize, len: usize) -> Self {
        let current = if n == 0 && len > 0 { None } else { Some(vec![0; len]) };
        Tuples { n, current }
    }
}

impl Iterator for Tuples {
    type Item = Vec<Element>;

    fn next(&mut self) -> Option<Vec<Element>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut pos = next.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < self.n {
                self.current = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some(out)
    }
}

/// Advances `t` to the next tuple over `0..n`; false once it wraps around.
pub fn advance(t: &mut [Element], n: usize) -> bool {
    for slot in t.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}
