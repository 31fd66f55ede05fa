use std::fmt;

use crate::algebra::AlgebraSpec;
use crate::budget::Budget;
use crate::clone::OperationTable;
use crate::error::{Error, Result};
use crate::tuple::Tuples;
use crate::Element;

/// A partition of `0..n`, blocks sorted by least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    /// `class[x]` is the index of the block containing `x`.
    class: Vec<usize>,
}

impl Congruence {
    /// Builds the partition whose blocks are the level sets of `labels`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut seen: Vec<(usize, usize)> = Vec::new();
        let class = labels
            .iter()
            .map(|l| match seen.iter().find(|(x, _)| x == l) {
                Some(&(_, c)) => c,
                None => {
                    seen.push((*l, seen.len()));
                    seen.len() - 1
                }
            })
            .collect();
        Congruence { class }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<Element>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::Shape("empty block".into()));
            }
            for &x in b {
                if x >= n {
                    return Err(Error::Domain {
                        value: x,
                        domain_size: n,
                    });
                }
                if labels[x] != usize::MAX {
                    return Err(Error::Shape(format!("{x} lies in two blocks")));
                }
                labels[x] = i;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Shape(format!("{x} lies in no block")));
        }
        Ok(Congruence::from_labels(&labels))
    }

    pub fn equality(n: usize) -> Self {
        Congruence {
            class: (0..n).collect(),
        }
    }

    pub fn total(n: usize) -> Self {
        Congruence { class: vec![0; n] }
    }

    pub fn domain_size(&self) -> usize {
        self.class.len()
    }

    pub fn class_of(&self, x: Element) -> usize {
        self.class[x]
    }

    /// The canonical projection onto blocks.
    pub fn classes(&self) -> &[usize] {
        &self.class
    }

    pub fn related(&self, x: Element, y: Element) -> bool {
        self.class[x] == self.class[y]
    }

    pub fn block_count(&self) -> usize {
        self.class.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<Element>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (x, &c) in self.class.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// First replacement that moves an operation's value to another block.
    pub fn violation(&self, a: &AlgebraSpec) -> Option<ReplacementWitness> {
        a.ops().iter().find_map(|(s, f)| self.violation_of(s, f))
    }

    pub(crate) fn violation_of(&self, symbol: &str, f: &OperationTable) -> Option<ReplacementWitness> {
        let n = self.class.len();
        let reps: Vec<Element> = self.blocks().iter().map(|b| b[0]).collect();
        for args in Tuples::new(n, f.arity()) {
            let value = f.apply(&args);
            for pos in 0..args.len() {
                let rep = reps[self.class[args[pos]]];
                if rep == args[pos] {
                    continue;
                }
                let mut other = args.clone();
                other[pos] = rep;
                let other_value = f.apply(&other);
                if !self.related(value, other_value) {
                    return Some(ReplacementWitness {
                        symbol: symbol.to_string(),
                        args,
                        position: pos,
                        replacement: rep,
                        value,
                        replaced_value: other_value,
                    });
                }
            }
        }
        None
    }

    pub fn is_congruence_of(&self, a: &AlgebraSpec) -> bool {
        self.class.len() == a.domain_size() && self.violation(a).is_none()
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| b.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "{{{}}}", blocks.join(" | "))
    }
}

/// Replacing `args[position]` by the related `replacement` changes the
/// value of `symbol` from `value` to the unrelated `replaced_value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementWitness {
    pub symbol: String,
    pub args: Vec<Element>,
    pub position: usize,
    pub replacement: Element,
    pub value: Element,
    pub replaced_value: Element,
}

impl fmt::Display for ReplacementWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{:?} = {} but replacing argument {} by {} gives {}",
            self.symbol,
            self.args,
            self.value,
            self.position + 1,
            self.replacement,
            self.replaced_value
        )
    }
}

fn bell(n: usize) -> Option<u64> {
    // Bell triangle
    let mut row: Vec<u64> = vec![1];
    for _ in 1..n.max(1) {
        let mut next = vec![*row.last()?];
        for &x in &row {
            next.push(next.last()?.checked_add(x)?);
        }
        row = next;
    }
    Some(if n == 0 { 1 } else { *row.last()? })
}

/// All congruences, fewest blocks first, then lexicographic by class vector.
pub fn congruences(a: &AlgebraSpec, budget: &Budget) -> Result<Vec<Congruence>> {
    let n = a.domain_size();
    budget.check_search("partitions", bell(n))?;
    let mut out = Vec::new();
    // restricted growth strings
    let mut rgs = vec![0usize; n];
    let mut max_prefix = vec![0usize; n];
    loop {
        let c = Congruence { class: rgs.clone() };
        if c.violation(a).is_none() {
            out.push(c);
        }
        // advance
        let mut pos = n;
        loop {
            if pos <= 1 {
                out.sort_by(|x, y| x.block_count().cmp(&y.block_count()).then_with(|| x.cmp(y)));
                return Ok(out);
            }
            pos -= 1;
            if rgs[pos] <= max_prefix[pos - 1] {
                rgs[pos] += 1;
                let m = max_prefix[pos - 1].max(rgs[pos]);
                max_prefix[pos] = m;
                for i in pos + 1..n {
                    rgs[i] = 0;
                    max_prefix[i] = m;
                }
                break;
            }
        }
    }
}

/// `a / c` together with the canonical projection `x -> block of x`.
pub fn quotient(a: &AlgebraSpec, c: &Congruence) -> Result<(AlgebraSpec, Vec<Element>)> {
    if c.domain_size() != a.domain_size() {
        return Err(Error::Shape(format!(
            "partition of {} elements, algebra on {}",
            c.domain_size(),
            a.domain_size()
        )));
    }
    if let Some(w) = c.violation(a) {
        return Err(Error::NotACongruence(w.to_string()));
    }
    let blocks = c.blocks();
    let m = blocks.len();
    let mut q = AlgebraSpec::new(format!("{}/~", a.name()), m)?;
    for (s, f) in a.ops() {
        let table = OperationTable::from_fn(m, f.arity(), |bs| {
            let reps: Vec<Element> = bs.iter().map(|&b| blocks[b][0]).collect();
            c.class_of(f.apply(&reps))
        });
        q.add_op(s.clone(), table)?;
    }
    Ok((q, c.classes().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::homomorphism_violation;
    use crate::algebra::tests::{and, binary, trivial};

    #[test]
    fn bell_numbers() {
        let v: Vec<u64> = (0..8).map(|n| bell(n).unwrap()).collect();
        assert_eq!(v, vec![1, 1, 2, 5, 15, 52, 203, 877]);
    }

    #[test]
    fn and_has_both_partitions() {
        let cs = congruences(&and(), &Budget::default()).unwrap();
        assert_eq!(cs, vec![Congruence::total(2), Congruence::equality(2)]);
    }

    #[test]
    fn constant_op_admits_everything() {
        let a = AlgebraSpec::new("c", 3)
            .unwrap()
            .with_op("c", OperationTable::constant(3, 1, 0))
            .unwrap();
        let cs = congruences(&a, &Budget::default()).unwrap();
        assert_eq!(cs.len(), 5);
        assert_eq!(cs[0], Congruence::total(3));
        assert_eq!(cs[4], Congruence::equality(3));
    }

    #[test]
    fn enumerates_all_partitions() {
        // the unique operation on a set with no structure: a projection
        for n in 1..=6 {
            let a = AlgebraSpec::new("p", n)
                .unwrap()
                .with_op("p", OperationTable::from_fn(n, 1, |t| t[0]))
                .unwrap();
            let cs = congruences(&a, &Budget::default()).unwrap();
            assert_eq!(cs.len() as u64, bell(n).unwrap());
        }
    }

    #[test]
    fn one_element_algebra() {
        assert_eq!(congruences(&trivial(), &Budget::default()).unwrap().len(), 1);
    }

    #[test]
    fn z4_congruences() {
        // subgroups of Z4: 0, {0,2}, Z4
        let z4 = binary("z4", 4, |x, y| (x + y) % 4);
        let cs = congruences(&z4, &Budget::default()).unwrap();
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[1].blocks(), vec![vec![0, 2], vec![1, 3]]);
        let bad = Congruence::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let w = bad.violation(&z4).unwrap();
        assert!(!bad.related(w.value, w.replaced_value));
        assert!(matches!(quotient(&z4, &bad), Err(Error::NotACongruence(_))));
    }

    #[test]
    fn quotients_are_homomorphic_images() {
        let z4 = binary("z4", 4, |x, y| (x + y) % 4);
        for c in congruences(&z4, &Budget::default()).unwrap() {
            let (q, proj) = quotient(&z4, &c).unwrap();
            assert_eq!(q.domain_size(), c.block_count());
            assert!(homomorphism_violation(&z4, &q, &proj).is_none());
            let mut image = proj.clone();
            image.sort();
            image.dedup();
            assert_eq!(image.len(), q.domain_size());
        }
        let (q, _) = quotient(&and(), &Congruence::total(2)).unwrap();
        assert_eq!(q.domain_size(), 1);
        assert_eq!(q.op("f").unwrap().values(), &[0]);
        let (q, _) = quotient(&and(), &Congruence::equality(2)).unwrap();
        assert_eq!(q.op("f").unwrap(), and().op("f").unwrap());
    }

    #[test]
    fn block_validation() {
        assert!(Congruence::from_blocks(3, &[vec![0, 1]]).is_err());
        assert!(Congruence::from_blocks(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert_eq!(
            Congruence::from_blocks(3, &[vec![2], vec![1, 0]]).unwrap().blocks(),
            vec![vec![0, 1], vec![2]]
        );
    }
}
