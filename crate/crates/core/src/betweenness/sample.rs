use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::{all_distinct, betw, scalar_at, BetwViolation, Expr, Scalar};
use crate::error::{Error, Result};
use crate::structure::text::lines;

/// Finitely many observed values of a `k`-ary function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSample<T> {
    arity: usize,
    rows: Vec<(Vec<T>, T)>,
}

impl<T: Scalar> FunctionSample<T> {
    pub fn new(arity: usize) -> Self {
        FunctionSample {
            arity,
            rows: Vec::new(),
        }
    }

    /// Samples `f` at `points`.
    pub fn from_expr(f: &Expr<T>, arity: usize, points: impl IntoIterator<Item = Vec<T>>) -> Result<Self> {
        let mut s = FunctionSample::new(arity);
        for p in points {
            let v = f.eval(&p)?;
            s.push(p, v)?;
        }
        Ok(s)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rows(&self) -> &[(Vec<T>, T)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds a row; repeating a row with the same value is a no-op.
    pub fn push(&mut self, x: Vec<T>, value: T) -> Result<()> {
        if x.len() != self.arity {
            return Err(Error::Shape(format!(
                "row of length {} in a sample of arity {}",
                x.len(),
                self.arity
            )));
        }
        match self.rows.iter().find(|(y, _)| *y == x) {
            Some((_, v)) if *v == value => Ok(()),
            Some((_, v)) => Err(Error::Shape(format!("two values {v} and {value} at the same point"))),
            None => {
                self.rows.push((x, value));
                Ok(())
            }
        }
    }
}

impl<T: Scalar + FromStr> FunctionSample<T> {
    /// `arity k` then rows `q1 ... qk -> q`.
    pub fn parse(text: &str) -> Result<Self> {
        let ls = lines(text);
        let head = ls.first().ok_or_else(|| Error::parse(1, "empty sample"))?;
        let arity = match head.words.as_slice() {
            ["arity", k] => crate::structure::text::parse_usize(head, k, "arity")?,
            _ => return Err(Error::parse(head.number, "expected `arity k`")),
        };
        let mut s = FunctionSample::new(arity);
        for l in &ls[1..] {
            let arrow = l
                .words
                .iter()
                .position(|w| *w == "->")
                .ok_or_else(|| Error::parse(l.number, "expected `q1 ... qk -> q`"))?;
            if arrow != arity || l.words.len() != arity + 2 {
                return Err(Error::parse(
                    l.number,
                    format!("expected {arity} arguments and one value"),
                ));
            }
            let x = l.words[..arrow]
                .iter()
                .map(|w| scalar_at(l.number, w))
                .collect::<Result<Vec<T>>>()?;
            let v = scalar_at(l.number, l.words[arrow + 1])?;
            s.push(x, v).map_err(|e| Error::parse(l.number, e.to_string()))?;
        }
        Ok(s)
    }
}

impl<T: fmt::Display> FunctionSample<T> {
    pub fn to_text(&self) -> String {
        let mut out = format!("arity {}\n", self.arity);
        for (x, v) in &self.rows {
            let xs: Vec<String> = x.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{} -> {v}", xs.join(" "));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolymorphismCheck<T> {
    Consistent,
    Violation(BetwViolation<T>),
}

/// Looks for three rows whose argument columns are Betw triples and whose
/// values are not; the first such ordered triple of rows is returned.
pub fn check_partial_polymorphism<T: Scalar>(fs: &FunctionSample<T>) -> PolymorphismCheck<T> {
    let rows = &fs.rows;
    let n = rows.len();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let (p, q, r) = (&rows[i], &rows[j], &rows[l]);
                if (0..fs.arity).all(|c| betw(&p.0[c], &q.0[c], &r.0[c])) && !betw(&p.1, &q.1, &r.1) {
                    return PolymorphismCheck::Violation(BetwViolation {
                        args: [p.0.clone(), q.0.clone(), r.0.clone()],
                        values: [p.1.clone(), q.1.clone(), r.1.clone()],
                    });
                }
            }
        }
    }
    PolymorphismCheck::Consistent
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }

    /// Direction of a composite: equal directions increase.
    pub fn then(self, other: Direction) -> Direction {
        if self == other {
            Direction::Increasing
        } else {
            Direction::Decreasing
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        })
    }
}

/// A dominant coordinate (1-based) with a direction.
pub type Candidate = (usize, Direction);

/// Rows `x`, `y` with all coordinates distinct and `x_d < y_d`, against
/// which `(d, direction)` fails: `f(x) >= f(y)` for increasing, `f(x) <=
/// f(y)` for decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseWitness<T> {
    pub d: usize,
    pub direction: Direction,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub fx: T,
    pub fy: T,
}

impl<T: Scalar> ClauseWitness<T> {
    pub fn recheck(&self) -> bool {
        let d = self.d - 1;
        all_distinct(&self.x, &self.y)
            && self.x[d] < self.y[d]
            && match self.direction {
                Direction::Increasing => self.fx >= self.fy,
                Direction::Decreasing => self.fx <= self.fy,
            }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification<T> {
    Classified(Candidate),
    /// Several candidates survive; listed in order.
    Ambiguous(Vec<Candidate>),
    /// One witness per candidate `(1, inc), (1, dec), (2, inc), ...`.
    Unclassifiable(Vec<ClauseWitness<T>>),
}

fn all_candidates(k: usize) -> Vec<Candidate> {
    (1..=k)
        .flat_map(|d| [(d, Direction::Increasing), (d, Direction::Decreasing)])
        .collect()
}

/// The first row pair refuting each candidate, or `None` if it survives.
fn refutations<T: Scalar>(fs: &FunctionSample<T>) -> Vec<(Candidate, Option<ClauseWitness<T>>)> {
    let mut out: Vec<(Candidate, Option<ClauseWitness<T>>)> =
        all_candidates(fs.arity).into_iter().map(|c| (c, None)).collect();
    for (x, fx) in &fs.rows {
        for (y, fy) in &fs.rows {
            if !all_distinct(x, y) {
                continue;
            }
            for ((d, dir), slot) in out.iter_mut() {
                if slot.is_some() || x[*d - 1] >= y[*d - 1] {
                    continue;
                }
                let fails = match dir {
                    Direction::Increasing => fx >= fy,
                    Direction::Decreasing => fx <= fy,
                };
                if fails {
                    *slot = Some(ClauseWitness {
                        d: *d,
                        direction: *dir,
                        x: x.clone(),
                        y: y.clone(),
                        fx: fx.clone(),
                        fy: fy.clone(),
                    });
                }
            }
        }
    }
    out
}

/// The candidates `(d, direction)` consistent with every row pair.
pub fn consistent_candidates<T: Scalar>(fs: &FunctionSample<T>) -> Vec<Candidate> {
    refutations(fs)
        .into_iter()
        .filter_map(|(c, w)| w.is_none().then_some(c))
        .collect()
}

/// Finds the dominant coordinate: `(d, increasing)` when `f(x) < f(y)`
/// for all sampled `x, y` with all coordinates distinct and `x_d < y_d`,
/// `(d, decreasing)` when always `f(x) > f(y)`.
pub fn classify<T: Scalar>(fs: &FunctionSample<T>) -> Classification<T> {
    let refs = refutations(fs);
    let alive: Vec<Candidate> = refs.iter().filter(|(_, w)| w.is_none()).map(|(c, _)| *c).collect();
    match alive.len() {
        0 => Classification::Unclassifiable(refs.into_iter().filter_map(|(_, w)| w).collect()),
        1 => Classification::Classified(alive[0]),
        _ => Classification::Ambiguous(alive),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observation<T> {
    Holds,
    /// Pairs with the same sign pattern on which `f` compares differently.
    Counterexample {
        a: Vec<T>,
        a2: Vec<T>,
        b: Vec<T>,
        b2: Vec<T>,
    },
}

/// Searches pairs of row pairs `(a, a')`, `(b, b')` with all coordinates
/// distinct and `a_i < a'_i` iff `b_i < b'_i`, where `f(a) < f(a')` differs
/// from `f(b) < f(b')`. The first in row order is returned.
pub fn check_observation<T: Scalar>(fs: &FunctionSample<T>) -> Observation<T> {
    let pairs: Vec<(usize, usize, Vec<bool>)> = (0..fs.rows.len())
        .flat_map(|i| (0..fs.rows.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| all_distinct(&fs.rows[i].0, &fs.rows[j].0))
        .map(|(i, j)| {
            let pattern = fs.rows[i].0.iter().zip(&fs.rows[j].0).map(|(p, q)| p < q).collect();
            (i, j, pattern)
        })
        .collect();
    let less = |i: usize, j: usize| fs.rows[i].1 < fs.rows[j].1;
    for (i, j, pa) in &pairs {
        for (k, l, pb) in &pairs {
            if pa == pb && less(*i, *j) != less(*k, *l) {
                return Observation::Counterexample {
                    a: fs.rows[*i].0.clone(),
                    a2: fs.rows[*j].0.clone(),
                    b: fs.rows[*k].0.clone(),
                    b2: fs.rows[*l].0.clone(),
                };
            }
        }
    }
    Observation::Holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
            .collect()
    }

    fn sample(f: &str, rows: &[&[i64]]) -> FunctionSample<Rational> {
        let e = Expr::parse(f).unwrap();
        FunctionSample::from_expr(&e, rows[0].len(), ints(rows)).unwrap()
    }

    fn grid(k: usize) -> Vec<Vec<i64>> {
        crate::tuple::Tuples::new(4, k)
            .map(|t| t.iter().map(|&v| v as i64 * 2 - 3).collect())
            .collect()
    }

    fn grid_sample(f: &str, k: usize) -> FunctionSample<Rational> {
        let g = grid(k);
        let refs: Vec<&[i64]> = g.iter().map(Vec::as_slice).collect();
        sample(f, &refs)
    }

    #[test]
    fn projection_is_consistent() {
        assert_eq!(
            check_partial_polymorphism(&grid_sample("x1", 2)),
            PolymorphismCheck::Consistent
        );
    }

    #[test]
    fn min_and_sum_violate() {
        let rows: &[&[i64]] = &[&[0, 2], &[1, 1], &[2, 0]];
        let PolymorphismCheck::Violation(v) = check_partial_polymorphism(&sample("(min x1 x2)", rows)) else {
            panic!()
        };
        assert_eq!(v.args.to_vec(), ints(rows));
        assert_eq!(v.values.to_vec(), ints(&[&[0, 1, 0]]).concat());
        assert!(v.recheck());
        let PolymorphismCheck::Violation(v) = check_partial_polymorphism(&sample("(+ x1 x2)", rows)) else {
            panic!()
        };
        assert_eq!(v.values.to_vec(), ints(&[&[2, 2, 2]]).concat());
    }

    #[test]
    fn classify_projections() {
        assert_eq!(
            classify(&grid_sample("x1", 2)),
            Classification::Classified((1, Direction::Increasing))
        );
        assert_eq!(
            classify(&grid_sample("(- x1)", 2)),
            Classification::Classified((1, Direction::Decreasing))
        );
        assert_eq!(
            classify(&grid_sample("(* 3 x2)", 3)),
            Classification::Classified((2, Direction::Increasing))
        );
    }

    #[test]
    fn classify_sum() {
        let Classification::Unclassifiable(ws) = classify(&sample("(+ x1 x2)", &[&[0, 0], &[1, -1]])) else {
            panic!()
        };
        assert_eq!(ws.len(), 4);
        assert!(ws.iter().all(ClauseWitness::recheck));
        assert_eq!(
            (ws[0].x.clone(), ws[0].y.clone()),
            (ints(&[&[0, 0]])[0].clone(), ints(&[&[1, -1]])[0].clone())
        );
        assert_eq!(ws[2].d, 2);
    }

    #[test]
    fn ambiguous_without_separating_pairs() {
        let s = sample("x1", &[&[0, 0]]);
        assert_eq!(classify(&s), Classification::Ambiguous(all_candidates(2)));
        let s = sample("x1", &[&[0, 0], &[1, 1]]);
        assert_eq!(
            classify(&s),
            Classification::Ambiguous(vec![(1, Direction::Increasing), (2, Direction::Increasing)])
        );
    }

    #[test]
    fn observation() {
        assert_eq!(check_observation(&grid_sample("x2", 2)), Observation::Holds);
        assert_eq!(
            check_observation(&FunctionSample::<Rational>::new(2)),
            Observation::Holds
        );
        let s = sample("(+ x1 x2)", &[&[0, 0], &[1, -1], &[0, 0], &[2, -1]]);
        assert_eq!(s.len(), 3);
        let Observation::Counterexample { a, a2, b, b2 } = check_observation(&s) else {
            panic!()
        };
        let r = ints(&[&[0, 0], &[1, -1], &[2, -1]]);
        assert_eq!((a, a2, b, b2), (r[0].clone(), r[1].clone(), r[0].clone(), r[2].clone()));
    }

    #[test]
    fn text_round_trip() {
        let s = sample("(* 1/2 x1)", &[&[1, 0], &[3, 1]]);
        let text = s.to_text();
        assert_eq!(text, "arity 2\n1 0 -> 1/2\n3 1 -> 3/2\n");
        assert_eq!(FunctionSample::parse(&text).unwrap(), s);
        assert!(FunctionSample::<Rational>::parse("arity 1\n1 -> 2\n1 -> 3\n").is_err());
        assert!(FunctionSample::<Rational>::parse("arity 2\n1 -> 2\n").is_err());
    }
}
