use std::fmt;

use super::{all_distinct, betw, scalar, BetwViolation, Expr, Scalar};
use crate::error::{Error, Result};
use crate::tuple::Tuples;

/// `x`, `y` with all coordinates distinct and `x_d < y_d` where the oriented
/// function does not increase.
pub type WitnessPair<T> = (Vec<T>, Vec<T>);

/// One step `c^j -> c^{j+1}` of the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FalsifierStep<T> {
    /// The coordinate (1-based) whose clause the witness refutes.
    pub d: usize,
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// The probe with the sign pattern of `(x, y)` relative to `c^j`.
    pub t: Vec<T>,
    pub next: Vec<T>,
}

/// The comparison points used to turn a failure of the sign-pattern
/// observation into a Betw violation: `g(a) < g(a2)`, `g(b) >= g(b2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationUse<T> {
    pub a: Vec<T>,
    pub a2: Vec<T>,
    pub b: Vec<T>,
    pub b2: Vec<T>,
    pub low: Vec<T>,
    pub high: Vec<T>,
}

/// Where the construction met a contradiction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    /// `g(c^j) < g(t)` although `g(x) >= g(y)` has the same sign pattern.
    Probe(usize),
    /// `g(c^j) < g(c^{j+1})` although `g(c^j) >= g(t)`.
    Move(usize),
    /// `g(c^0) >= g(c^k)` with every coordinate increased, against
    /// `g(0, ..., 0) < g(1, ..., 1)`.
    Chain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FalsifierTrace<T> {
    /// `f(0, ..., 0) < f(1, ..., 1)`; otherwise the construction runs on `-f`.
    pub increasing: bool,
    /// `c^0, c^1, ...` as far as the construction got.
    pub chain: Vec<Vec<T>>,
    pub steps: Vec<FalsifierStep<T>>,
    pub conclusion: Conclusion,
    pub observation: ObservationUse<T>,
    pub violation: BetwViolation<T>,
}

impl<T: Scalar> FalsifierTrace<T> {
    /// Re-checks the stepping inequalities and certifies the violation by
    /// re-evaluating `f`.
    pub fn verify(&self, f: &Expr<T>) -> Result<bool> {
        let k = self.chain[0].len();
        let steps_ok = self
            .steps
            .iter()
            .zip(&self.chain)
            .zip(&self.chain[1..])
            .all(|((s, c), n)| {
                *n == s.next
                    && (0..k).all(|i| {
                        let up = s.t[i] > c[i];
                        (up == (s.x[i] < s.y[i]))
                            && n[i]
                                == if up {
                                    c[i].clone() + scalar(k as i64)
                                } else {
                                    c[i].clone() - T::one()
                                }
                    })
            });
        let chain_ok = self.conclusion != Conclusion::Chain
            || (self.chain.len() == k + 1 && (0..k).all(|i| self.chain[0][i] < self.chain[k][i]));
        Ok(steps_ok && chain_ok && self.violation.recheck() && self.violation.certify(f)?)
    }
}

impl<T: fmt::Display> fmt::Display for FalsifierTrace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[T]| format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
        writeln!(f, "orientation: {}", if self.increasing { "f" } else { "-f" })?;
        writeln!(f, "c^0 = {}", show(&self.chain[0]))?;
        for (j, s) in self.steps.iter().enumerate() {
            writeln!(
                f,
                "step {}: d={} x={} y={} t={} c^{} = {}",
                j + 1,
                s.d,
                show(&s.x),
                show(&s.y),
                show(&s.t),
                j + 1,
                show(&s.next)
            )?;
        }
        let o = &self.observation;
        writeln!(
            f,
            "contradiction ({:?}) on a={} a'={} b={} b'={} with c={} d={}",
            self.conclusion,
            show(&o.a),
            show(&o.a2),
            show(&o.b),
            show(&o.b2),
            show(&o.low),
            show(&o.high)
        )?;
        write!(f, "{}", self.violation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FalsifierOutcome<T> {
    Trace(Box<FalsifierTrace<T>>),
    /// `f(0, ..., 0) = f(1, ..., 1)`: the diagonal itself violates Betw.
    PreconditionFailed(BetwViolation<T>),
}

fn constant<T: Scalar>(k: usize, v: i64) -> Vec<T> {
    vec![scalar(v); k]
}

/// Turns `g(a) < g(a2)`, `g(b) >= g(b2)` for pairs with the same sign
/// pattern into a Betw violation of `f`, using comparison points below or
/// above all four tuples. `g` is `f` or `-f`; Betw is symmetric under
/// negation so the violation is stated for `f`.
pub fn observation_violation<T: Scalar>(
    f: &Expr<T>,
    a: &[T],
    a2: &[T],
    b: &[T],
    b2: &[T],
) -> Result<(ObservationUse<T>, BetwViolation<T>)> {
    let k = a.len();
    let mut low = Vec::with_capacity(k);
    let mut high = Vec::with_capacity(k);
    for i in 0..k {
        let vals = [&a[i], &a2[i], &b[i], &b2[i]];
        let min = (*vals.iter().min().unwrap()).clone() - T::one();
        let max = (*vals.iter().max().unwrap()).clone() + T::one();
        if a[i] < a2[i] {
            low.push(min);
            high.push(max);
        } else {
            low.push(max);
            high.push(min);
        }
    }
    let triples = [
        [low.clone(), a.to_vec(), a2.to_vec()],
        [a.to_vec(), a2.to_vec(), high.clone()],
        [low.clone(), b.to_vec(), b2.to_vec()],
        [b.to_vec(), b2.to_vec(), high.clone()],
    ];
    for args in triples {
        let values = [f.eval(&args[0])?, f.eval(&args[1])?, f.eval(&args[2])?];
        if !betw(&values[0], &values[1], &values[2]) {
            let violation = BetwViolation { args, values };
            debug_assert!(violation.recheck());
            let used = ObservationUse {
                a: a.to_vec(),
                a2: a2.to_vec(),
                b: b.to_vec(),
                b2: b2.to_vec(),
                low,
                high,
            };
            return Ok((used, violation));
        }
    }
    Err(Error::Shape(
        "comparison points gave no violation; hypotheses do not hold".into(),
    ))
}

/// Runs the construction refuting that `f` is a polymorphism. `witnesses[d-1]`
/// must refute the increasing clause at `d` for `f` (or for `-f` when
/// `f(0, ..., 0) > f(1, ..., 1)`).
pub fn run_falsifier<T: Scalar>(
    f: &Expr<T>,
    k: usize,
    witnesses: &[Option<WitnessPair<T>>],
) -> Result<FalsifierOutcome<T>> {
    if k == 0 {
        return Err(Error::Shape("arity must be positive".into()));
    }
    if f.arity() > k {
        return Err(Error::Index {
            index: f.arity(),
            arity: k,
        });
    }
    let diag: [Vec<T>; 3] = [constant(k, 0), constant(k, 1), constant(k, 2)];
    let dv = [f.eval(&diag[0])?, f.eval(&diag[1])?, f.eval(&diag[2])?];
    if dv[0] == dv[1] {
        return Ok(FalsifierOutcome::PreconditionFailed(BetwViolation {
            args: diag,
            values: dv,
        }));
    }
    let increasing = dv[0] < dv[1];
    let g = |x: &[T]| -> Result<T> {
        let v = f.eval(x)?;
        Ok(if increasing { v } else { T::zero() - v })
    };

    if witnesses.len() != k {
        return Err(Error::NotApplicable(format!(
            "{} witness slots for arity {k}",
            witnesses.len()
        )));
    }
    let mut pairs = Vec::with_capacity(k);
    for (i, w) in witnesses.iter().enumerate() {
        let d = i + 1;
        let Some((x, y)) = w else {
            return Err(Error::NotApplicable(format!("no witness for d={d}")));
        };
        if x.len() != k || y.len() != k || !all_distinct(x, y) || x[i] >= y[i] || g(x)? < g(y)? {
            return Err(Error::NotApplicable(format!(
                "the pair given for d={d} does not refute the clause"
            )));
        }
        pairs.push((x.clone(), y.clone()));
    }

    let kk: T = scalar(k as i64);
    let mut chain: Vec<Vec<T>> = vec![constant(k, 0)];
    let mut steps = Vec::new();
    for (j, (x, y)) in pairs.into_iter().enumerate() {
        let c = chain[j].clone();
        let t: Vec<T> = (0..k)
            .map(|i| {
                if x[i] < y[i] {
                    c[i].clone() + T::one()
                } else {
                    c[i].clone() - T::one()
                }
            })
            .collect();
        let next: Vec<T> = (0..k)
            .map(|i| {
                if t[i] > c[i] {
                    c[i].clone() + kk.clone()
                } else {
                    c[i].clone() - T::one()
                }
            })
            .collect();
        steps.push(FalsifierStep {
            d: j + 1,
            x: x.clone(),
            y: y.clone(),
            t: t.clone(),
            next: next.clone(),
        });
        let (gc, gt, gn) = (g(&c)?, g(&t)?, g(&next)?);
        let stop = if gc < gt {
            Some((Conclusion::Probe(j), observation_violation(f, &c, &t, &x, &y)?))
        } else if gc < gn {
            Some((Conclusion::Move(j), observation_violation(f, &c, &next, &c, &t)?))
        } else {
            None
        };
        chain.push(next);
        if let Some((conclusion, (observation, violation))) = stop {
            return Ok(FalsifierOutcome::Trace(Box::new(FalsifierTrace {
                increasing,
                chain,
                steps,
                conclusion,
                observation,
                violation,
            })));
        }
    }
    debug_assert!((0..k).all(|i| chain[0][i] < chain[k][i]));
    let (observation, violation) = observation_violation(f, &diag[0], &diag[1], &chain[0], &chain[k])?;
    Ok(FalsifierOutcome::Trace(Box::new(FalsifierTrace {
        increasing,
        chain,
        steps,
        conclusion: Conclusion::Chain,
        observation,
        violation,
    })))
}

/// For each `d`, the first pair on the grid `{-r, ..., r}^k` (in
/// lexicographic order of `(x, y)`) refuting the increasing clause of the
/// oriented function, or `None`.
pub fn find_witnesses<T: Scalar>(f: &Expr<T>, k: usize, r: usize) -> Result<Vec<Option<WitnessPair<T>>>> {
    let zero = f.eval(&constant(k, 0))?;
    let one = f.eval(&constant(k, 1))?;
    let increasing = zero <= one;
    let points: Vec<Vec<T>> = Tuples::new(2 * r + 1, k)
        .map(|t| t.iter().map(|&v| scalar(v as i64 - r as i64)).collect())
        .collect();
    let values = points
        .iter()
        .map(|p| f.eval(p).map(|v| if increasing { v } else { T::zero() - v }))
        .collect::<Result<Vec<T>>>()?;
    let mut out: Vec<Option<WitnessPair<T>>> = vec![None; k];
    for (x, gx) in points.iter().zip(&values) {
        for (y, gy) in points.iter().zip(&values) {
            if gx < gy || !all_distinct(x, y) {
                continue;
            }
            for (d, slot) in out.iter_mut().enumerate() {
                if slot.is_none() && x[d] < y[d] {
                    *slot = Some((x.clone(), y.clone()));
                }
            }
        }
        if out.iter().all(Option::is_some) {
            break;
        }
    }
    Ok(out)
}
