//! The Betweenness problem over the rationals and the classification of its
//! polymorphisms by a dominant coordinate.
//!
//! Everything below is generic over an ordered [`Scalar`]; the crate root
//! fixes it to exact rationals.

mod expr;
mod falsify;
mod sample;
mod solve;

use std::fmt;
use std::str::FromStr;

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};

pub use expr::Expr;
pub use falsify::{
    find_witnesses, observation_violation, run_falsifier, Conclusion, FalsifierOutcome, FalsifierStep, FalsifierTrace,
    ObservationUse, WitnessPair,
};
pub use sample::{
    check_observation, check_partial_polymorphism, classify, consistent_candidates, Candidate, Classification,
    ClauseWitness, Direction, FunctionSample, Observation, PolymorphismCheck,
};
pub use solve::{brute_force_betweenness, solve_betweenness, BetwInstance, BetwSolution};

/// An exact, totally ordered number type.
pub trait Scalar: Clone + Ord + Num + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync {}

impl<T: Clone + Ord + Num + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync> Scalar for T {}

/// `x < y < z` or `z < y < x`.
pub fn betw<T: Ord>(x: &T, y: &T, z: &T) -> bool {
    (x < y && y < z) || (z < y && y < x)
}

/// `x_j != y_j` for every coordinate.
pub fn all_distinct<T: PartialEq>(x: &[T], y: &[T]) -> bool {
    x.iter().zip(y).all(|(a, b)| a != b)
}

pub(crate) fn scalar<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("small integers are representable")
}

/// Reads `p/q` or an integer; the denominator must be nonzero.
pub fn parse_scalar<T: Scalar + FromStr>(word: &str) -> Option<T> {
    if let Some((_, q)) = word.split_once('/') {
        if q.trim_start_matches(['+', '-']).chars().all(|c| c == '0') {
            return None;
        }
    }
    T::from_str(word).ok()
}

/// `parse_scalar` with a positioned error.
pub(crate) fn scalar_at<T: Scalar + FromStr>(line: usize, word: &str) -> Result<T> {
    parse_scalar(word).ok_or_else(|| Error::parse(line, format!("`{word}` is not a rational number")))
}

/// A `k`-ary Betw violation: three argument tuples whose columns are all
/// Betw triples while the three values are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetwViolation<T> {
    pub args: [Vec<T>; 3],
    pub values: [T; 3],
}

impl<T: Scalar> BetwViolation<T> {
    pub fn recheck(&self) -> bool {
        let [p, q, r] = &self.args;
        let k = p.len();
        q.len() == k
            && r.len() == k
            && (0..k).all(|i| betw(&p[i], &q[i], &r[i]))
            && !betw(&self.values[0], &self.values[1], &self.values[2])
    }

    /// Re-evaluates `f` at the three argument tuples and asks the
    /// partial-polymorphism check for a violation on that sample.
    pub fn certify(&self, f: &Expr<T>) -> Result<bool> {
        let mut s = FunctionSample::new(self.args[0].len());
        for a in &self.args {
            s.push(a.clone(), f.eval(a)?)?;
        }
        let fresh: Vec<T> = self.args.iter().map(|a| f.eval(a)).collect::<Result<_>>()?;
        Ok(fresh == self.values && matches!(check_partial_polymorphism(&s), PolymorphismCheck::Violation(_)))
    }
}

impl<T: fmt::Display> fmt::Display for BetwViolation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, v) in self.args.iter().zip(&self.values) {
            let xs: Vec<String> = a.iter().map(ToString::to_string).collect();
            writeln!(f, "f({}) = {v}", xs.join(", "))?;
        }
        write!(f, "columns are Betw, values are not")
    }
}
