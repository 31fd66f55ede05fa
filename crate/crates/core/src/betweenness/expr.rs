use std::fmt;
use std::str::FromStr;

use super::{scalar_at, Scalar};
use crate::error::{Error, Result};
use crate::sexpr::{self, Sexpr};

/// An arithmetic expression over `x1..xk`, evaluated exactly.
///
/// Text form: `(+ e ...)`, `(- e)`, `(- e f)`, `(* e ...)`, `(min e ...)`,
/// `(max e ...)`, variables `x1`, `x2`, ..., and constants `p/q` or integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr<T> {
    /// Zero-based variable index; `x1` is `Var(0)`.
    Var(usize),
    Const(T),
    Add(Vec<Expr<T>>),
    Neg(Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Vec<Expr<T>>),
    Min(Vec<Expr<T>>),
    Max(Vec<Expr<T>>),
}

impl<T: Scalar> Expr<T> {
    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    /// Number of variables needed: one more than the largest index used.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Var(i) => i + 1,
            Expr::Const(_) => 0,
            Expr::Neg(e) => e.arity(),
            Expr::Sub(a, b) => a.arity().max(b.arity()),
            Expr::Add(es) | Expr::Mul(es) | Expr::Min(es) | Expr::Max(es) => {
                es.iter().map(Expr::arity).max().unwrap_or(0)
            }
        }
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        Ok(match self {
            Expr::Var(i) => x.get(*i).cloned().ok_or(Error::Index {
                index: i + 1,
                arity: x.len(),
            })?,
            Expr::Const(c) => c.clone(),
            Expr::Neg(e) => T::zero() - e.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Add(es) => es
                .iter()
                .try_fold(T::zero(), |acc, e| Ok::<T, Error>(acc + e.eval(x)?))?,
            Expr::Mul(es) => es
                .iter()
                .try_fold(T::one(), |acc, e| Ok::<T, Error>(acc * e.eval(x)?))?,
            Expr::Min(es) | Expr::Max(es) => {
                let vals = es.iter().map(|e| e.eval(x)).collect::<Result<Vec<T>>>()?;
                let v = if matches!(self, Expr::Min(_)) {
                    vals.into_iter().min()
                } else {
                    vals.into_iter().max()
                };
                v.ok_or_else(|| Error::Shape("min/max of nothing".into()))?
            }
        })
    }

    /// `self(g_1, ..., g_k)`.
    pub fn compose(&self, gs: &[Expr<T>]) -> Result<Expr<T>> {
        let map = |es: &[Expr<T>]| es.iter().map(|e| e.compose(gs)).collect::<Result<Vec<_>>>();
        Ok(match self {
            Expr::Var(i) => gs.get(*i).cloned().ok_or(Error::Index {
                index: i + 1,
                arity: gs.len(),
            })?,
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Neg(e) => Expr::Neg(Box::new(e.compose(gs)?)),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.compose(gs)?), Box::new(b.compose(gs)?)),
            Expr::Add(es) => Expr::Add(map(es)?),
            Expr::Mul(es) => Expr::Mul(map(es)?),
            Expr::Min(es) => Expr::Min(map(es)?),
            Expr::Max(es) => Expr::Max(map(es)?),
        })
    }
}

impl<T: Scalar + FromStr> Expr<T> {
    pub fn parse(text: &str) -> Result<Self> {
        from_sexpr(&sexpr::parse(text)?)
    }
}

fn from_sexpr<T: Scalar + FromStr>(e: &Sexpr) -> Result<Expr<T>> {
    match e {
        Sexpr::Atom(a) => {
            if let Some(n) = a.strip_prefix('x').and_then(|n| n.parse::<usize>().ok()) {
                if n == 0 {
                    return Err(Error::parse(1, "variables start at x1"));
                }
                return Ok(Expr::Var(n - 1));
            }
            Ok(Expr::Const(scalar_at(1, a)?))
        }
        Sexpr::List(items) => {
            let (head, rest) = items.split_first().ok_or_else(|| Error::parse(1, "empty expression"))?;
            let op = head.as_atom().ok_or_else(|| Error::parse(1, "operator expected"))?;
            let args = rest.iter().map(from_sexpr).collect::<Result<Vec<_>>>()?;
            let nonempty = |args: Vec<Expr<T>>| {
                if args.is_empty() {
                    Err(Error::parse(1, format!("`{op}` needs arguments")))
                } else {
                    Ok(args)
                }
            };
            match op {
                "+" => Ok(Expr::Add(args)),
                "*" => Ok(Expr::Mul(args)),
                "min" => Ok(Expr::Min(nonempty(args)?)),
                "max" => Ok(Expr::Max(nonempty(args)?)),
                "-" => {
                    let mut it = args.into_iter();
                    match (it.next(), it.next(), it.next()) {
                        (Some(a), None, _) => Ok(Expr::Neg(Box::new(a))),
                        (Some(a), Some(b), None) => Ok(Expr::Sub(Box::new(a), Box::new(b))),
                        _ => Err(Error::parse(1, "`-` takes one or two arguments")),
                    }
                }
                other => Err(Error::parse(1, format!("unknown operator `{other}`"))),
            }
        }
    }
}

impl<T: fmt::Display> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, es: &[Expr<T>]| {
            write!(f, "({op}")?;
            for e in es {
                write!(f, " {e}")?;
            }
            write!(f, ")")
        };
        match self {
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Neg(e) => write!(f, "(- {e})"),
            Expr::Sub(a, b) => write!(f, "(- {a} {b})"),
            Expr::Add(es) => list(f, "+", es),
            Expr::Mul(es) => list(f, "*", es),
            Expr::Min(es) => list(f, "min", es),
            Expr::Max(es) => list(f, "max", es),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::betweenness::parse_scalar;
    use crate::Rational;

    fn q(s: &str) -> Rational {
        parse_scalar(s).unwrap()
    }

    #[test]
    fn evaluates_exactly() {
        let e: Expr<Rational> = Expr::parse("(+ (* 1/3 x1) (min x2 1/2) (- 1))").unwrap();
        assert_eq!(e.arity(), 2);
        assert_eq!(e.eval(&[q("1"), q("3")]).unwrap(), q("-1/6"));
        assert_eq!(Expr::<Rational>::parse(&e.to_string()).unwrap(), e);
        assert!(matches!(e.eval(&[q("1")]), Err(Error::Index { index: 2, arity: 1 })));
    }

    #[test]
    fn composition() {
        let f: Expr<i64> = Expr::Sub(Box::new(Expr::Var(0)), Box::new(Expr::Var(1)));
        let g = f.compose(&[Expr::Var(1), Expr::Const(3)]).unwrap();
        assert_eq!(g.eval(&[0, 10]).unwrap(), 7);
    }

    #[test]
    fn parse_errors() {
        assert!(Expr::<Rational>::parse("(- x1 x2 x3)").is_err());
        assert!(Expr::<Rational>::parse("(pow x1 2)").is_err());
        assert!(Expr::<Rational>::parse("x0").is_err());
        assert!(Expr::<Rational>::parse("(min)").is_err());
        assert!(Expr::<Rational>::parse("1/0").is_err());
    }
}
