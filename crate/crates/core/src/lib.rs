//! Polymorphism clones, primitive positive definitions and interpretations,
//! and CSP hardness certificates on finite relational structures.
//!
//! ```
//! use polyclone::clone::polymorphisms;
//! use polyclone::structure::{solve_pp_sentence, FiniteStructure, Formula};
//! use polyclone::Budget;
//!
//! let oit = FiniteStructure::new("oit", 2)?
//!     .with_relation("OIT", 3, [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]])?;
//! let binary = polymorphisms(&oit, 2, &Budget::default())?;
//! assert!(binary.iter().all(|f| f.is_projection()));
//!
//! let phi = Formula::parse("(exists (x y) (rel OIT x x y))")?;
//! assert!(solve_pp_sentence(&oit, &phi)?.is_sat());
//! # Ok::<(), polyclone::Error>(())
//! ```

pub mod algebra;
pub mod betweenness;
pub mod budget;
pub mod clone;
mod closure;
pub mod error;
pub mod hardness;
pub mod interpret;
pub mod ppdef;
mod sexpr;
pub mod structure;
pub mod tuple;

pub use budget::Budget;
pub use error::{Error, Result};

pub type Element = usize;
pub type Tuple = Vec<Element>;

/// Exact rationals, the scalar of the Betweenness module.
pub type Rational = num_rational::BigRational;
pub type RationalExpr = betweenness::Expr<Rational>;
pub type RationalSample = betweenness::FunctionSample<Rational>;
