//! Finitary operations as tables, polymorphisms, clone generation and the
//! invariant relations of a set of operations.

mod generate;
mod invariants;
mod polymorphism;
mod table;

pub use generate::{generate_clone, CloneFragment, Member, Provenance};
pub use invariants::invariants;
pub(crate) use polymorphism::polymorphism_csp;
pub use polymorphism::{is_polymorphism, polymorphisms, preserves, preserves_relation, Preservation, Violation};
pub use table::{compose, projection, OperationTable};
