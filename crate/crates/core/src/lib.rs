//! Exact circuit synthesis by 2-QBF expansion.
//!
//! Given a basis (component library) and a requirements circuit, the crate can
//! pick component types for a fixed topology, count the equivalent labelings,
//! and search for minimum-size circuits. All three problems are encoded as
//! `∃S ∀X ∃Z` formulas over a miter and solved by expanding the universal
//! block into a SAT instance for the bundled CDCL solver.

pub mod bases;
pub mod benchgen;
pub mod circuit;
pub mod encoder;
pub mod formula;
pub mod solver;
pub mod synthesis;

pub use bases::{builtin_basis, Basis};
pub use circuit::{BooleanFunction, Circuit};
