//! Evolutionary search for monotone Boolean functions with high nonlinearity.
//!
//! The crate is organised bottom-up:
//!
//! - [`truth_table`], [`walsh`] and [`monotone`] hold the canonical function
//!   representation and its spectral and structural properties.
//! - [`bounds`] provides exact references: threshold/majority functions, their
//!   closed-form nonlinearity, and upper bounds for monotone functions.
//! - [`encoding`] implements the three genome representations (raw truth table,
//!   fixed-weight truth table, expression tree) with their variation operators.
//! - [`fitness`] turns a truth table into a penalised scalar fitness.
//! - [`engine`] is the steady-state evolutionary algorithm with 3-tournament
//!   worst elimination.
//!
//! Input indexing is LSB-first throughout: bit `j` of a truth-table index is the
//! value of variable `x_{j+1}`.

pub mod bounds;
pub mod encoding;
pub mod engine;
mod error;
pub mod fitness;
pub mod monotone;
pub mod truth_table;
pub mod walsh;

pub use error::{Error, Result};
pub use truth_table::TruthTable;
pub use walsh::WalshSpectrum;
