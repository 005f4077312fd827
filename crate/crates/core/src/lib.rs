//! Exact-arithmetic construction and analysis of digital sequences over
//! finite fields.
//!
//! The crate builds points of digital Kronecker-type sequences two ways --
//! from formal Laurent series and from generating matrices -- and analyzes
//! them: star discrepancy, net quality, character-sum (Walsh) decompositions
//! of the discrepancy counting error, dual-space structure, and long-run
//! remainder profiles for interval counting. All number-theoretic predicates
//! run in exact arithmetic (finite-field tables, big rationals); floating
//! point appears only in trigonometric character sums, where every identity
//! checked has an a-priori tolerance.

pub mod brs;
pub mod error;
pub mod field;
pub mod generate;
pub mod laurent;
pub mod linalg;
pub mod net;
pub mod points;
pub mod walsh;

pub use error::{Error, Result};
