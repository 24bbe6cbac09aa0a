//! Exact counting of matrix permanents and Hamiltonian-cycle polynomials,
//! over finite fields and over the integers.
//!
//! The crate provides classical reference algorithms (brute force, Ryser's
//! formula, subset DP) alongside a subexponential evaluation pipeline that
//! routes each instance through a Kakeya-curve point set, per-point data
//! structures answering truncated-series ("r-order") evaluations, and Hermite
//! interpolation. Integer counts are recovered from per-prime residues by the
//! Chinese remainder theorem with a balanced lift.

pub mod error;
pub mod evaluator;
pub mod field;
pub mod hc_eval;
pub mod hermite;
pub mod io;
pub mod kakeya;
pub mod matrix;
pub mod oracles;
pub mod per_eval;
pub mod pipeline;
pub mod poly;
pub mod reduction;
pub mod reveal;
pub mod ring;
pub mod series;

pub use error::{Error, Result};
pub use evaluator::CountMode;
pub use field::{FieldCtx, FieldElem};
pub use matrix::{FieldMatrix, IntMatrix, Matrix};
pub use poly::Poly;
pub use ring::{IntRing, Ring};
pub use series::{SeriesRing, TruncSeries};
