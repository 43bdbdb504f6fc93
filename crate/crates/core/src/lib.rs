//! Exact, windowed computations on the graded grid space `X_{ω+1}`.
//!
//! The space is the disjoint union of the grids `Xₙ ⊂ ℝⁿ` (axis-parallel
//! lines through the lattice `(nℤ)ⁿ`), with a cross-level metric that adds a
//! triangular offset between levels. Everything here works on integer points
//! inside finite windows, so every check is exact.
//!
//! Modules:
//!
//! - [`space`]: points, windows and the metric.
//! - [`families`]: symbolic box families with symbolic and brute-force
//!   verification of r-disjointness, boundedness and covering.
//! - [`cover`]: the explicit two-family construction on the high levels,
//!   brick covers for the low levels, and the windowed certificate.
//! - [`ordinal`]: ranks of finite set systems and the windowed surrogate
//!   for membership in `A(X, d)`.
//! - [`obstruction`]: the discrete Lebesgue covering check and the pipeline
//!   that turns a candidate cover of a cube window into a spanning path.
//!
//! With the default `parallel` feature the inner loops run on rayon; without
//! it the same code runs sequentially and produces identical results.

pub mod cover;
pub mod error;
pub mod families;
pub mod obstruction;
pub mod ordinal;
pub mod par;
pub mod space;

pub use error::{Error, Result};
pub use space::{Limits, Point, Window};
