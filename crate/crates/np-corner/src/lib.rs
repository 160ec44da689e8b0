//! Spectral theory of the Neumann-Poincare (NP) operator on planar curves
//! with corners.
//!
//! The crate has three layers:
//!
//! - [`mellin`] and [`halfline`]: exact Mellin-symbol computations for the
//!   model corner operator on the half-line (the symbol `K̂_α`, its spectral
//!   contours, the inverse map `μ_α`, and a log-grid realization of the model
//!   convolution operator with resolvent and singular-coefficient
//!   extraction).
//! - [`curve`] and [`ops`]: piecewise-smooth Jordan curves with
//!   corner-graded composite Gauss quadrature meshes, and Nystrom assembly
//!   of the NP operator `K`, its `L²` adjoint `K*`, and the single-layer
//!   operator `S`, together with the discrete `E'` inner product in which
//!   `K` is self-adjoint.
//! - [`spectral`]: physics-facing sweeps on the full curve (polarizability
//!   limits, spectral densities, eigenvalue detection, and corner-exponent
//!   fits that verify the limiting absorption structure).
//!
//! The [`cli`] module wires everything to the `np-corner` binary.

pub mod cli;
pub mod curve;
pub mod error;
pub mod expr;
pub mod halfline;
pub mod linalg;
pub mod mellin;
pub mod ops;
pub mod quad;
pub mod spectral;
pub mod svg;

pub use error::{Error, Result};
pub use mellin::CornerAngle;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
