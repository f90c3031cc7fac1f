//! Numerical laboratory for conformal maps of ellipses and bi-circularly
//! symmetric domains, numerical ranges of small matrices, and the 2×2
//! Crouzeix bound `‖p(A)‖ ≤ 2·max_{W(A)} |p|`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: complex polynomials, Chebyshev recurrence, sampled curves,
//!   maximum-modulus search and discrete profile checks.
//! * [`conformal`]: the series conformal map of an ellipse onto the unit disk,
//!   the odd quintic maps `z + a z³ − b z⁵`, profile-generated domains and the
//!   Jack / circular / bi-circular symmetry verifiers.
//! * [`matrices`]: 2×2 Schur reduction, canonical form, numerical ranges,
//!   polynomial functional calculus and operator norms.
//! * [`crouzeix`]: the `φ(A)`, `ψ(A)` pipeline for the canonical 2×2 matrix,
//!   the Cauchy-transform cross-check, and Crouzeix-ratio search.
//! * [`cli`]: the `crouzeix-lab` command-line front end.
//!
//! Grid sweeps run on rayon when the `parallel` feature is enabled (the
//! default) and fall back to plain iterators otherwise; results are identical
//! in both builds.

pub mod cli;
pub mod conformal;
pub mod crouzeix;
mod error;
pub mod matrices;
pub mod numerics;
pub mod par;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
