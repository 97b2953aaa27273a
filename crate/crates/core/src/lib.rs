//! Numerical and exact-arithmetic toolkit for the group U(2,1), the complex
//! hyperbolic plane, spherical-function harmonic analysis, oscillatory decay
//! experiments, and the GL(3) p-adic Hecke algebra with its amplifier.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense 3x3 complex matrices, exponential/logarithm, norms,
//!   and the chart distance used everywhere else.
//! - [`group`]: structure theory of U(2,1) — subgroup parametrizations,
//!   Iwasawa/Cartan decompositions, the Cayley transform, the boundary
//!   action on the maximal compact, and derivatives of the A-projection.
//! - [`geometry`]: the Siegel domain model, Bergman distance, the radial
//!   distance function and its t-derivatives, tubes, and invariant measures.
//! - [`harmonic`]: spherical functions, Helgason/Harish-Chandra transforms,
//!   Plancherel density, Paley-Wiener kernels and radial cutoffs.
//! - [`oscillatory`]: the 1-d and multi-dimensional oscillatory integrals,
//!   phase-gradient certificates, and decay-exponent fitting.
//! - [`hecke`]: exact double-coset algebra of GL(3) over a local field and
//!   the amplifier built from it.

pub mod error;
pub mod geometry;
pub mod group;
pub mod harmonic;
pub mod hecke;
pub mod interp;
pub mod linalg;
pub mod oscillatory;
pub mod quad;

pub use error::Error;

/// Convenient result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
