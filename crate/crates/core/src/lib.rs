//! Mild solutions of `u_t + (−Δ)^{β/2} u = B(u,…,u)` and of the coupled
//! two-component system.
//!
//! The crate is organised bottom-up:
//!
//! * [`rational`] and [`exponents`]: exact exponent arithmetic and admissibility reports.
//! * [`kernel`]: the fractional heat kernel by inverse Fourier quadrature.
//! * [`grid`] and [`semigroup`]: periodic grid functions and the spectral semigroup.
//! * [`spaces`]: weighted sup norms (`BE^α`, Besov) on geometric time grids.
//! * [`solver`]: nonlinear forms, contraction constants and Picard iteration.
//! * [`verify`]: property checks with CSV evidence, and the suite runner.
//! * [`config`]: key=value configuration shared by the CLI and the suite.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod kernel;
pub mod quadrature;
pub mod rational;
pub mod semigroup;
pub mod solver;
pub mod spaces;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use exponents::{AdmissibilityReport, NormIndex, ScalarParams, SystemParams};
pub use grid::{Geometry, GridFunction, SpectralField};
pub use rational::Rat;
