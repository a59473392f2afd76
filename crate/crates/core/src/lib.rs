//! Minimal surfaces containing a real-analytic curve and a translate of a
//! nearby curve.
//!
//! The pipeline builds an analytic unit normal along the base curve `a`,
//! integrates the Björling problem to an isotropic curve `a - i d0`, extends
//! the nearby curve `l` isotropically to `C_V`, and solves
//! `(a - i d) o gamma = C_V` with a frozen-derivative Newton iteration. A
//! final translation of one coordinate makes `Re(a - i D)` pass through `a`
//! on the real axis and through `l + v0` along `gamma`.

// NaN must fail every threshold test, hence `!(x < tol)` throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bjorling;
pub mod bounds;
pub mod error;
pub mod io;
pub mod normal_field;
pub mod solver;
pub mod verification;

pub use analytic::{AnalyticCurve3, AnalyticScalar, BranchSpec, DomainSpec, FitOptions};
pub use error::{Error, Result};
