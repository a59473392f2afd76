//! Holomorphic functions on a Bernstein ellipse around a real interval.

mod branch;
mod curve;
mod domain;
mod scalar;

pub use branch::{
    arcsin_point, arcsin_series, sqrt_branch, BranchSpec, UNIT_DISK_MARGIN, ZERO_TOL,
};
pub use curve::AnalyticCurve3;
pub use domain::{DomainSpec, FitOptions};
pub use scalar::{AnalyticScalar, COMPOSE_SLACK};
