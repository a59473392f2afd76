use std::f64::consts::PI;

use num_complex::Complex64;

use super::scalar::AnalyticScalar;
use crate::error::{Error, Result};

/// Relative size of `inf |Q|` (against `sup |Q|`) below which `Q` is
/// considered to vanish somewhere on the closed domain.
pub const ZERO_TOL: f64 = 1e-8;

/// Default distance from the unit circle required by [`arcsin_series`].
pub const UNIT_DISK_MARGIN: f64 = 1e-6;

const ARG_BINS: usize = 64;

/// A single-valued square-root branch: the argument of the radicand is read
/// in `[alpha0, alpha0 + 2 pi)` and the root is multiplied by
/// `sign_at_anchor`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchSpec {
    pub alpha0: f64,
    pub sign_at_anchor: f64,
}

impl BranchSpec {
    pub fn root(&self, z: Complex64) -> Complex64 {
        let theta0 = self.alpha0 + (z.arg() - self.alpha0).rem_euclid(2.0 * PI);
        self.sign_at_anchor * Complex64::from_polar(z.norm().sqrt(), 0.5 * theta0)
    }
}

/// Midpoint of the widest circular run of empty bins in the histogram of
/// sampled arguments; `None` when every bin is hit.
fn largest_gap_center(values: &[Complex64]) -> Option<f64> {
    let width = 2.0 * PI / ARG_BINS as f64;
    let mut hit = [false; ARG_BINS];
    for v in values {
        let a = (v.arg() + PI).rem_euclid(2.0 * PI);
        hit[((a / width) as usize).min(ARG_BINS - 1)] = true;
    }
    let start = hit.iter().position(|&h| h)?;
    let (mut best_len, mut best_start) = (0usize, 0usize);
    let mut run = 0usize;
    // walk once around the circle starting just after an occupied bin
    for step in 1..=ARG_BINS {
        let b = (start + step) % ARG_BINS;
        if hit[b] {
            run = 0;
        } else {
            run += 1;
            if run > best_len {
                best_len = run;
                best_start = (b + ARG_BINS + 1 - run) % ARG_BINS;
            }
        }
    }
    if best_len == 0 {
        return None;
    }
    let center = (best_start as f64 + 0.5 * best_len as f64) * width - PI;
    Some(center)
}

/// Analytic square root of `q` on the closed domain, positive (or in the
/// right half plane) at the anchor point.
pub fn sqrt_branch(q: &AnalyticScalar, anchor_u0: f64) -> Result<(AnalyticScalar, BranchSpec)> {
    let domain = *q.domain();
    let samples: Vec<Complex64> = domain
        .boundary_points()
        .into_iter()
        .chain(domain.interior_grid())
        .map(|w| q.eval(w))
        .chain(domain.check_nodes().into_iter().map(|u| q.eval_real(u)))
        .collect();
    let sup = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let inf = samples
        .iter()
        .map(|v| v.norm())
        .fold(f64::INFINITY, f64::min);
    if !(inf > ZERO_TOL * sup) {
        return Err(Error::ZeroOnDomain { inf_modulus: inf });
    }
    // values on I decide the branch; if their continuous argument sweeps a
    // full turn no fixed cut can avoid them
    let line: Vec<Complex64> = domain
        .lobatto_nodes(4 * domain.boundary_samples)
        .into_iter()
        .map(|u| q.eval_real(u))
        .collect();
    let (mut arg, mut lo, mut hi) = (0.0f64, 0.0f64, 0.0f64);
    for pair in line.windows(2) {
        arg += (pair[1] / pair[0]).arg();
        lo = lo.min(arg);
        hi = hi.max(arg);
    }
    if hi - lo >= 2.0 * PI * (1.0 - 1.0 / ARG_BINS as f64) {
        return Err(Error::NoBranchGap);
    }
    let all: Vec<Complex64> = samples.iter().chain(line.iter()).copied().collect();
    let alpha0 = largest_gap_center(&all).ok_or(Error::NoBranchGap)?;
    let raw = BranchSpec {
        alpha0,
        sign_at_anchor: 1.0,
    };
    let at_anchor = raw.root(q.eval_real(anchor_u0));
    let flip = at_anchor.re < 0.0 || (at_anchor.re == 0.0 && at_anchor.im < 0.0);
    let spec = BranchSpec {
        alpha0,
        sign_at_anchor: if flip { -1.0 } else { 1.0 },
    };
    let root = AnalyticScalar::fit(domain, |u| spec.root(q.eval_real(u)))?;

    let node_res = domain
        .lobatto_nodes(root.degree().max(q.degree()).max(16))
        .into_iter()
        .map(|u| {
            let r = root.eval_real(u);
            (r * r - q.eval_real(u)).norm()
        })
        .fold(0.0, f64::max);
    if node_res > 1e-10 * sup {
        return Err(Error::BranchResidual(format!(
            "node residual {node_res:e} of the square root"
        )));
    }
    let boundary: Vec<Complex64> = domain
        .boundary_points()
        .into_iter()
        .map(|w| root.eval(w))
        .collect();
    for k in 0..boundary.len() {
        let (a, b) = (boundary[k], boundary[(k + 1) % boundary.len()]);
        if (b / a).arg().abs() >= 0.5 * PI {
            return Err(Error::BranchResidual(
                "square root jumps between adjacent boundary samples".into(),
            ));
        }
    }
    Ok((root, spec))
}

fn arcsin_taylor(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 0..100_000u32 {
        let n = n as f64;
        term *= z2 * ((2.0 * n + 1.0) * (2.0 * n + 1.0) / ((2.0 * n + 2.0) * (2.0 * n + 3.0)));
        sum += term;
        if term.norm() < 1e-16 * sum.norm().max(1e-300) || term.norm() == 0.0 {
            break;
        }
    }
    sum
}

/// Arcsine on the open unit disk by the power series
/// `sum (2n)! / (4^n (n!)^2) z^(2n+1) / (2n+1)`. Arguments with `|z| > 1/2`
/// are first halved in angle, `asin z = 2 asin(z / sqrt(2 (1 + sqrt(1 - z^2))))`,
/// so that the series always converges geometrically.
pub fn arcsin_point(z: Complex64) -> Complex64 {
    if z.norm() <= 0.5 {
        arcsin_taylor(z)
    } else {
        let c = (1.0 - z * z).sqrt();
        let half = z / (2.0 * (1.0 + c)).sqrt();
        2.0 * arcsin_taylor(half)
    }
}

/// `theta = asin(z)` as an analytic function, requiring `sup |z| < 1 - margin`.
pub fn arcsin_series(z: &AnalyticScalar, margin: f64) -> Result<AnalyticScalar> {
    let sup = z.sup_norm();
    if !(sup < 1.0 - margin) {
        return Err(Error::UnitDiskViolation { sup_modulus: sup });
    }
    AnalyticScalar::fit(*z.domain(), |u| arcsin_point(z.eval_real(u)))
}
