use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Knobs of the adaptive Chebyshev fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Relative size below which trailing coefficients count as resolved.
    pub tol: f64,
    /// Largest degree tried before giving up.
    pub max_degree: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-13,
            max_degree: 4096,
        }
    }
}

/// Closed Bernstein ellipse with foci at the endpoints of `I = [lo, hi]`.
///
/// The ellipse `E_rho` is the image of the circle `|z| = rho` under the
/// Joukowski map `x = (z + 1/z) / 2`, pulled back to `I` by the affine map
/// sending `[-1, 1]` onto `I`. It is convex, simply connected, bounded and
/// contains `I`; it is also exactly the region where a Chebyshev series of a
/// function analytic inside `E_rho` converges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub interval_lo: f64,
    pub interval_hi: f64,
    pub rho: f64,
    /// Points on the boundary used for sup/inf estimates.
    pub boundary_samples: usize,
    /// Interior grid for `inf_modulus`: angles x elliptic radii.
    pub grid_angular: usize,
    pub grid_radial: usize,
    /// Diameter of the closed ellipse (its major axis).
    pub diameter: f64,
    pub fit: FitOptions,
}

impl DomainSpec {
    pub fn new(interval_lo: f64, interval_hi: f64, rho: f64) -> Result<Self> {
        if !(interval_lo.is_finite() && interval_hi.is_finite() && interval_lo < interval_hi) {
            return Err(Error::InvalidDomain(format!(
                "interval [{interval_lo}, {interval_hi}] is empty"
            )));
        }
        if !(rho.is_finite() && rho > 1.0) {
            return Err(Error::InvalidDomain(format!("rho = {rho} must exceed 1")));
        }
        let half = 0.5 * (interval_hi - interval_lo);
        Ok(DomainSpec {
            interval_lo,
            interval_hi,
            rho,
            boundary_samples: 128,
            grid_angular: 64,
            grid_radial: 33,
            diameter: half * (rho + 1.0 / rho),
            fit: FitOptions::default(),
        })
    }

    pub fn with_boundary_samples(mut self, n: usize) -> Result<Self> {
        if n < 64 {
            return Err(Error::InvalidDomain(format!(
                "boundary_samples = {n} must be at least 64"
            )));
        }
        self.boundary_samples = n;
        Ok(self)
    }

    pub fn with_grid(mut self, angular: usize, radial: usize) -> Result<Self> {
        if angular < 8 || radial < 2 {
            return Err(Error::InvalidDomain(format!(
                "interior grid {angular}x{radial} too coarse"
            )));
        }
        self.grid_angular = angular;
        self.grid_radial = radial;
        Ok(self)
    }

    pub fn with_fit(mut self, fit: FitOptions) -> Result<Self> {
        if !(fit.tol > 0.0 && fit.tol < 1.0) || fit.max_degree < 16 {
            return Err(Error::InvalidDomain(format!("bad fit options {fit:?}")));
        }
        self.fit = fit;
        Ok(self)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.interval_lo + self.interval_hi)
    }

    pub fn half_length(&self) -> f64 {
        0.5 * (self.interval_hi - self.interval_lo)
    }

    /// Semi-axes of the ellipse in the `w` plane.
    pub fn semi_axes(&self) -> (f64, f64) {
        let h = self.half_length();
        (
            h * 0.5 * (self.rho + 1.0 / self.rho),
            h * 0.5 * (self.rho - 1.0 / self.rho),
        )
    }

    pub fn to_unit(&self, w: Complex64) -> Complex64 {
        (w - self.midpoint()) / self.half_length()
    }

    pub fn from_unit(&self, x: Complex64) -> Complex64 {
        x * self.half_length() + self.midpoint()
    }

    /// Elliptic radius of `w`: the `R >= 1` with `w` on the boundary of `E_R`.
    pub fn elliptic_radius(&self, w: Complex64) -> f64 {
        let x = self.to_unit(w);
        // |x - 1| + |x + 1| = R + 1/R
        let s = 0.5 * ((x - 1.0).norm() + (x + 1.0).norm());
        s + (s * s - 1.0).max(0.0).sqrt()
    }

    /// `w` lies in the closed ellipse enlarged by the relative slack `tol` in `rho`.
    pub fn contains(&self, w: Complex64, tol: f64) -> bool {
        self.elliptic_radius(w) <= self.rho * (1.0 + tol)
    }

    pub fn contains_real(&self, u: f64) -> bool {
        u >= self.interval_lo && u <= self.interval_hi
    }

    /// Point on the ellipse of elliptic radius `radius` at Joukowski angle `t`.
    pub fn ellipse_point(&self, radius: f64, t: f64) -> Complex64 {
        let z = Complex64::from_polar(radius, t);
        self.from_unit(0.5 * (z + 1.0 / z))
    }

    pub fn boundary_points(&self) -> Vec<Complex64> {
        let n = self.boundary_samples;
        (0..n)
            .map(|k| self.ellipse_point(self.rho, 2.0 * PI * k as f64 / n as f64))
            .collect()
    }

    /// Grid covering the closed ellipse in elliptic coordinates; the innermost
    /// level (radius 1) is the interval itself.
    pub fn interior_grid(&self) -> Vec<Complex64> {
        let (na, nr) = (self.grid_angular, self.grid_radial);
        let mut pts = Vec::with_capacity(na * nr);
        for m in 0..nr {
            let radius = 1.0 + (self.rho - 1.0) * m as f64 / (nr - 1) as f64;
            for k in 0..na {
                pts.push(self.ellipse_point(radius, 2.0 * PI * k as f64 / na as f64));
            }
        }
        pts
    }

    /// Chebyshev-Lobatto points `x_j = cos(pi j / n)`, `j = 0..=n`, mapped onto `I`.
    pub fn lobatto_nodes(&self, n: usize) -> Vec<f64> {
        if n == 0 {
            return vec![self.midpoint()];
        }
        (0..=n)
            .map(|j| self.midpoint() + self.half_length() * (PI * j as f64 / n as f64).cos())
            .collect()
    }

    /// Lobatto nodes used by sup/inf and residual checks.
    pub fn check_nodes(&self) -> Vec<f64> {
        self.lobatto_nodes(self.boundary_samples / 2)
    }
}
