use std::f64::consts::PI;

use num_complex::Complex64;

use super::domain::DomainSpec;
use crate::error::{Error, Result};

/// Relative coefficient size treated as rounding noise when chopping.
const NOISE_REL: f64 = 1e-15;

/// Default slack (relative, in elliptic radius) allowed for the range of an
/// inner function in [`AnalyticScalar::compose`].
pub const COMPOSE_SLACK: f64 = 0.1;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A function holomorphic on the closed Bernstein ellipse of its domain,
/// stored as a truncated Chebyshev series in the variable that maps `I`
/// onto `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticScalar {
    domain: DomainSpec,
    coeffs: Vec<Complex64>,
}

impl AnalyticScalar {
    pub fn from_coeffs(domain: DomainSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidDomain("empty coefficient list".into()));
        }
        Ok(AnalyticScalar { domain, coeffs })
    }

    pub fn from_real_coeffs(domain: DomainSpec, coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(
            domain,
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    pub fn constant(domain: DomainSpec, c: Complex64) -> Self {
        AnalyticScalar {
            domain,
            coeffs: vec![c],
        }
    }

    pub fn zero(domain: DomainSpec) -> Self {
        Self::constant(domain, Complex64::new(0.0, 0.0))
    }

    /// The coordinate function `w -> w`.
    pub fn identity(domain: DomainSpec) -> Self {
        AnalyticScalar {
            domain,
            coeffs: vec![domain.midpoint().into(), domain.half_length().into()],
        }
    }

    /// Values at the Lobatto nodes `domain.lobatto_nodes(values.len() - 1)`.
    /// The result is the interpolant with noise-level tail coefficients removed.
    pub fn from_node_values(domain: DomainSpec, values: &[Complex64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDomain("no sample values".into()));
        }
        let coeffs = chop(cheb_coeffs(values), &domain);
        Ok(AnalyticScalar { domain, coeffs })
    }

    /// Adaptive fit of `f` sampled at real points of `I`. The degree doubles
    /// until the trailing coefficients drop below the fit tolerance.
    pub fn fit<F>(domain: DomainSpec, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut n = 16;
        loop {
            let values: Vec<Complex64> = domain.lobatto_nodes(n).into_iter().map(&f).collect();
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonResolvable {
                    max_degree: domain.fit.max_degree,
                });
            }
            let coeffs = cheb_coeffs(&values);
            if resolved(&coeffs, domain.fit.tol) {
                return Ok(AnalyticScalar {
                    domain,
                    coeffs: chop(coeffs, &domain),
                });
            }
            n *= 2;
            if n > domain.fit.max_degree {
                return Err(Error::NonResolvable {
                    max_degree: domain.fit.max_degree,
                });
            }
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Value at `w`, rejecting points outside the closed ellipse.
    pub fn evaluate(&self, w: Complex64) -> Result<Complex64> {
        if !self.domain.contains(w, 1e-9) {
            return Err(Error::OutOfDomain { re: w.re, im: w.im });
        }
        Ok(self.eval(w))
    }

    /// Value at `w` without the domain check (Clenshaw recurrence).
    pub fn eval(&self, w: Complex64) -> Complex64 {
        clenshaw(&self.coeffs, self.domain.to_unit(w))
    }

    pub fn eval_real(&self, u: f64) -> Complex64 {
        self.eval(Complex64::new(u, 0.0))
    }

    fn check_same(&self, other: &AnalyticScalar) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &AnalyticScalar) -> Result<Self> {
        self.check_same(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or_default()
                    + other.coeffs.get(k).copied().unwrap_or_default()
            })
            .collect();
        Ok(AnalyticScalar {
            domain: self.domain,
            coeffs,
        })
    }

    pub fn sub(&self, other: &AnalyticScalar) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        AnalyticScalar {
            domain: self.domain,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_constant(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Multiplication by `i`.
    pub fn times_i(&self) -> Self {
        self.scale(I)
    }

    /// Product, computed exactly in node space at the product degree.
    pub fn mul(&self, other: &AnalyticScalar) -> Result<Self> {
        self.check_same(other)?;
        let n = (self.degree() + other.degree()).max(1);
        let values: Vec<Complex64> = self
            .domain
            .lobatto_nodes(n)
            .into_iter()
            .map(|u| self.eval_real(u) * other.eval_real(u))
            .collect();
        Self::from_node_values(self.domain, &values)
    }

    /// Pointwise image `w -> g(f(w))` for a holomorphic `g`, refit adaptively.
    pub fn map<G>(&self, g: G) -> Result<Self>
    where
        G: Fn(Complex64) -> Complex64,
    {
        Self::fit(self.domain, |u| g(self.eval_real(u)))
    }

    pub fn recip(&self) -> Result<Self> {
        let inf = self.inf_modulus();
        if inf <= 1e-300 {
            return Err(Error::ZeroOnDomain { inf_modulus: inf });
        }
        self.map(|v| 1.0 / v)
    }

    pub fn div(&self, other: &AnalyticScalar) -> Result<Self> {
        self.check_same(other)?;
        let inf = other.inf_modulus();
        if inf <= 1e-300 {
            return Err(Error::ZeroOnDomain { inf_modulus: inf });
        }
        Self::fit(self.domain, |u| self.eval_real(u) / other.eval_real(u))
    }

    pub fn derivative(&self) -> Self {
        let c = &self.coeffs;
        let n = c.len() - 1;
        if n == 0 {
            return Self::zero(self.domain);
        }
        let mut d = vec![Complex64::default(); n + 1];
        for k in (1..=n).rev() {
            d[k - 1] = d.get(k + 1).copied().unwrap_or_default() + c[k] * (2.0 * k as f64);
        }
        d[0] *= 0.5;
        d.truncate(n);
        let s = 1.0 / self.domain.half_length();
        AnalyticScalar {
            domain: self.domain,
            coeffs: d.into_iter().map(|v| v * s).collect(),
        }
    }

    /// Antiderivative vanishing at `u0`. The domain is convex, so this is the
    /// path-independent integral from `u0` to `w`.
    pub fn antiderivative(&self, u0: f64) -> Result<Self> {
        if !self.domain.contains_real(u0) {
            return Err(Error::OutOfDomain { re: u0, im: 0.0 });
        }
        let c = &self.coeffs;
        let n = c.len();
        let at = |k: usize| c.get(k).copied().unwrap_or_default();
        let mut out = vec![Complex64::default(); n + 1];
        out[1] = at(0) - 0.5 * at(2);
        for (k, o) in out.iter_mut().enumerate().skip(2) {
            *o = (at(k - 1) - at(k + 1)) / (2.0 * k as f64);
        }
        let h = self.domain.half_length();
        for v in out.iter_mut() {
            *v *= h;
        }
        let mut f = AnalyticScalar {
            domain: self.domain,
            coeffs: out,
        };
        let shift = f.eval_real(u0);
        f.coeffs[0] -= shift;
        Ok(f)
    }

    /// `w -> self(inner(w))`. The inner function must map the closed ellipse
    /// into the ellipse enlarged by `slack`.
    pub fn compose_with_slack(&self, inner: &AnalyticScalar, slack: f64) -> Result<Self> {
        self.check_same(inner)?;
        inner.check_range(slack)?;
        Self::fit(self.domain, |u| self.eval(inner.eval_real(u)))
    }

    pub fn compose(&self, inner: &AnalyticScalar) -> Result<Self> {
        self.compose_with_slack(inner, COMPOSE_SLACK)
    }

    /// Largest elliptic radius attained on the boundary and interval samples.
    pub fn range_radius(&self) -> f64 {
        self.domain
            .boundary_points()
            .into_iter()
            .map(|w| self.eval(w))
            .chain(
                self.domain
                    .check_nodes()
                    .into_iter()
                    .map(|u| self.eval_real(u)),
            )
            .map(|v| self.domain.elliptic_radius(v))
            .fold(0.0, f64::max)
    }

    /// Fails with `RangeEscape` when the image leaves the slack-enlarged ellipse.
    pub fn check_range(&self, slack: f64) -> Result<()> {
        let radius = self.range_radius();
        let allowed = self.domain.rho * (1.0 + slack);
        if !(radius <= allowed) {
            return Err(Error::RangeEscape { radius, allowed });
        }
        Ok(())
    }

    /// Analytic extension of `u -> Re f(u)` from `I`. Chebyshev polynomials
    /// are real on `I`, so this keeps the real part of every coefficient.
    pub fn real_on_interval(&self) -> Self {
        AnalyticScalar {
            domain: self.domain,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex64::new(c.re, 0.0))
                .collect(),
        }
    }

    /// Analytic extension of `u -> Im f(u)` from `I`.
    pub fn imag_on_interval(&self) -> Self {
        AnalyticScalar {
            domain: self.domain,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex64::new(c.im, 0.0))
                .collect(),
        }
    }

    /// Largest `|Im f(u)|` over the check nodes of `I`.
    pub fn max_imag_on_interval(&self) -> f64 {
        self.domain
            .check_nodes()
            .into_iter()
            .map(|u| self.eval_real(u).im.abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|f(u)|` over the check nodes of `I`.
    pub fn max_abs_on_interval(&self) -> f64 {
        self.domain
            .check_nodes()
            .into_iter()
            .map(|u| self.eval_real(u).norm())
            .fold(0.0, f64::max)
    }

    /// Sup of `|f|` over the closed ellipse, estimated on the boundary (maximum
    /// modulus principle) together with the interval nodes.
    pub fn sup_norm(&self) -> f64 {
        self.domain
            .boundary_points()
            .into_iter()
            .map(|w| self.eval(w).norm())
            .chain(
                self.domain
                    .check_nodes()
                    .into_iter()
                    .map(|u| self.eval_real(u).norm()),
            )
            .fold(0.0, f64::max)
    }

    /// Estimate of `inf |f|` over the closed ellipse from the boundary, an
    /// interior elliptic grid and the interval nodes. Not a certified bound.
    pub fn inf_modulus(&self) -> f64 {
        self.domain
            .boundary_points()
            .into_iter()
            .chain(self.domain.interior_grid())
            .map(|w| self.eval(w).norm())
            .chain(
                self.domain
                    .check_nodes()
                    .into_iter()
                    .map(|u| self.eval_real(u).norm()),
            )
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest coefficient difference, padding the shorter series with zeros.
    pub fn coeff_distance(&self, other: &AnalyticScalar) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| {
                (self.coeffs.get(k).copied().unwrap_or_default()
                    - other.coeffs.get(k).copied().unwrap_or_default())
                .norm()
            })
            .fold(0.0, f64::max)
    }
}

fn clenshaw(c: &[Complex64], x: Complex64) -> Complex64 {
    let mut b1 = Complex64::default();
    let mut b2 = Complex64::default();
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

/// Chebyshev coefficients of the interpolant through values at
/// `x_j = cos(pi j / n)`, `j = 0..=n` (type-I DCT).
fn cheb_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len() - 1;
    if n == 0 {
        return values.to_vec();
    }
    let table: Vec<f64> = (0..2 * n)
        .map(|m| (PI * m as f64 / n as f64).cos())
        .collect();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = Complex64::default();
        for (j, v) in values.iter().enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            acc += v * (w * table[(j * k) % (2 * n)]);
        }
        let scale = if k == 0 || k == n { 1.0 } else { 2.0 } / n as f64;
        out.push(acc * scale);
    }
    out
}

fn resolved(coeffs: &[Complex64], tol: f64) -> bool {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return true;
    }
    let tail = (coeffs.len() / 8).max(3).min(coeffs.len());
    coeffs[coeffs.len() - tail..]
        .iter()
        .all(|c| c.norm() <= tol * scale)
}

/// Drop trailing coefficients that are negligible on the whole closed ellipse
/// (`|c_n| rho^n` below tolerance) or sit at the rounding-noise floor.
fn chop(mut coeffs: Vec<Complex64>, domain: &DomainSpec) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return vec![Complex64::default()];
    }
    while coeffs.len() > 1 {
        let n = coeffs.len() - 1;
        let thresh = (domain.fit.tol * domain.rho.powi(-(n as i32))).max(NOISE_REL) * scale;
        if coeffs[n].norm() > thresh {
            break;
        }
        coeffs.pop();
    }
    coeffs
}
