use num_complex::Complex64;

use super::domain::DomainSpec;
use super::scalar::AnalyticScalar;
use crate::error::{Error, Result};

/// Holomorphic map from the closed domain into `C^3`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticCurve3 {
    components: [AnalyticScalar; 3],
}

impl AnalyticCurve3 {
    pub fn new(components: [AnalyticScalar; 3]) -> Result<Self> {
        let d = components[0].domain();
        if components.iter().any(|c| c.domain() != d) {
            return Err(Error::DomainMismatch);
        }
        Ok(AnalyticCurve3 { components })
    }

    pub fn constant(domain: DomainSpec, v: [Complex64; 3]) -> Self {
        AnalyticCurve3 {
            components: v.map(|c| AnalyticScalar::constant(domain, c)),
        }
    }

    pub fn zero(domain: DomainSpec) -> Self {
        Self::constant(domain, [Complex64::default(); 3])
    }

    /// Adaptive fit of each component of `f` from samples on `I`.
    pub fn fit<F>(domain: DomainSpec, f: F) -> Result<Self>
    where
        F: Fn(f64) -> [Complex64; 3],
    {
        Ok(AnalyticCurve3 {
            components: [
                AnalyticScalar::fit(domain, |u| f(u)[0])?,
                AnalyticScalar::fit(domain, |u| f(u)[1])?,
                AnalyticScalar::fit(domain, |u| f(u)[2])?,
            ],
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        self.components[0].domain()
    }

    pub fn components(&self) -> &[AnalyticScalar; 3] {
        &self.components
    }

    pub fn component(&self, m: usize) -> &AnalyticScalar {
        &self.components[m]
    }

    pub fn into_components(self) -> [AnalyticScalar; 3] {
        self.components
    }

    pub fn with_component(&self, m: usize, value: AnalyticScalar) -> Result<Self> {
        let mut components = self.components.clone();
        components[m] = value;
        Self::new(components)
    }

    pub fn eval(&self, w: Complex64) -> [Complex64; 3] {
        [
            self.components[0].eval(w),
            self.components[1].eval(w),
            self.components[2].eval(w),
        ]
    }

    pub fn eval_real(&self, u: f64) -> [Complex64; 3] {
        self.eval(Complex64::new(u, 0.0))
    }

    fn zip_with<F>(&self, other: &AnalyticCurve3, f: F) -> Result<Self>
    where
        F: Fn(&AnalyticScalar, &AnalyticScalar) -> Result<AnalyticScalar>,
    {
        Self::new([
            f(&self.components[0], &other.components[0])?,
            f(&self.components[1], &other.components[1])?,
            f(&self.components[2], &other.components[2])?,
        ])
    }

    fn map_each<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&AnalyticScalar) -> Result<AnalyticScalar>,
    {
        Self::new([
            f(&self.components[0])?,
            f(&self.components[1])?,
            f(&self.components[2])?,
        ])
    }

    pub fn add(&self, other: &AnalyticCurve3) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &AnalyticCurve3) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        AnalyticCurve3 {
            components: [
                self.components[0].scale(s),
                self.components[1].scale(s),
                self.components[2].scale(s),
            ],
        }
    }

    pub fn times_i(&self) -> Self {
        self.scale(Complex64::new(0.0, 1.0))
    }

    /// Componentwise product with a scalar function.
    pub fn mul_scalar(&self, s: &AnalyticScalar) -> Result<Self> {
        self.map_each(|c| c.mul(s))
    }

    pub fn derivative(&self) -> Self {
        AnalyticCurve3 {
            components: [
                self.components[0].derivative(),
                self.components[1].derivative(),
                self.components[2].derivative(),
            ],
        }
    }

    pub fn antiderivative(&self, u0: f64) -> Result<Self> {
        self.map_each(|c| c.antiderivative(u0))
    }

    /// `w -> self(inner(w))` componentwise.
    pub fn compose_with_slack(&self, inner: &AnalyticScalar, slack: f64) -> Result<Self> {
        inner.check_range(slack)?;
        self.map_each(|c| c.compose_with_slack(inner, slack))
    }

    /// Complex-bilinear dot product (no conjugation).
    pub fn dot(&self, other: &AnalyticCurve3) -> Result<AnalyticScalar> {
        let mut acc = self.components[0].mul(&other.components[0])?;
        for m in 1..3 {
            acc = acc.add(&self.components[m].mul(&other.components[m])?)?;
        }
        Ok(acc)
    }

    pub fn cross(&self, other: &AnalyticCurve3) -> Result<Self> {
        let (u, v) = (&self.components, &other.components);
        let term = |a: usize, b: usize| -> Result<AnalyticScalar> {
            u[a].mul(&v[b])?.sub(&u[b].mul(&v[a])?)
        };
        Self::new([term(1, 2)?, term(2, 0)?, term(0, 1)?])
    }

    /// Norm `max_j sup |f_j|` over the closed domain.
    pub fn sup_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.sup_norm())
            .fold(0.0, f64::max)
    }

    pub fn real_on_interval(&self) -> Self {
        AnalyticCurve3 {
            components: [
                self.components[0].real_on_interval(),
                self.components[1].real_on_interval(),
                self.components[2].real_on_interval(),
            ],
        }
    }

    pub fn max_imag_on_interval(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.max_imag_on_interval())
            .fold(0.0, f64::max)
    }

    pub fn coeff_distance(&self, other: &AnalyticCurve3) -> f64 {
        (0..3)
            .map(|m| self.components[m].coeff_distance(&other.components[m]))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_cross_and_bilinear_dot() {
        let d = DomainSpec::new(-1.0, 1.0, 1.2).unwrap();
        let e1 = AnalyticCurve3::constant(d, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e2 = AnalyticCurve3::constant(d, [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let e3 = e1.cross(&e2).unwrap();
        let v = e3.eval_real(0.1);
        assert!((v[0]).norm() < 1e-16 && (v[1]).norm() < 1e-16 && (v[2] - 1.0).norm() < 1e-16);

        let null = AnalyticCurve3::constant(d, [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(null.dot(&null).unwrap().sup_norm() < 1e-16);
    }

    #[test]
    fn catenoid_curve_is_isotropic() {
        let d = DomainSpec::new(-0.8, 0.8, 1.2).unwrap();
        let f = AnalyticCurve3::fit(d, |u| [u.cos().into(), u.sin().into(), c(0.0, u)]).unwrap();
        let fp = f.derivative();
        assert!(fp.dot(&fp).unwrap().sup_norm() < 1e-10);
    }
}
