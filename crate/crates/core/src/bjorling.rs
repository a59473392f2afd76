//! Schwartz's solution of the Björling problem and the base isotropic curve.

use num_complex::Complex64;

use crate::analytic::{AnalyticCurve3, AnalyticScalar};
use crate::error::{Error, Result};
use crate::normal_field::{NormalFieldPack, CONDITION_MARGIN};

/// Threshold on the normal-field preconditions of [`schwartz_solve`].
pub const NORMAL_TOL: f64 = 1e-7;

/// Largest modulus of `f` over the check nodes on `I`.
pub(crate) fn node_max(f: &AnalyticScalar) -> f64 {
    f.max_abs_on_interval()
}

/// Holomorphic `f` with `dot(f', f') = 0`; `Re f` is a minimal surface.
#[derive(Clone, Debug)]
pub struct IsotropicCurve {
    pub f: AnalyticCurve3,
    pub anchor_u0: f64,
}

impl IsotropicCurve {
    /// Wraps `f` without checking isotropy.
    pub fn new_unchecked(f: AnalyticCurve3, anchor_u0: f64) -> Self {
        IsotropicCurve { f, anchor_u0 }
    }

    /// Node residual of `dot(f', f')`, relative to `sup |f'|^2`.
    pub fn relative_node_residual(&self) -> Result<f64> {
        let fp = self.f.derivative();
        let scale = fp.sup_norm().powi(2).max(f64::MIN_POSITIVE);
        Ok(node_max(&fp.dot(&fp)?) / scale)
    }

    /// `Re f(u + iv)`.
    pub fn surface_point(&self, u: f64, v: f64) -> [f64; 3] {
        self.f.eval(Complex64::new(u, v)).map(|z| z.re)
    }
}

/// `f = a - i int_{u0}^w n x a'`, the isotropic curve whose real part is the
/// minimal surface through `a` with normal `n` along it.
pub fn schwartz_solve(a: &AnalyticCurve3, n: &AnalyticCurve3, u0: f64) -> Result<IsotropicCurve> {
    if !a.domain().contains_real(u0) {
        return Err(Error::OutOfDomain { re: u0, im: 0.0 });
    }
    let ap = a.derivative();
    let unit = node_max(&n.dot(n)?.add_constant(Complex64::new(-1.0, 0.0)));
    if !(unit <= NORMAL_TOL) {
        return Err(Error::NotUnitNormal { residual: unit });
    }
    let orth = node_max(&n.dot(&ap)?);
    if !(orth <= NORMAL_TOL * ap.sup_norm().max(1.0)) {
        return Err(Error::NotOrthogonal { residual: orth });
    }
    let d = n.cross(&ap)?.antiderivative(u0)?;
    Ok(IsotropicCurve {
        f: a.sub(&d.times_i())?,
        anchor_u0: u0,
    })
}

/// Base point `(gamma0, d0) = (id, d0)` of the solve and everything frozen there.
#[derive(Clone, Debug)]
pub struct BaseDatum {
    pub a: AnalyticCurve3,
    pub nf: NormalFieldPack,
    pub d0: AnalyticCurve3,
    pub a0: IsotropicCurve,
    /// `a_j' d0_i' - a_i' d0_j'` for the pack's `(i, j)`.
    pub denom: AnalyticScalar,
    pub a_prime: AnalyticCurve3,
    pub d0_prime: AnalyticCurve3,
    pub(crate) inv_denom: AnalyticScalar,
    /// `a_m' - i d0_m'`, i.e. `a0'`.
    pub(crate) g: AnalyticCurve3,
}

impl BaseDatum {
    pub fn anchor_u0(&self) -> f64 {
        self.a0.anchor_u0
    }
}

pub fn build_base(a: &AnalyticCurve3, nf: &NormalFieldPack, u0: f64) -> Result<BaseDatum> {
    let a0 = schwartz_solve(a, &nf.n0, u0)?;
    let d0 = nf.n0.cross(&a.derivative())?.antiderivative(u0)?;
    let a_prime = a.derivative();
    let d0_prime = d0.derivative();
    let (i, j) = (nf.perm.i(), nf.perm.j());
    let denom = a_prime
        .component(j)
        .mul(d0_prime.component(i))?
        .sub(&a_prime.component(i).mul(d0_prime.component(j))?)?;
    let inf = denom.inf_modulus();
    if !(inf > CONDITION_MARGIN) {
        return Err(Error::DenominatorVanishes { inf_modulus: inf });
    }
    let inv_denom = denom.recip()?;
    let g = a_prime.sub(&d0_prime.times_i())?;
    Ok(BaseDatum {
        a: a.clone(),
        nf: nf.clone(),
        d0,
        a0,
        denom,
        a_prime,
        d0_prime,
        inv_denom,
        g,
    })
}
