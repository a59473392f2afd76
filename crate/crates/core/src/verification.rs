//! Independent checks on produced surfaces: isotropy of the curve, discrete
//! conformality and harmonicity of `X = Re f`, the two interpolation
//! identities, and comparison with classical Björling solutions.

use std::str::FromStr;

use num_complex::Complex64;

use crate::analytic::{AnalyticCurve3, AnalyticScalar, DomainSpec};
use crate::bjorling::IsotropicCurve;
use crate::error::{Error, Result};
use crate::solver::{along_gamma_residual, on_interval_residual, InterpolationResult};

/// Finite-difference residuals below this are treated as roundoff.
pub const FD_NOISE_FLOOR: f64 = 1e-11;

/// `X(u, v) = Re f(u + iv)` sampled on a rectangle inside the domain.
/// `points[iu * nv + iv]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGrid {
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub nu: usize,
    pub nv: usize,
    pub points: Vec<[f64; 3]>,
}

impl SurfaceGrid {
    /// `|u - mid| <= 0.75 A`, `|v| <= 0.6 B` for semi-axes `A`, `B`.
    pub fn default_ranges(domain: &DomainSpec) -> ((f64, f64), (f64, f64)) {
        let (major, minor) = domain.semi_axes();
        let mid = domain.midpoint();
        (
            (mid - 0.75 * major, mid + 0.75 * major),
            (-0.6 * minor, 0.6 * minor),
        )
    }

    pub fn sample(
        f: &AnalyticCurve3,
        u_range: (f64, f64),
        v_range: (f64, f64),
        nu: usize,
        nv: usize,
    ) -> Result<Self> {
        if nu < 2 || nv < 2 || !(u_range.0 < u_range.1) || !(v_range.0 < v_range.1) {
            return Err(Error::Verification(format!(
                "degenerate grid {nu}x{nv} on {u_range:?} x {v_range:?}"
            )));
        }
        let domain = f.domain();
        for (u, v) in [
            (u_range.0, v_range.0),
            (u_range.0, v_range.1),
            (u_range.1, v_range.0),
            (u_range.1, v_range.1),
        ] {
            if !domain.contains(Complex64::new(u, v), 0.0) {
                return Err(Error::OutOfDomain { re: u, im: v });
            }
        }
        let mut points = Vec::with_capacity(nu * nv);
        for iu in 0..nu {
            let u = lerp(u_range, iu, nu);
            for iv in 0..nv {
                let v = lerp(v_range, iv, nv);
                points.push(f.eval(Complex64::new(u, v)).map(|z| z.re));
            }
        }
        Ok(SurfaceGrid {
            u_range,
            v_range,
            nu,
            nv,
            points,
        })
    }

    /// Sample over [`SurfaceGrid::default_ranges`].
    pub fn sample_default(f: &AnalyticCurve3, nu: usize, nv: usize) -> Result<Self> {
        let (ur, vr) = Self::default_ranges(f.domain());
        Self::sample(f, ur, vr, nu, nv)
    }

    pub fn at(&self, iu: usize, iv: usize) -> [f64; 3] {
        self.points[iu * self.nv + iv]
    }

    pub fn u(&self, iu: usize) -> f64 {
        lerp(self.u_range, iu, self.nu)
    }

    pub fn v(&self, iv: usize) -> f64 {
        lerp(self.v_range, iv, self.nv)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.u_range.1 - self.u_range.0) / (self.nu - 1) as f64,
            (self.v_range.1 - self.v_range.0) / (self.nv - 1) as f64,
        )
    }
}

fn lerp(range: (f64, f64), i: usize, n: usize) -> f64 {
    range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `sup |dot(f', f')|` over the check nodes and the boundary samples.
pub fn isotropy_residual(f: &IsotropicCurve) -> f64 {
    let fp = f.f.derivative();
    let domain = *f.f.domain();
    let at = |w: Complex64| {
        let d = fp.eval(w);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).norm()
    };
    domain
        .check_nodes()
        .into_iter()
        .map(|u| Complex64::new(u, 0.0))
        .chain(domain.boundary_points())
        .map(at)
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceResiduals {
    /// `max |X_uu + X_vv|`.
    pub harmonicity: f64,
    /// `max ||X_u|^2 - |X_v|^2|`.
    pub conformality_diag: f64,
    /// `max |<X_u, X_v>|`.
    pub conformality_cross: f64,
}

impl SurfaceResiduals {
    pub fn as_array(&self) -> [f64; 3] {
        [
            self.harmonicity,
            self.conformality_diag,
            self.conformality_cross,
        ]
    }
}

/// Central differences over the interior grid points.
pub fn surface_checks(g: &SurfaceGrid) -> SurfaceResiduals {
    let (hu, hv) = g.spacing();
    let mut r = SurfaceResiduals {
        harmonicity: 0.0,
        conformality_diag: 0.0,
        conformality_cross: 0.0,
    };
    for iu in 1..g.nu.saturating_sub(1) {
        for iv in 1..g.nv.saturating_sub(1) {
            let c = g.at(iu, iv);
            let (e, w) = (g.at(iu + 1, iv), g.at(iu - 1, iv));
            let (n, s) = (g.at(iu, iv + 1), g.at(iu, iv - 1));
            let mut lap = 0.0f64;
            for m in 0..3 {
                let x =
                    (e[m] - 2.0 * c[m] + w[m]) / (hu * hu) + (n[m] - 2.0 * c[m] + s[m]) / (hv * hv);
                lap = lap.max(x.abs());
            }
            let xu = sub(e, w).map(|x| x / (2.0 * hu));
            let xv = sub(n, s).map(|x| x / (2.0 * hv));
            r.harmonicity = r.harmonicity.max(lap);
            r.conformality_diag = r.conformality_diag.max((dot(xu, xu) - dot(xv, xv)).abs());
            r.conformality_cross = r.conformality_cross.max(dot(xu, xv).abs());
        }
    }
    r
}

/// Observed order of each residual of [`surface_checks`] between the grid
/// `nu x nv` and its refinement with half the spacing. `None` marks a
/// residual already at roundoff on the coarse grid.
pub fn surface_check_orders(
    f: &AnalyticCurve3,
    u_range: (f64, f64),
    v_range: (f64, f64),
    nu: usize,
    nv: usize,
) -> Result<[Option<f64>; 3]> {
    let coarse = surface_checks(&SurfaceGrid::sample(f, u_range, v_range, nu, nv)?).as_array();
    let fine = surface_checks(&SurfaceGrid::sample(
        f,
        u_range,
        v_range,
        2 * nu - 1,
        2 * nv - 1,
    )?)
    .as_array();
    Ok([0, 1, 2].map(|m| {
        if coarse[m] < FD_NOISE_FLOOR {
            None
        } else {
            Some((coarse[m] / fine[m].max(f64::MIN_POSITIVE)).log2())
        }
    }))
}

/// Rough mean curvature `max |H|` from the first and second fundamental forms.
pub fn mean_curvature_max(g: &SurfaceGrid) -> f64 {
    let (hu, hv) = g.spacing();
    let mut worst = 0.0f64;
    for iu in 1..g.nu.saturating_sub(1) {
        for iv in 1..g.nv.saturating_sub(1) {
            let c = g.at(iu, iv);
            let xu = sub(g.at(iu + 1, iv), g.at(iu - 1, iv)).map(|x| x / (2.0 * hu));
            let xv = sub(g.at(iu, iv + 1), g.at(iu, iv - 1)).map(|x| x / (2.0 * hv));
            let xuu: [f64; 3] = std::array::from_fn(|m| {
                (g.at(iu + 1, iv)[m] - 2.0 * c[m] + g.at(iu - 1, iv)[m]) / (hu * hu)
            });
            let xvv: [f64; 3] = std::array::from_fn(|m| {
                (g.at(iu, iv + 1)[m] - 2.0 * c[m] + g.at(iu, iv - 1)[m]) / (hv * hv)
            });
            let xuv: [f64; 3] = std::array::from_fn(|m| {
                (g.at(iu + 1, iv + 1)[m] - g.at(iu + 1, iv - 1)[m] - g.at(iu - 1, iv + 1)[m]
                    + g.at(iu - 1, iv - 1)[m])
                    / (4.0 * hu * hv)
            });
            let nrm = [
                xu[1] * xv[2] - xu[2] * xv[1],
                xu[2] * xv[0] - xu[0] * xv[2],
                xu[0] * xv[1] - xu[1] * xv[0],
            ];
            let len = dot(nrm, nrm).sqrt();
            if len == 0.0 {
                continue;
            }
            let nn = nrm.map(|x| x / len);
            let (e, f, gg) = (dot(xu, xu), dot(xu, xv), dot(xv, xv));
            let (l, m, n) = (dot(xuu, nn), dot(xuv, nn), dot(xvv, nn));
            let h = (l * gg - 2.0 * m * f + n * e) / (2.0 * (e * gg - f * f));
            worst = worst.max(h.abs());
        }
    }
    worst
}

/// `(sup_I |Re f(u) - a(u)|, sup_I |Re f(gamma(u)) - (l(u) + v0)|)`.
pub fn interpolation_residuals(
    res: &InterpolationResult,
    a: &AnalyticCurve3,
    l: &AnalyticCurve3,
) -> (f64, f64) {
    (
        on_interval_residual(&res.surface.f, a),
        along_gamma_residual(&res.surface.f, &res.gamma, l, res.v0),
    )
}

/// Same pair as [`interpolation_residuals`], from the raw pieces.
pub fn residuals_from_parts(
    surface: &AnalyticCurve3,
    gamma: &AnalyticScalar,
    a: &AnalyticCurve3,
    l: &AnalyticCurve3,
    v0: [f64; 3],
) -> (f64, f64) {
    (
        on_interval_residual(surface, a),
        along_gamma_residual(surface, gamma, l, v0),
    )
}

/// Classical surfaces with closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceSurface {
    /// `(u, v, 0)`: the line `(u, 0, 0)` with normal `(0, 0, 1)`.
    Plane,
    /// `(cos u cosh v, sin u cosh v, -v)`: the unit circle with inward normal.
    Catenoid,
    /// `(sin u sinh v, -cos u sinh v, u)`: the `z` axis with normal `(cos u, sin u, 0)`.
    Helicoid,
}

impl ReferenceSurface {
    pub fn point(&self, u: f64, v: f64) -> [f64; 3] {
        match self {
            ReferenceSurface::Plane => [u, v, 0.0],
            ReferenceSurface::Catenoid => [u.cos() * v.cosh(), u.sin() * v.cosh(), -v],
            ReferenceSurface::Helicoid => [u.sin() * v.sinh(), -u.cos() * v.sinh(), u],
        }
    }
}

impl FromStr for ReferenceSurface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane" => Ok(ReferenceSurface::Plane),
            "catenoid" => Ok(ReferenceSurface::Catenoid),
            "helicoid" => Ok(ReferenceSurface::Helicoid),
            other => Err(Error::UnknownReference(other.to_string())),
        }
    }
}

/// `sup |X - X_ref|` over the grid.
pub fn compare_closed_form(g: &SurfaceGrid, reference: &str) -> Result<f64> {
    let r: ReferenceSurface = reference.parse()?;
    let mut worst = 0.0f64;
    for iu in 0..g.nu {
        for iv in 0..g.nv {
            let want = r.point(g.u(iu), g.v(iv));
            let got = g.at(iu, iv);
            for m in 0..3 {
                worst = worst.max((got[m] - want[m]).abs());
            }
        }
    }
    Ok(worst)
}
