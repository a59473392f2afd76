//! Explicit closeness radius `eta` for the nearby curve, and an empirical
//! probe for the radius `eps0` of the neighbourhood where the solve succeeds.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::AnalyticCurve3;
use crate::bjorling::{BaseDatum, IsotropicCurve};
use crate::error::{Error, Result};
use crate::normal_field::NormalFieldPack;
use crate::solver::{chord_newton, SolverConfig};

pub const DEFAULT_SAFETY: f64 = 0.9;

const BISECT_REL_TOL: f64 = 1e-12;

/// `x / y`, read as `+inf` when `y` vanishes.
fn ratio(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        f64::INFINITY
    } else {
        x / y
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    /// `sup |a'|` over the closed domain.
    pub m: f64,
    /// Diameter of the closed domain.
    pub r: f64,
    pub tau: f64,
    pub m1: f64,
    pub m2: f64,
    pub mc: f64,
    pub ms: f64,
    pub epsilon0: f64,
    pub safety: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon1: f64,
    pub eta: f64,
}

/// One inequality of the recipe: `lhs < rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs < self.rhs
    }
}

impl BoundsReport {
    /// `P(t) = (2M + t^2)(1 + (Mc + Ms)^2)`.
    pub fn p(&self, t: f64) -> f64 {
        (2.0 * self.m + t * t) * (1.0 + (self.mc + self.ms).powi(2))
    }

    fn epsilon1_cap(&self) -> f64 {
        ratio(self.tau * self.tau * self.epsilon, 4.0 * self.mc * self.m1).min(self.epsilon)
    }

    pub fn checks(&self) -> Vec<BoundCheck> {
        let e1sq = self.epsilon1 * self.epsilon1;
        vec![
            BoundCheck {
                name: "epsilon",
                lhs: self.epsilon,
                rhs: ratio(self.epsilon0, 4.0 * (self.m + 2.0) * self.r).min(1.0),
            },
            BoundCheck {
                name: "delta",
                lhs: self.delta,
                rhs: ratio(self.epsilon * self.tau.powi(3), 4.0 * self.m2)
                    .min(0.5 * self.tau * self.tau),
            },
            BoundCheck {
                name: "epsilon1_poly",
                lhs: e1sq * self.p(self.epsilon1),
                rhs: self.delta,
            },
            BoundCheck {
                name: "epsilon1_cap",
                lhs: e1sq,
                rhs: self.epsilon1_cap(),
            },
            BoundCheck {
                name: "eta",
                lhs: self.eta,
                rhs: (0.5 * self.epsilon0).min(e1sq) * (1.0 + f64::EPSILON),
            },
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.checks().iter().all(BoundCheck::holds)
    }
}

/// Follows the recipe: `eps`, then `delta`, then the largest `eps1` found by
/// bisection, then `eta = min(eps0 / 2, eps1^2)`.
pub fn compute_eta(
    nf: &NormalFieldPack,
    a: &AnalyticCurve3,
    epsilon0: f64,
    safety: f64,
) -> Result<BoundsReport> {
    if !(epsilon0 > 0.0 && epsilon0.is_finite()) {
        return Err(Error::DegenerateConstants(format!(
            "epsilon0 = {epsilon0} must be positive"
        )));
    }
    if !(safety > 0.0 && safety < 1.0) {
        return Err(Error::DegenerateConstants(format!(
            "safety = {safety} must lie in (0, 1)"
        )));
    }
    let mut rep = BoundsReport {
        m: a.derivative().sup_norm(),
        r: a.domain().diameter,
        tau: nf.tau,
        m1: nf.m1,
        m2: nf.m2,
        mc: nf.mc,
        ms: nf.ms,
        epsilon0,
        safety,
        epsilon: 0.0,
        delta: 0.0,
        epsilon1: 0.0,
        eta: 0.0,
    };
    let consts = [rep.m, rep.r, rep.tau, rep.m1, rep.m2, rep.mc, rep.ms];
    if !(rep.tau > 0.0) || consts.iter().any(|c| !c.is_finite()) {
        return Err(Error::DegenerateConstants(format!(
            "tau = {}, constants {consts:?}",
            rep.tau
        )));
    }
    rep.epsilon = safety * ratio(epsilon0, 4.0 * (rep.m + 2.0) * rep.r).min(1.0);
    rep.delta =
        safety * ratio(rep.epsilon * rep.tau.powi(3), 4.0 * rep.m2).min(0.5 * rep.tau * rep.tau);

    let cap = rep.epsilon1_cap();
    let ok = |t: f64| t * t * rep.p(t) < rep.delta && t * t < cap;
    let (mut lo, mut hi) = (0.0, cap.sqrt());
    while hi - lo > BISECT_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !(lo > 0.0) {
        return Err(Error::DegenerateConstants("epsilon1 collapsed to 0".into()));
    }
    rep.epsilon1 = lo;
    rep.eta = (0.5 * epsilon0).min(lo * lo);
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct ProbeConfig {
    /// Perturbation direction; `None` means the constant `(1, 1, 1)`.
    pub direction: Option<AnalyticCurve3>,
    /// Largest magnitude tried.
    pub s_max: f64,
    /// Bisection stops when the bracket is this small relative to its top.
    pub bisect_tol: f64,
    pub solver: SolverConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            direction: None,
            s_max: 1.0,
            bisect_tol: 1e-3,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOutcome {
    pub epsilon0: f64,
    /// Even the smallest magnitude tried failed.
    pub flagged: bool,
}

/// Largest `s` (up to the bisection resolution) for which the solve of
/// `F = a0 + s direction` converges. An estimate, not a certificate.
pub fn probe_epsilon0(base: &BaseDatum, cfg: &ProbeConfig) -> ProbeOutcome {
    let domain = *base.a.domain();
    let one = Complex64::new(1.0, 0.0);
    let direction = cfg
        .direction
        .clone()
        .unwrap_or_else(|| AnalyticCurve3::constant(domain, [one; 3]));
    let passes = |s: f64| -> bool {
        let Ok(f) = base.a0.f.add(&direction.scale(Complex64::new(s, 0.0))) else {
            return false;
        };
        let target = IsotropicCurve::new_unchecked(f, base.anchor_u0());
        chord_newton(base, &target, &cfg.solver).is_ok()
    };
    if passes(cfg.s_max) {
        return ProbeOutcome {
            epsilon0: cfg.s_max,
            flagged: false,
        };
    }
    let (mut lo, mut hi) = (0.0, cfg.s_max);
    while hi - lo > cfg.bisect_tol * hi {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ProbeOutcome {
        epsilon0: lo,
        flagged: lo == 0.0,
    }
}
