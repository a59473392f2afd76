//! Interpolating a nearby curve: the isotropic extension `C_V` of `l`, the
//! derivative of `F(gamma, d) = (a - i d) o gamma` at `(id, d0)` with its
//! explicit inverse, the frozen-derivative Newton solve of `F = C_V`, and the
//! final translation of the free coordinate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{sqrt_branch, AnalyticCurve3, AnalyticScalar, COMPOSE_SLACK};
use crate::bjorling::{build_base, BaseDatum, IsotropicCurve};
use crate::error::{Error, Result, StageExt};
use crate::normal_field::{
    assemble_slots, construct, IndexPermutation, NormalFieldPack, CONDITION_MARGIN,
};

const MINUS_ONE: Complex64 = Complex64::new(-1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iter: usize,
    /// Target for the sup norm of `F(gamma, d) - C_V`.
    pub tol: f64,
    /// Smallest damping factor tried before giving up.
    pub min_step: f64,
    /// Allowed relative overshoot of `gamma` past the boundary ellipse.
    pub range_slack: f64,
    /// Bound on `Im d_k'` over `I` accepted by the translation step.
    pub realign_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iter: 50,
            tol: 1e-11,
            min_step: 1.0 / 1024.0,
            range_slack: COMPOSE_SLACK,
            realign_tol: 1e-7,
        }
    }
}

/// The nearby curve with its perturbed unit normal `V`.
#[derive(Clone, Debug)]
pub struct PerturbPack {
    pub l: AnalyticCurve3,
    pub b0: AnalyticScalar,
    pub b: AnalyticScalar,
    pub v: AnalyticCurve3,
}

/// Unit normal along `l` built with the angle `theta` of the base curve:
/// `(l_k' cos, l_k' sin, -(l_i' cos + l_j' sin)) / B` in slots `(i, j, k)`.
/// `printed_sign` drops the minus sign of the last entry, which gives a
/// field that is not orthogonal to `l'`; it exists only for comparison.
pub fn build_v(
    l: &AnalyticCurve3,
    nf: &NormalFieldPack,
    anchor_u0: f64,
    printed_sign: bool,
) -> Result<PerturbPack> {
    if l.domain() != nf.theta.domain() {
        return Err(Error::DomainMismatch);
    }
    let perm = nf.perm;
    let lp = l.derivative();
    let (li, lj, lk) = (
        lp.component(perm.i()),
        lp.component(perm.j()),
        lp.component(perm.k()),
    );
    let comb = li.mul(&nf.cos_theta)?.add(&lj.mul(&nf.sin_theta)?)?;
    let b0 = lk.mul(lk)?.add(&comb.mul(&comb)?)?;
    let inf = b0.inf_modulus();
    if !(inf > CONDITION_MARGIN) {
        return Err(Error::B0Vanishes { inf_modulus: inf });
    }
    let (b, _) = sqrt_branch(&b0, anchor_u0)?;
    let inv_b = b.recip()?;
    let third = if printed_sign {
        comb
    } else {
        comb.scale(MINUS_ONE)
    };
    let v = assemble_slots(
        perm,
        lk.mul(&nf.cos_theta)?.mul(&inv_b)?,
        lk.mul(&nf.sin_theta)?.mul(&inv_b)?,
        third.mul(&inv_b)?,
    )?;
    Ok(PerturbPack {
        l: l.clone(),
        b0,
        b,
        v,
    })
}

/// `C_V = l - i int_{u0}^w V x l'`.
pub fn build_cv(pp: &PerturbPack, u0: f64) -> Result<IsotropicCurve> {
    let integral = pp.v.cross(&pp.l.derivative())?.antiderivative(u0)?;
    Ok(IsotropicCurve::new_unchecked(
        pp.l.sub(&integral.times_i())?,
        u0,
    ))
}

/// `F(gamma, d) = (a - i d) o gamma`.
pub fn evaluate_f(
    base: &BaseDatum,
    gamma: &AnalyticScalar,
    d: &AnalyticCurve3,
    slack: f64,
) -> Result<AnalyticCurve3> {
    base.a.sub(&d.times_i())?.compose_with_slack(gamma, slack)
}

/// `DF(V, d) = a' V - i V d0' - i d` at `(id, d0)`.
pub fn apply_df(
    base: &BaseDatum,
    v: &AnalyticScalar,
    d: &AnalyticCurve3,
) -> Result<AnalyticCurve3> {
    if v.domain() != base.a.domain() || d.domain() != base.a.domain() {
        return Err(Error::DomainMismatch);
    }
    base.g.mul_scalar(v)?.sub(&d.times_i())
}

/// Solves `DF(V, d) = rhs` with `d_i`, `d_j` real on `I`.
pub fn apply_df_inverse(
    base: &BaseDatum,
    rhs: &AnalyticCurve3,
) -> Result<(AnalyticScalar, AnalyticCurve3)> {
    if rhs.domain() != base.a.domain() {
        return Err(Error::DomainMismatch);
    }
    let (i, j) = (base.nf.perm.i(), base.nf.perm.j());
    let ri = rhs.component(i).real_on_interval();
    let rj = rhs.component(j).real_on_interval();
    let (ai, aj) = (base.a_prime.component(i), base.a_prime.component(j));
    let (di, dj) = (base.d0_prime.component(i), base.d0_prime.component(j));
    let v1 = rj.mul(di)?.sub(&ri.mul(dj)?)?.mul(&base.inv_denom)?;
    let v2 = aj.mul(&ri)?.sub(&ai.mul(&rj)?)?.mul(&base.inv_denom)?;
    let v = v1.add(&v2.times_i())?;
    let d = rhs.sub(&base.g.mul_scalar(&v)?)?.times_i();
    // d_i and d_j are real on I up to roundoff; drop the noise
    let d = d
        .with_component(i, d.component(i).real_on_interval())?
        .with_component(j, d.component(j).real_on_interval())?;
    Ok((v, d))
}

#[derive(Clone, Debug)]
pub struct NewtonState {
    pub gamma: AnalyticScalar,
    pub d: AnalyticCurve3,
    pub residual: AnalyticCurve3,
    pub residual_norm: f64,
    pub iter: usize,
    /// Residual norm before the first step and after each accepted step.
    pub history: Vec<f64>,
}

/// Frozen-derivative Newton iteration for `(a - i d) o gamma = target`,
/// started at `(id, d0)`. Steps are halved while `gamma` leaves the domain
/// or the residual fails to decrease.
pub fn chord_newton(
    base: &BaseDatum,
    target: &IsotropicCurve,
    cfg: &SolverConfig,
) -> Result<NewtonState> {
    let domain = *base.a.domain();
    if target.f.domain() != &domain {
        return Err(Error::DomainMismatch);
    }
    let mut gamma = AnalyticScalar::identity(domain);
    let mut d = base.d0.clone();
    let mut residual = evaluate_f(base, &gamma, &d, cfg.range_slack)?.sub(&target.f)?;
    let mut norm = residual.sup_norm();
    let mut history = vec![norm];
    let mut iter = 0;
    while norm >= cfg.tol {
        if iter == cfg.max_iter {
            return Err(Error::NonConvergence {
                iterations: iter,
                residual: norm,
            });
        }
        let (dv, dd) = apply_df_inverse(base, &residual)?;
        let mut step = 1.0;
        loop {
            let s = Complex64::new(-step, 0.0);
            let cand_gamma = gamma.add(&dv.scale(s))?;
            let escaped = cand_gamma.check_range(cfg.range_slack);
            let accepted = match escaped {
                Ok(()) => {
                    let cand_d = d.add(&dd.scale(s))?;
                    let cand_res =
                        evaluate_f(base, &cand_gamma, &cand_d, cfg.range_slack)?.sub(&target.f)?;
                    let cand_norm = cand_res.sup_norm();
                    if cand_norm < norm {
                        Some((cand_gamma, cand_d, cand_res, cand_norm))
                    } else {
                        None
                    }
                }
                Err(_) => None,
            };
            if let Some((g, dn, r, n)) = accepted {
                gamma = g;
                d = dn;
                residual = r;
                norm = n;
                break;
            }
            step *= 0.5;
            if step < cfg.min_step {
                return match escaped {
                    Err(e) => Err(e),
                    Ok(()) => Err(Error::NonConvergence {
                        iterations: iter,
                        residual: norm,
                    }),
                };
            }
        }
        iter += 1;
        history.push(norm);
    }
    Ok(NewtonState {
        gamma,
        d,
        residual,
        residual_norm: norm,
        iter,
        history,
    })
}

#[derive(Clone, Debug)]
pub struct InterpolationResult {
    pub perm: IndexPermutation,
    pub gamma: AnalyticScalar,
    /// `d` with its free component shifted to vanish at the anchor.
    pub d_fixed: AnalyticCurve3,
    pub v0: [f64; 3],
    pub surface: IsotropicCurve,
    pub residual_on_i: f64,
    pub interp_residual: f64,
    pub iterations: usize,
    pub newton_history: Vec<f64>,
    /// `max |Im d_k'|` over `I`.
    pub free_imag_residual: f64,
}

/// Largest distance `|Re f(gamma(u)) - (l(u) + v0)|` over the check nodes.
pub(crate) fn along_gamma_residual(
    surface: &AnalyticCurve3,
    gamma: &AnalyticScalar,
    l: &AnalyticCurve3,
    v0: [f64; 3],
) -> f64 {
    let mut worst = 0.0f64;
    for u in surface.domain().check_nodes() {
        let x = surface.eval(gamma.eval_real(u));
        let y = l.eval_real(u);
        for m in 0..3 {
            worst = worst.max((x[m].re - y[m].re - v0[m]).abs());
        }
    }
    worst
}

/// Largest distance `|Re f(u) - a(u)|` over the check nodes.
pub(crate) fn on_interval_residual(surface: &AnalyticCurve3, a: &AnalyticCurve3) -> f64 {
    let mut worst = 0.0f64;
    for u in surface.domain().check_nodes() {
        let (x, y) = (surface.eval_real(u), a.eval_real(u));
        for m in 0..3 {
            worst = worst.max((x[m].re - y[m].re).abs());
        }
    }
    worst
}

/// Moves the free component `d_k` by the constant `z0 = -d_k(u0)`; the
/// surface then contains `a` and the translate `l + v0`, `v0 = Im(z0) e_k`.
pub fn realign_translation(
    base: &BaseDatum,
    state: &NewtonState,
    l: &AnalyticCurve3,
    u0: f64,
    cfg: &SolverConfig,
) -> Result<InterpolationResult> {
    let k = base.nf.perm.k();
    let dk = state.d.component(k);
    let free_imag = dk.derivative().max_imag_on_interval();
    if !(free_imag < cfg.realign_tol) {
        return Err(Error::ImaginaryDerivativeResidual {
            residual: free_imag,
        });
    }
    let z0 = -dk.eval_real(u0);
    let d_fixed = state.d.with_component(k, dk.add_constant(z0))?;
    let mut v0 = [0.0; 3];
    // adding +0 turns a -0 into +0
    v0[k] = z0.im + 0.0;
    let surface = base.a.sub(&d_fixed.times_i())?;
    Ok(InterpolationResult {
        perm: base.nf.perm,
        gamma: state.gamma.clone(),
        residual_on_i: on_interval_residual(&surface, &base.a),
        interp_residual: along_gamma_residual(&surface, &state.gamma, l, v0),
        d_fixed,
        v0,
        surface: IsotropicCurve::new_unchecked(surface, u0),
        iterations: state.iter,
        newton_history: state.history.clone(),
        free_imag_residual: free_imag,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InterpolateOptions {
    pub anchor_u0: Option<f64>,
    pub perm: Option<IndexPermutation>,
    pub printed_sign: bool,
    pub solver: SolverConfig,
}

/// Intermediate products of [`interpolate`], kept for diagnostics.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub base: BaseDatum,
    pub perturb: PerturbPack,
    pub target: IsotropicCurve,
    pub result: InterpolationResult,
}

/// Full pipeline; every error is tagged with the stage that raised it.
pub fn interpolate_with_stages(
    a: &AnalyticCurve3,
    l: &AnalyticCurve3,
    opts: &InterpolateOptions,
) -> Result<Pipeline> {
    if a.domain() != l.domain() {
        return Err(Error::DomainMismatch.at("input"));
    }
    let u0 = opts.anchor_u0.unwrap_or_else(|| a.domain().midpoint());
    let nf = construct(a, opts.perm, u0).stage("normal_field")?;
    let base = build_base(a, &nf, u0).stage("bjorling")?;
    let perturb = build_v(l, &nf, u0, opts.printed_sign).stage("build_V")?;
    let target = build_cv(&perturb, u0).stage("build_CV")?;
    let state = chord_newton(&base, &target, &opts.solver).stage("chord_newton")?;
    let result = realign_translation(&base, &state, l, u0, &opts.solver).stage("realign")?;
    Ok(Pipeline {
        base,
        perturb,
        target,
        result,
    })
}

pub fn interpolate(
    a: &AnalyticCurve3,
    l: &AnalyticCurve3,
    opts: &InterpolateOptions,
) -> Result<InterpolationResult> {
    interpolate_with_stages(a, l, opts).map(|p| p.result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::DomainSpec;
    use crate::bjorling::node_max;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle_domain() -> DomainSpec {
        DomainSpec::new(-0.8, 0.8, 1.2).unwrap()
    }

    fn circle() -> AnalyticCurve3 {
        AnalyticCurve3::fit(circle_domain(), |u| {
            [u.cos().into(), u.sin().into(), c(0.0, 0.0)]
        })
        .unwrap()
    }

    fn catenoid_perm() -> IndexPermutation {
        IndexPermutation::new(2, 3, 1).unwrap()
    }

    fn circle_base() -> BaseDatum {
        let a = circle();
        let nf = construct(&a, Some(catenoid_perm()), 0.0).unwrap();
        build_base(&a, &nf, 0.0).unwrap()
    }

    fn line_base() -> BaseDatum {
        let d = DomainSpec::new(-1.0, 1.0, 1.2).unwrap();
        let a = AnalyticCurve3::fit(d, |u| [u.into(), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let nf = construct(&a, None, 0.0).unwrap();
        build_base(&a, &nf, 0.0).unwrap()
    }

    fn wobble(a: &AnalyticCurve3, s: f64) -> AnalyticCurve3 {
        let bump = AnalyticCurve3::fit(*a.domain(), |u| {
            [
                (s * (1.3 * u).sin()).into(),
                (s * u * u).into(),
                (s * (0.7 * u).cos()).into(),
            ]
        })
        .unwrap();
        a.add(&bump).unwrap()
    }

    #[test]
    fn v_of_the_base_curve_is_the_base_normal() {
        let base = circle_base();
        let pp = build_v(&base.a, &base.nf, 0.0, false).unwrap();
        assert!(pp.v.sub(&base.nf.n0).unwrap().sup_norm() < 1e-12);
        let cv = build_cv(&pp, 0.0).unwrap();
        assert!(cv.f.coeff_distance(&base.a0.f) < 1e-11);
    }

    #[test]
    fn v_identities_and_printed_sign() {
        let base = circle_base();
        let l = wobble(&base.a, 1e-2);
        let pp = build_v(&l, &base.nf, 0.0, false).unwrap();
        let lp = l.derivative();
        assert!(node_max(&pp.v.dot(&lp).unwrap()) < 1e-9);
        assert!(node_max(&pp.v.dot(&pp.v).unwrap().add_constant(MINUS_ONE)) < 1e-9);
        let cv = build_cv(&pp, 0.0).unwrap();
        assert!(cv.relative_node_residual().unwrap() < 1e-9);
        assert!(on_interval_residual(&cv.f, &l) < 1e-10);

        let printed = build_v(&l, &base.nf, 0.0, true).unwrap();
        assert!(node_max(&printed.v.dot(&lp).unwrap()) > 1e-3);
    }

    #[test]
    fn line_derivative_examples() {
        let base = line_base();
        let d = *base.a.domain();
        let one = AnalyticScalar::constant(d, c(1.0, 0.0));
        let out = apply_df(&base, &one, &AnalyticCurve3::zero(d)).unwrap();
        let v = out.eval(c(0.3, 0.2));
        assert!((v[0] - 1.0).norm() < 1e-14 && (v[1] - I).norm() < 1e-14 && v[2].norm() < 1e-14);

        let (vv, dd) = apply_df_inverse(&base, &out).unwrap();
        assert!((vv.eval(c(0.1, 0.1)) - 1.0).norm() < 1e-13);
        assert!(dd.sup_norm() < 1e-13);

        let (vz, dz) = apply_df_inverse(&base, &AnalyticCurve3::zero(d)).unwrap();
        assert!(vz.sup_norm() == 0.0 && dz.sup_norm() == 0.0);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let base = circle_base();
        let d = *base.a.domain();
        let dir_v = AnalyticScalar::fit(d, |u| c(0.3 * u.cos(), 0.2 * u)).unwrap();
        let dir_d = AnalyticCurve3::fit(d, |u| {
            [c(u.sin(), 0.4), c(0.5 * u, -0.1 * u), c(0.2, 0.3 * u * u)]
        })
        .unwrap();
        let t = 1e-6;
        let id = AnalyticScalar::identity(d);
        let at = |s: f64| {
            let g = id.add(&dir_v.scale(c(s, 0.0))).unwrap();
            let dd = base.d0.add(&dir_d.scale(c(s, 0.0))).unwrap();
            evaluate_f(&base, &g, &dd, 0.5).unwrap()
        };
        let fd = at(t).sub(&at(-t)).unwrap().scale(c(0.5 / t, 0.0));
        let exact = apply_df(&base, &dir_v, &dir_d).unwrap();
        for u in d.check_nodes() {
            let (x, y) = (fd.eval_real(u), exact.eval_real(u));
            for m in 0..3 {
                assert!((x[m] - y[m]).norm() < 1e-5 * y[m].norm().max(1.0));
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let base = circle_base();
        let d = *base.a.domain();
        let v = AnalyticScalar::fit(d, |u| c(0.3 * u.cos(), 0.2 * u)).unwrap();
        let dd = AnalyticCurve3::fit(d, |u| [c(0.1 * u, 0.3), c(u.sin(), 0.0), c(0.2 * u, 0.0)])
            .unwrap();
        let rhs = apply_df(&base, &v, &dd).unwrap();
        let (v2, d2) = apply_df_inverse(&base, &rhs).unwrap();
        assert!(v2.sub(&v).unwrap().sup_norm() < 1e-9);
        assert!(d2.sub(&dd).unwrap().sup_norm() < 1e-9);
    }

    #[test]
    fn fixed_point_needs_no_iterations() {
        let base = circle_base();
        let state = chord_newton(&base, &base.a0, &SolverConfig::default()).unwrap();
        assert_eq!(state.iter, 0);
        assert!(state.d.coeff_distance(&base.d0) == 0.0);
    }

    #[test]
    fn far_target_does_not_converge() {
        let base = circle_base();
        let l = base
            .a
            .add(
                &AnalyticCurve3::fit(*base.a.domain(), |u| {
                    [(10.0 * u).into(), (10.0 * u * u).into(), (5.0 * u).into()]
                })
                .unwrap(),
            )
            .unwrap();
        let opts = InterpolateOptions {
            anchor_u0: Some(0.0),
            perm: Some(catenoid_perm()),
            ..Default::default()
        };
        let err = interpolate(&base.a, &l, &opts).unwrap_err();
        assert!(err.stage().is_some());
    }

    #[test]
    fn constant_shift_realignment() {
        let base = line_base();
        let shift =
            AnalyticCurve3::constant(*base.a.domain(), [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.7)]);
        let d = base.d0.add(&shift).unwrap();
        let state = NewtonState {
            gamma: AnalyticScalar::identity(*base.a.domain()),
            residual: AnalyticCurve3::zero(*base.a.domain()),
            d,
            residual_norm: 0.0,
            iter: 0,
            history: vec![0.0],
        };
        let res =
            realign_translation(&base, &state, &base.a, 0.0, &SolverConfig::default()).unwrap();
        assert_eq!(res.v0, [0.0, 0.0, -0.7]);
        assert!(res.d_fixed.max_imag_on_interval() < 1e-15);
    }

    fn opts_catenoid() -> InterpolateOptions {
        InterpolateOptions {
            anchor_u0: Some(0.0),
            perm: Some(catenoid_perm()),
            ..Default::default()
        }
    }

    #[test]
    fn tangential_perturbation_interpolates() {
        // a vertical bump stays in the tangent plane of the catenoid along a
        let a = circle();
        let bump = AnalyticCurve3::fit(*a.domain(), |u| {
            [c(0.0, 0.0), c(0.0, 0.0), (1e-4 * (0.7 * u).cos()).into()]
        })
        .unwrap();
        let l = a.add(&bump).unwrap();
        let r = interpolate(&a, &l, &opts_catenoid()).unwrap();
        assert!(r.iterations <= 25);
        assert!(r.residual_on_i < 1e-8, "{}", r.residual_on_i);
        assert!(r.interp_residual < 1e-8, "{}", r.interp_residual);
        assert_eq!((r.v0[1], r.v0[2]), (0.0, 0.0));
    }

    #[test]
    fn normal_perturbation_leaves_free_component_complex() {
        // l - a has a component along n0, which no real d_k can absorb
        let a = circle();
        let l = wobble(&a, 1e-3);
        let err = interpolate(&a, &l, &opts_catenoid()).unwrap_err();
        assert_eq!(err.stage(), Some("realign"));
        assert!(matches!(
            err.root(),
            Error::ImaginaryDerivativeResidual { .. }
        ));

        // the solve itself converged to an isotropic a - i d
        let p = interpolate_with_stages(
            &a,
            &l,
            &InterpolateOptions {
                solver: SolverConfig {
                    realign_tol: f64::INFINITY,
                    ..Default::default()
                },
                ..opts_catenoid()
            },
        )
        .unwrap();
        assert!(p.result.surface.relative_node_residual().unwrap() < 1e-8);
        assert!(p.result.free_imag_residual > 1e-4);
    }
}
