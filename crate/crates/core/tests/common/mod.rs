#![allow(dead_code)]

use minsurf::analytic::{AnalyticCurve3, DomainSpec};
use minsurf::normal_field::IndexPermutation;
use minsurf::solver::InterpolateOptions;
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn circle_domain() -> DomainSpec {
    DomainSpec::new(-0.8, 0.8, 1.2).unwrap()
}

pub fn line_domain() -> DomainSpec {
    DomainSpec::new(-1.0, 1.0, 1.2).unwrap()
}

pub fn circle() -> AnalyticCurve3 {
    AnalyticCurve3::fit(circle_domain(), |u| {
        [u.cos().into(), u.sin().into(), c(0.0, 0.0)]
    })
    .unwrap()
}

pub fn line() -> AnalyticCurve3 {
    AnalyticCurve3::fit(line_domain(), |u| [u.into(), c(0.0, 0.0), c(0.0, 0.0)]).unwrap()
}

pub fn helix() -> AnalyticCurve3 {
    AnalyticCurve3::fit(circle_domain(), |u| {
        [u.cos().into(), u.sin().into(), (0.5 * u).into()]
    })
    .unwrap()
}

/// The permutation whose normal along the circle is the inward one.
pub fn catenoid_perm() -> IndexPermutation {
    IndexPermutation::new(2, 3, 1).unwrap()
}

pub fn opts(perm: Option<IndexPermutation>) -> InterpolateOptions {
    InterpolateOptions {
        anchor_u0: Some(0.0),
        perm,
        ..Default::default()
    }
}

/// `max(||p||, ||p'||)` over the closed domain.
pub fn c1_norm(p: &AnalyticCurve3) -> f64 {
    p.sup_norm().max(p.derivative().sup_norm())
}

/// Random analytic perturbation `alpha + beta u + gamma sin(omega u + phi)` per
/// coordinate, scaled so that `max(||p||, ||p'||) = size`.
pub fn random_perturbation<R: Rng>(rng: &mut R, domain: DomainSpec, size: f64) -> AnalyticCurve3 {
    let mut coef = [[0.0; 5]; 3];
    for row in coef.iter_mut() {
        *row = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        ];
    }
    let p = AnalyticCurve3::fit(domain, |u| {
        coef.map(|k| (k[0] + k[1] * u + k[2] * (k[3] * u + k[4]).sin()).into())
    })
    .unwrap();
    p.scale(c(size / c1_norm(&p), 0.0))
}

/// A curve with its nearby partner and the options to interpolate them.
pub struct Instance {
    pub name: String,
    pub a: AnalyticCurve3,
    pub l: AnalyticCurve3,
    pub opts: InterpolateOptions,
}

/// Fixed points, tangential lifts and small random perturbations of the
/// circle, the line and a helix.
pub fn corpus() -> Vec<Instance> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20261019);
    let mut out = Vec::new();
    let mut push = |name: &str, a: &AnalyticCurve3, p: Option<AnalyticCurve3>, perm| {
        let l = match p {
            Some(p) => a.add(&p).unwrap(),
            None => a.clone(),
        };
        out.push(Instance {
            name: name.to_string(),
            a: a.clone(),
            l,
            opts: opts(perm),
        });
    };
    let (circ, ln, hx) = (circle(), line(), helix());
    let cat = Some(catenoid_perm());
    push("circle/fixed", &circ, None, cat);
    let lift = AnalyticCurve3::fit(circle_domain(), |u| {
        [c(0.0, 0.0), c(0.0, 0.0), (1e-4 * (0.7 * u).cos()).into()]
    })
    .unwrap();
    push("circle/lift", &circ, Some(lift), cat);
    for n in 0..3 {
        let p = random_perturbation(&mut rng, circle_domain(), 1e-3);
        push(&format!("circle/random{n}"), &circ, Some(p), cat);
    }
    push("line/fixed", &ln, None, None);
    let slide = AnalyticCurve3::fit(line_domain(), |u| {
        [c(0.0, 0.0), (1e-3 * (u * u + 0.5)).into(), c(0.0, 0.0)]
    })
    .unwrap();
    push("line/in_plane", &ln, Some(slide), None);
    let p = random_perturbation(&mut rng, line_domain(), 1e-3);
    push("line/random", &ln, Some(p), None);
    push("helix/fixed", &hx, None, None);
    for n in 0..2 {
        let p = random_perturbation(&mut rng, circle_domain(), 1e-3);
        push(&format!("helix/random{n}"), &hx, Some(p), None);
    }
    out
}
