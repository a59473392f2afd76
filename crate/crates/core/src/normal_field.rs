//! Analytic unit normal `n0` along an admissible curve.
//!
//! With `(i, j, k)` a permutation of the coordinates, `theta = asin(a_j' / s)`
//! where `s^2 = a_i'^2 + a_j'^2`, and `n0` has components
//! `(a_k' cos theta, a_k' sin theta, -(a_i' cos theta + a_j' sin theta)) / q0`
//! placed in slots `i`, `j`, `k`, where `q0^2 = Q0 = a_k'^2 + (a_i' cos theta + a_j' sin theta)^2`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    arcsin_series, sqrt_branch, AnalyticCurve3, AnalyticScalar, BranchSpec, UNIT_DISK_MARGIN,
};
use crate::error::{Error, Result};

/// Margin used for every "never zero on the closed domain" hypothesis.
pub const CONDITION_MARGIN: f64 = 1e-8;

/// A permutation `(i, j, k)` of the coordinate indices, stored zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[usize; 3]", into = "[usize; 3]")]
pub struct IndexPermutation {
    i: usize,
    j: usize,
    k: usize,
}

impl IndexPermutation {
    /// From one-based indices.
    pub fn new(i: usize, j: usize, k: usize) -> Result<Self> {
        let mut s = [i, j, k];
        s.sort_unstable();
        if s != [1, 2, 3] {
            return Err(Error::InvalidDomain(format!(
                "({i},{j},{k}) is not a permutation of (1,2,3)"
            )));
        }
        Ok(IndexPermutation {
            i: i - 1,
            j: j - 1,
            k: k - 1,
        })
    }

    /// All six permutations in lexicographic order.
    pub fn all() -> [IndexPermutation; 6] {
        [
            (1, 2, 3),
            (1, 3, 2),
            (2, 1, 3),
            (2, 3, 1),
            (3, 1, 2),
            (3, 2, 1),
        ]
        .map(|(i, j, k)| IndexPermutation::new(i, j, k).unwrap())
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn one_based(&self) -> [usize; 3] {
        [self.i + 1, self.j + 1, self.k + 1]
    }
}

impl TryFrom<[usize; 3]> for IndexPermutation {
    type Error = Error;

    fn try_from(v: [usize; 3]) -> Result<Self> {
        IndexPermutation::new(v[0], v[1], v[2])
    }
}

impl From<IndexPermutation> for [usize; 3] {
    fn from(p: IndexPermutation) -> Self {
        p.one_based()
    }
}

impl fmt::Display for IndexPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i + 1, self.j + 1, self.k + 1)
    }
}

/// Outcome of the three admissibility checks for one permutation.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub perm: IndexPermutation,
    /// `inf |a_i'^2 + a_j'^2|`.
    pub pair_inf: f64,
    /// `inf |a_i'^2 + a_j'^2 + a_k'^2|`.
    pub total_inf: f64,
    /// `sup |a_j' / sqrt(a_i'^2 + a_j'^2)|`, when the root exists.
    pub ratio_sup: Option<f64>,
}

impl ConditionReport {
    pub fn pair_ok(&self) -> bool {
        self.pair_inf > CONDITION_MARGIN
    }

    pub fn total_ok(&self) -> bool {
        self.total_inf > CONDITION_MARGIN
    }

    pub fn ratio_margin(&self) -> f64 {
        self.ratio_sup.map_or(f64::NEG_INFINITY, |s| 1.0 - s)
    }

    pub fn ratio_ok(&self) -> bool {
        self.ratio_margin() > CONDITION_MARGIN
    }

    pub fn passes(&self) -> bool {
        self.pair_ok() && self.total_ok() && self.ratio_ok()
    }
}

fn sq(f: &AnalyticScalar) -> Result<AnalyticScalar> {
    f.mul(f)
}

/// Checks the hypotheses on `a` for the given permutation. Never fails; a
/// check that cannot be evaluated is reported as not passing.
pub fn validate_conditions(a: &AnalyticCurve3, perm: IndexPermutation) -> ConditionReport {
    let ap = a.derivative();
    let (ai, aj, ak) = (
        ap.component(perm.i),
        ap.component(perm.j),
        ap.component(perm.k),
    );
    let pair = sq(ai).and_then(|x| x.add(&sq(aj)?));
    let total = pair.as_ref().ok().and_then(|p| p.add(&sq(ak).ok()?).ok());
    let pair_inf = pair.as_ref().map_or(0.0, |p| p.inf_modulus());
    let total_inf = total.as_ref().map_or(0.0, |t| t.inf_modulus());
    let ratio_sup = pair.ok().and_then(|p| {
        let (s, _) = sqrt_branch(&p, a.domain().midpoint()).ok()?;
        Some(aj.div(&s).ok()?.sup_norm())
    });
    ConditionReport {
        perm,
        pair_inf,
        total_inf,
        ratio_sup,
    }
}

/// Everything derived from `a` and the chosen permutation.
#[derive(Clone, Debug)]
pub struct NormalFieldPack {
    pub perm: IndexPermutation,
    pub anchor_u0: f64,
    pub theta: AnalyticScalar,
    pub sin_theta: AnalyticScalar,
    pub cos_theta: AnalyticScalar,
    /// `Q0 = a_k'^2 + (a_i' cos theta + a_j' sin theta)^2`.
    pub q0_sq: AnalyticScalar,
    pub q0: AnalyticScalar,
    pub q0_branch: BranchSpec,
    /// `(p01, p02, p03)` in the order of the construction (not slot order).
    pub p0: [AnalyticScalar; 3],
    pub n0: AnalyticCurve3,
    /// `inf |q0|`.
    pub tau: f64,
    /// `sup |cos theta|`, `sup |sin theta|`, `sup |q0|`, `sup |p01|`.
    pub mc: f64,
    pub ms: f64,
    pub m1: f64,
    pub m2: f64,
}

/// Places `(first, second, third)` at the coordinate slots `(i, j, k)`.
pub(crate) fn assemble_slots(
    perm: IndexPermutation,
    first: AnalyticScalar,
    second: AnalyticScalar,
    third: AnalyticScalar,
) -> Result<AnalyticCurve3> {
    let zero = AnalyticScalar::zero(*first.domain());
    let mut slots = [zero.clone(), zero.clone(), zero];
    slots[perm.i] = first;
    slots[perm.j] = second;
    slots[perm.k] = third;
    AnalyticCurve3::new(slots)
}

fn construct_with(
    a: &AnalyticCurve3,
    perm: IndexPermutation,
    anchor_u0: f64,
) -> Result<NormalFieldPack> {
    let ap = a.derivative();
    let (ai, aj, ak) = (
        ap.component(perm.i),
        ap.component(perm.j),
        ap.component(perm.k),
    );
    let pair = sq(ai)?.add(&sq(aj)?)?;
    let (s, _) = sqrt_branch(&pair, anchor_u0)?;
    let z = aj.div(&s)?;
    let theta = arcsin_series(&z, UNIT_DISK_MARGIN)?;
    let sin_theta = theta.map(|t| t.sin())?;
    let one = AnalyticScalar::constant(*a.domain(), Complex64::new(1.0, 0.0));
    let (mut cos_theta, _) = sqrt_branch(&one.sub(&sq(&sin_theta)?)?, anchor_u0)?;
    // sqrt(w^2) = w: the cosine carries the sign of a_i' so that
    // a_i' cos theta + a_j' sin theta = sqrt(a_i'^2 + a_j'^2)
    if ai.eval_real(anchor_u0).re < 0.0 {
        cos_theta = cos_theta.scale(Complex64::new(-1.0, 0.0));
    }
    let comb = ai.mul(&cos_theta)?.add(&aj.mul(&sin_theta)?)?;
    let q0_sq = sq(ak)?.add(&sq(&comb)?)?;
    let (q0, q0_branch) = sqrt_branch(&q0_sq, anchor_u0)?;
    let p01 = ak.mul(&cos_theta)?;
    let p02 = ak.mul(&sin_theta)?;
    let p03 = comb.scale(Complex64::new(-1.0, 0.0));
    let third_inf = p03.inf_modulus();
    if !(third_inf > CONDITION_MARGIN) {
        return Err(Error::ZeroOnDomain {
            inf_modulus: third_inf,
        });
    }
    let inv_q0 = q0.recip()?;
    let n0 = assemble_slots(
        perm,
        p01.mul(&inv_q0)?,
        p02.mul(&inv_q0)?,
        p03.mul(&inv_q0)?,
    )?;
    Ok(NormalFieldPack {
        perm,
        anchor_u0,
        tau: q0.inf_modulus(),
        mc: cos_theta.sup_norm(),
        ms: sin_theta.sup_norm(),
        m1: q0.sup_norm(),
        m2: p01.sup_norm(),
        theta,
        sin_theta,
        cos_theta,
        q0_sq,
        q0,
        q0_branch,
        p0: [p01, p02, p03],
        n0,
    })
}

/// Builds the normal field. Without an explicit permutation the six
/// permutations are tried in lexicographic order and the first one that
/// passes [`validate_conditions`] and constructs cleanly is used.
pub fn construct(
    a: &AnalyticCurve3,
    perm: Option<IndexPermutation>,
    anchor_u0: f64,
) -> Result<NormalFieldPack> {
    if !a.domain().contains_real(anchor_u0) {
        return Err(Error::OutOfDomain {
            re: anchor_u0,
            im: 0.0,
        });
    }
    if let Some(p) = perm {
        return construct_with(a, p, anchor_u0);
    }
    for p in IndexPermutation::all() {
        if !validate_conditions(a, p).passes() {
            continue;
        }
        if let Ok(pack) = construct_with(a, p, anchor_u0) {
            return Ok(pack);
        }
    }
    Err(Error::NoAdmissiblePermutation)
}
