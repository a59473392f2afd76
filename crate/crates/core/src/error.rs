use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error(
        "function not resolvable at degree cap {max_degree} (not analytic on the closed domain?)"
    )]
    NonResolvable { max_degree: usize },

    #[error("point {re}{im:+}i lies outside the closed domain")]
    OutOfDomain { re: f64, im: f64 },

    #[error(
        "inner function leaves the domain (elliptic radius {radius:.6} > allowed {allowed:.6})"
    )]
    RangeEscape { radius: f64, allowed: f64 },

    #[error("operands live on different domains")]
    DomainMismatch,

    #[error("function has a zero on the closed domain (inf modulus {inf_modulus:e})")]
    ZeroOnDomain { inf_modulus: f64 },

    #[error("sampled arguments cover the full circle; no single-valued branch")]
    NoBranchGap,

    #[error("branch construction failed: {0}")]
    BranchResidual(String),

    #[error("arcsine argument reaches the unit circle (sup modulus {sup_modulus:.9})")]
    UnitDiskViolation { sup_modulus: f64 },

    #[error("no coordinate permutation satisfies the admissibility conditions")]
    NoAdmissiblePermutation,

    #[error("normal field is not unit length (residual {residual:e})")]
    NotUnitNormal { residual: f64 },

    #[error("normal field is not orthogonal to the tangent (residual {residual:e})")]
    NotOrthogonal { residual: f64 },

    #[error("inverse-system denominator vanishes on the domain (inf modulus {inf_modulus:e})")]
    DenominatorVanishes { inf_modulus: f64 },

    #[error(
        "perturbed normal denominator B0 vanishes on the domain (inf modulus {inf_modulus:e})"
    )]
    B0Vanishes { inf_modulus: f64 },

    #[error(
        "chord iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("imaginary part of the free derivative component on I is {residual:e}")]
    ImaginaryDerivativeResidual { residual: f64 },

    #[error("degenerate constants: {0}")]
    DegenerateConstants(String),

    #[error("unknown reference surface `{0}`")]
    UnknownReference(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("schema error in {path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error after peeling stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::NonConvergence { .. } | Error::RangeEscape { .. } => 2,
            Error::Parse { .. } | Error::Schema { .. } | Error::Io { .. } => 4,
            _ => 3,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
