//! Curve and configuration files, OBJ meshes, CSV reports and result files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticCurve3, AnalyticScalar, DomainSpec, FitOptions};
use crate::bounds::{ProbeConfig, DEFAULT_SAFETY};
use crate::error::{Error, Result};
use crate::normal_field::IndexPermutation;
use crate::solver::{InterpolateOptions, InterpolationResult, SolverConfig};
use crate::verification::SurfaceGrid;

/// One coordinate of a curve in a curve file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ComponentSpec {
    Coeffs {
        cheb_coeffs_re: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        cheb_coeffs_im: Vec<f64>,
    },
    Builtin {
        builtin: ScalarBuiltin,
        #[serde(default)]
        params: BuiltinParams,
    },
}

/// Scalar builtins:
/// `line = offset + slope u`,
/// `circle = radius cos(u - phase)`,
/// `helix_like = radius cos(u - phase) + pitch u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarBuiltin {
    Line,
    Circle,
    HelixLike,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuiltinParams {
    pub slope: f64,
    pub offset: f64,
    pub radius: f64,
    pub phase: f64,
    pub pitch: f64,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        BuiltinParams {
            slope: 1.0,
            offset: 0.0,
            radius: 1.0,
            phase: 0.0,
            pitch: 1.0,
        }
    }
}

/// Whole-curve builtins:
/// `line = (u, 0, 0)`, `circle = (r cos u, r sin u, 0)`,
/// `helix_like = (r cos u, r sin u, pitch u)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveBuiltin {
    pub name: ScalarBuiltin,
    #[serde(default)]
    pub params: BuiltinParams,
}

/// `l = a + magnitude * direction`, directions as real Chebyshev coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub direction: Vec<Vec<f64>>,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub interval: [f64; 2],
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<CurveBuiltin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

/// A parsed curve file.
#[derive(Clone, Debug)]
pub struct CurveData {
    pub curve: AnalyticCurve3,
    pub domain: DomainSpec,
    /// The perturbed curve when the file carries a perturbation.
    pub nearby: Option<AnalyticCurve3>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Syntax errors become `Parse` (with line and column), shape errors `Schema`.
fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_value(value).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn schema(path: &Path, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn scalar_builtin(b: ScalarBuiltin, p: &BuiltinParams, u: f64) -> f64 {
    match b {
        ScalarBuiltin::Line => p.offset + p.slope * u,
        ScalarBuiltin::Circle => p.radius * (u - p.phase).cos(),
        ScalarBuiltin::HelixLike => p.radius * (u - p.phase).cos() + p.pitch * u,
    }
}

fn component_scalar(domain: DomainSpec, spec: &ComponentSpec) -> Result<AnalyticScalar> {
    match spec {
        ComponentSpec::Coeffs {
            cheb_coeffs_re,
            cheb_coeffs_im,
        } => {
            let n = cheb_coeffs_re.len().max(cheb_coeffs_im.len());
            let coeffs = (0..n)
                .map(|k| {
                    Complex64::new(
                        cheb_coeffs_re.get(k).copied().unwrap_or(0.0),
                        cheb_coeffs_im.get(k).copied().unwrap_or(0.0),
                    )
                })
                .collect();
            AnalyticScalar::from_coeffs(domain, coeffs)
        }
        ComponentSpec::Builtin { builtin, params } => {
            let (b, p) = (*builtin, *params);
            AnalyticScalar::fit(domain, move |u| scalar_builtin(b, &p, u).into())
        }
    }
}

fn curve_builtin(domain: DomainSpec, b: &CurveBuiltin) -> Result<AnalyticCurve3> {
    let p = b.params;
    let zero = Complex64::new(0.0, 0.0);
    match b.name {
        ScalarBuiltin::Line => AnalyticCurve3::fit(domain, |u| [u.into(), zero, zero]),
        ScalarBuiltin::Circle => AnalyticCurve3::fit(domain, move |u| {
            [
                (p.radius * u.cos()).into(),
                (p.radius * u.sin()).into(),
                zero,
            ]
        }),
        ScalarBuiltin::HelixLike => AnalyticCurve3::fit(domain, move |u| {
            [
                (p.radius * u.cos()).into(),
                (p.radius * u.sin()).into(),
                (p.pitch * u).into(),
            ]
        }),
    }
}

impl CurveFile {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    /// Checks the invariants serde cannot express and builds the curves.
    pub fn build(&self, path: &Path, fit: FitOptions) -> Result<CurveData> {
        let domain = DomainSpec::new(self.interval[0], self.interval[1], self.rho)
            .and_then(|d| d.with_fit(fit))
            .map_err(|e| schema(path, e.to_string()))?;
        let curve = match (&self.components, &self.builtin) {
            (Some(c), None) => {
                if c.len() != 3 {
                    return Err(schema(
                        path,
                        format!("expected 3 components, found {}", c.len()),
                    ));
                }
                for (m, spec) in c.iter().enumerate() {
                    if let ComponentSpec::Coeffs { cheb_coeffs_re, .. } = spec {
                        if cheb_coeffs_re.is_empty() {
                            return Err(schema(
                                path,
                                format!("component {m}: empty coefficient list"),
                            ));
                        }
                    }
                }
                AnalyticCurve3::new([
                    component_scalar(domain, &c[0])?,
                    component_scalar(domain, &c[1])?,
                    component_scalar(domain, &c[2])?,
                ])?
            }
            (None, Some(b)) => curve_builtin(domain, b)?,
            _ => {
                return Err(schema(
                    path,
                    "exactly one of `components` and `builtin` must be given",
                ))
            }
        };
        let nearby = match &self.perturbation {
            None => None,
            Some(p) => {
                if !(p.magnitude >= 0.0 && p.magnitude.is_finite()) {
                    return Err(schema(path, "perturbation magnitude must be >= 0"));
                }
                if p.direction.len() != 3 || p.direction.iter().any(|d| d.is_empty()) {
                    return Err(schema(
                        path,
                        "perturbation direction needs 3 nonempty lists",
                    ));
                }
                let dir = AnalyticCurve3::new([
                    AnalyticScalar::from_real_coeffs(domain, &p.direction[0])?,
                    AnalyticScalar::from_real_coeffs(domain, &p.direction[1])?,
                    AnalyticScalar::from_real_coeffs(domain, &p.direction[2])?,
                ])?;
                Some(curve.add(&dir.scale(Complex64::new(p.magnitude, 0.0)))?)
            }
        };
        Ok(CurveData {
            curve,
            domain,
            nearby,
        })
    }

    /// Curve file holding the coefficients of `curve` explicitly.
    pub fn from_curve(curve: &AnalyticCurve3) -> Self {
        let d = curve.domain();
        CurveFile {
            interval: [d.interval_lo, d.interval_hi],
            rho: d.rho,
            components: Some(
                curve
                    .components()
                    .iter()
                    .map(|c| {
                        let im: Vec<f64> = c.coeffs().iter().map(|z| z.im).collect();
                        ComponentSpec::Coeffs {
                            cheb_coeffs_re: c.coeffs().iter().map(|z| z.re).collect(),
                            cheb_coeffs_im: if im.iter().all(|&x| x == 0.0) {
                                vec![]
                            } else {
                                im
                            },
                        }
                    })
                    .collect(),
            ),
            builtin: None,
            perturbation: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve files always serialise")
    }
}

/// Parses and fits the curve in `path` with default fit options.
pub fn parse_curve(path: &Path) -> Result<CurveData> {
    CurveFile::load(path)?.build(path, FitOptions::default())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub fit_tol: f64,
    pub max_degree: usize,
    pub newton_tol: f64,
    pub max_iter: usize,
    pub min_step: f64,
    pub range_slack: f64,
    pub realign_tol: f64,
    pub anchor_u0: Option<f64>,
    pub epsilon0: Option<f64>,
    pub safety: f64,
    pub probe_s_max: f64,
    pub probe_bisect_tol: f64,
    pub grid_nu: usize,
    pub grid_nv: usize,
    pub perm: Option<IndexPermutation>,
    pub printed_v3_sign: bool,
    pub mesh_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolverConfig::default();
        let p = ProbeConfig::default();
        RunConfig {
            fit_tol: FitOptions::default().tol,
            max_degree: FitOptions::default().max_degree,
            newton_tol: s.tol,
            max_iter: s.max_iter,
            min_step: s.min_step,
            range_slack: s.range_slack,
            realign_tol: s.realign_tol,
            anchor_u0: None,
            epsilon0: None,
            safety: DEFAULT_SAFETY,
            probe_s_max: p.s_max,
            probe_bisect_tol: p.bisect_tol,
            grid_nu: 64,
            grid_nv: 32,
            perm: None,
            printed_v3_sign: false,
            mesh_path: None,
            report_path: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: RunConfig = read_json(path)?;
        cfg.validate().map_err(|m| schema(path, m))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let unit = |name: &str, x: f64| {
            if x > 0.0 && x < 1.0 {
                Ok(())
            } else {
                Err(format!("{name} = {x} must lie in (0, 1)"))
            }
        };
        unit("fit_tol", self.fit_tol)?;
        unit("newton_tol", self.newton_tol)?;
        unit("min_step", self.min_step)?;
        unit("realign_tol", self.realign_tol)?;
        unit("safety", self.safety)?;
        unit("probe_bisect_tol", self.probe_bisect_tol)?;
        if self.max_iter < 1 {
            return Err("max_iter must be at least 1".into());
        }
        if self.max_degree < 16 {
            return Err("max_degree must be at least 16".into());
        }
        if !(self.range_slack >= 0.0) {
            return Err("range_slack must be >= 0".into());
        }
        if self.grid_nu < 8 || self.grid_nv < 8 {
            return Err("grid sizes must be at least 8".into());
        }
        if let Some(e) = self.epsilon0 {
            if !(e > 0.0) {
                return Err("epsilon0 must be positive".into());
            }
        }
        if !(self.probe_s_max > 0.0) {
            return Err("probe_s_max must be positive".into());
        }
        Ok(())
    }

    pub fn fit(&self) -> FitOptions {
        FitOptions {
            tol: self.fit_tol,
            max_degree: self.max_degree,
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            max_iter: self.max_iter,
            tol: self.newton_tol,
            min_step: self.min_step,
            range_slack: self.range_slack,
            realign_tol: self.realign_tol,
        }
    }

    pub fn interpolate_options(&self) -> InterpolateOptions {
        InterpolateOptions {
            anchor_u0: self.anchor_u0,
            perm: self.perm,
            printed_sign: self.printed_v3_sign,
            solver: self.solver(),
        }
    }

    pub fn probe(&self) -> ProbeConfig {
        ProbeConfig {
            direction: None,
            s_max: self.probe_s_max,
            bisect_tol: self.probe_bisect_tol,
            solver: self.solver(),
        }
    }

    /// `(name, value)` pairs in a fixed order, for report echoes.
    pub fn echo(&self) -> Vec<(String, String)> {
        let value = serde_json::to_value(self).expect("config always serialises");
        let map: BTreeMap<String, serde_json::Value> =
            serde_json::from_value(value).expect("config is an object");
        map.into_iter()
            .map(|(k, v)| (format!("config.{k}"), v.to_string()))
            .collect()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// OBJ text: vertices row-major at 17 significant digits, then two
/// triangles per grid cell with 1-based indices.
pub fn mesh_to_obj(g: &SurfaceGrid) -> String {
    let mut out = String::new();
    for p in &g.points {
        out.push_str(&format!("v {:.16e} {:.16e} {:.16e}\n", p[0], p[1], p[2]));
    }
    let idx = |iu: usize, iv: usize| iu * g.nv + iv + 1;
    for iu in 0..g.nu.saturating_sub(1) {
        for iv in 0..g.nv.saturating_sub(1) {
            let (a, b, c, d) = (
                idx(iu, iv),
                idx(iu + 1, iv),
                idx(iu + 1, iv + 1),
                idx(iu, iv + 1),
            );
            out.push_str(&format!("f {a} {b} {c}\nf {a} {c} {d}\n"));
        }
    }
    out
}

pub fn write_mesh(g: &SurfaceGrid, path: &Path) -> Result<()> {
    fs::write(path, mesh_to_obj(g)).map_err(io_err(path))
}

/// Text of a report value; floats use the shortest round-trip exponent form.
pub trait ReportValue {
    fn text(&self) -> String;
}

impl ReportValue for f64 {
    fn text(&self) -> String {
        format!("{self:e}")
    }
}

impl ReportValue for usize {
    fn text(&self) -> String {
        self.to_string()
    }
}

impl ReportValue for &str {
    fn text(&self) -> String {
        self.to_string()
    }
}

impl ReportValue for String {
    fn text(&self) -> String {
        self.clone()
    }
}

impl ReportValue for IndexPermutation {
    fn text(&self) -> String {
        self.to_string()
    }
}

/// Rows of a `name,value,source` report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    rows: Vec<(String, String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        value: impl ReportValue,
        source: impl Into<String>,
    ) {
        self.rows.push((name.into(), value.text(), source.into()));
    }

    pub fn push_config(&mut self, cfg: &RunConfig) {
        for (k, v) in cfg.echo() {
            self.push(k, v, "config");
        }
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.rows.iter().find(|r| r.0 == name).map(|r| r.1.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "value", "source"])
            .expect("in-memory write");
        for (n, v, s) in &self.rows {
            w.write_record([n, v, s]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn emit(&self, path: Option<&Path>) -> Result<()> {
        let text = self.to_csv();
        match path {
            Some(p) => fs::write(p, text).map_err(io_err(p)),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(io_err(Path::new("<stdout>"))),
        }
    }
}

/// Complex Chebyshev coefficients split into real and imaginary lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffPair {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl CoeffPair {
    pub fn of(f: &AnalyticScalar) -> Self {
        CoeffPair {
            re: f.coeffs().iter().map(|z| z.re).collect(),
            im: f.coeffs().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_scalar(&self, domain: DomainSpec) -> Result<AnalyticScalar> {
        if self.re.len() != self.im.len() {
            return Err(Error::InvalidDomain(
                "coefficient lists differ in length".into(),
            ));
        }
        AnalyticScalar::from_coeffs(
            domain,
            self.re
                .iter()
                .zip(&self.im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        )
    }
}

fn curve_pairs(c: &AnalyticCurve3) -> [CoeffPair; 3] {
    [0, 1, 2].map(|m| CoeffPair::of(c.component(m)))
}

fn curve_from_pairs(domain: DomainSpec, p: &[CoeffPair; 3]) -> Result<AnalyticCurve3> {
    AnalyticCurve3::new([
        p[0].to_scalar(domain)?,
        p[1].to_scalar(domain)?,
        p[2].to_scalar(domain)?,
    ])
}

/// Everything `verify` and `mesh` need to rebuild an interpolation result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub domain: DomainSpec,
    pub perm: IndexPermutation,
    pub anchor_u0: f64,
    pub v0: [f64; 3],
    pub iterations: usize,
    pub residual_on_i: f64,
    pub interp_residual: f64,
    pub a: [CoeffPair; 3],
    pub l: [CoeffPair; 3],
    pub gamma: CoeffPair,
    pub d: [CoeffPair; 3],
    pub config: RunConfig,
}

/// Curves rebuilt from a [`ResultFile`].
#[derive(Clone, Debug)]
pub struct LoadedResult {
    pub a: AnalyticCurve3,
    pub l: AnalyticCurve3,
    pub gamma: AnalyticScalar,
    pub d: AnalyticCurve3,
    pub surface: AnalyticCurve3,
}

impl ResultFile {
    pub fn new(
        res: &InterpolationResult,
        a: &AnalyticCurve3,
        l: &AnalyticCurve3,
        config: &RunConfig,
    ) -> Self {
        ResultFile {
            domain: *a.domain(),
            perm: res.perm,
            anchor_u0: res.surface.anchor_u0,
            v0: res.v0,
            iterations: res.iterations,
            residual_on_i: res.residual_on_i,
            interp_residual: res.interp_residual,
            a: curve_pairs(a),
            l: curve_pairs(l),
            gamma: CoeffPair::of(&res.gamma),
            d: curve_pairs(&res.d_fixed),
            config: config.clone(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("results always serialise");
        fs::write(path, text + "\n").map_err(io_err(path))
    }

    pub fn curves(&self) -> Result<LoadedResult> {
        let a = curve_from_pairs(self.domain, &self.a)?;
        let l = curve_from_pairs(self.domain, &self.l)?;
        let gamma = self.gamma.to_scalar(self.domain)?;
        let d = curve_from_pairs(self.domain, &self.d)?;
        let surface = a.sub(&d.times_i())?;
        Ok(LoadedResult {
            a,
            l,
            gamma,
            d,
            surface,
        })
    }
}
