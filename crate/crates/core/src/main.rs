// NaN must fail every threshold test, hence `!(x < tol)` throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use minsurf::bjorling::{build_base, IsotropicCurve};
use minsurf::bounds::{compute_eta, probe_epsilon0};
use minsurf::error::{Error, Result};
use minsurf::io::{CurveData, CurveFile, Report, ResultFile, RunConfig};
use minsurf::normal_field::construct;
use minsurf::solver::interpolate_with_stages;
use minsurf::verification::{
    isotropy_residual, mean_curvature_max, residuals_from_parts, surface_check_orders,
    surface_checks, SurfaceGrid,
};
use minsurf::AnalyticCurve3;

/// Minimal surfaces through an analytic curve and a translate of a nearby curve.
#[derive(Parser, Debug)]
#[command(name = "minsurf", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV report path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Minimal surface through a curve with the constructed analytic normal.
    Bjorling {
        #[arg(long)]
        curve: PathBuf,
        /// OBJ mesh output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Minimal surface through a curve and a translate of a nearby curve.
    Interpolate {
        #[arg(long)]
        curve: PathBuf,
        /// Nearby curve; defaults to the perturbation in the curve file, or
        /// the curve itself.
        #[arg(long)]
        nearby: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Result file for `verify` and `mesh`.
        #[arg(long)]
        result: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Constants and closeness radius for a curve.
    Bounds {
        #[arg(long)]
        curve: PathBuf,
        /// Neighbourhood radius; probed when neither given here nor in the config.
        #[arg(long)]
        epsilon0: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-checks a result file.
    Verify {
        #[arg(long)]
        result: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Writes the mesh of a result file.
    Mesh {
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// Residual bound used by `verify` for the interpolation identities.
const VERIFY_TOL: f64 = 1e-8;
const MIN_ORDER: f64 = 1.8;

fn load_config(common: &Common) -> Result<RunConfig> {
    match &common.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn load_curve(path: &Path, cfg: &RunConfig) -> Result<CurveData> {
    CurveFile::load(path)?.build(path, cfg.fit())
}

fn report_path<'a>(common: &'a Common, cfg: &'a RunConfig) -> Option<&'a Path> {
    common.report.as_deref().or(cfg.report_path.as_deref())
}

fn log(common: &Common, msg: impl AsRef<str>) {
    if common.verbose {
        eprintln!("{}", msg.as_ref());
    }
}

fn emit_mesh(
    f: &AnalyticCurve3,
    cfg: &RunConfig,
    out: Option<&Path>,
    common: &Common,
) -> Result<()> {
    let grid = SurfaceGrid::sample_default(f, cfg.grid_nu, cfg.grid_nv)?;
    log(
        common,
        format!("max |H| on the mesh grid: {:e}", mean_curvature_max(&grid)),
    );
    if let Some(p) = out.or(cfg.mesh_path.as_deref()) {
        minsurf::io::write_mesh(&grid, p)?;
        log(common, format!("wrote {}", p.display()));
    }
    Ok(())
}

fn push_surface_checks(rep: &mut Report, f: &AnalyticCurve3, cfg: &RunConfig) -> Result<()> {
    let grid = SurfaceGrid::sample_default(f, cfg.grid_nu, cfg.grid_nv)?;
    let r = surface_checks(&grid);
    rep.push("harmonicity", r.harmonicity, "max |X_uu + X_vv|");
    rep.push(
        "conformality_diag",
        r.conformality_diag,
        "max ||X_u|^2 - |X_v|^2|",
    );
    rep.push(
        "conformality_cross",
        r.conformality_cross,
        "max |<X_u, X_v>|",
    );
    Ok(())
}

fn run_bjorling(curve: &Path, out: Option<&Path>, common: &Common) -> Result<()> {
    let cfg = load_config(common)?;
    let data = load_curve(curve, &cfg)?;
    let u0 = cfg.anchor_u0.unwrap_or_else(|| data.domain.midpoint());
    let nf = construct(&data.curve, cfg.perm, u0).map_err(|e| e.at("normal_field"))?;
    log(common, format!("permutation {}", nf.perm));
    let base = build_base(&data.curve, &nf, u0).map_err(|e| e.at("bjorling"))?;
    let mut rep = Report::new();
    rep.push("perm", nf.perm, "(i,j,k)");
    rep.push("anchor_u0", u0, "u0");
    rep.push("tau", nf.tau, "inf |q0|");
    rep.push("M_c", nf.mc, "sup |cos theta|");
    rep.push("M_s", nf.ms, "sup |sin theta|");
    rep.push("M_1", nf.m1, "sup |q0|");
    rep.push("M_2", nf.m2, "sup |p01|");
    rep.push(
        "denom_inf",
        base.denom.inf_modulus(),
        "inf |a_j' d0_i' - a_i' d0_j'|",
    );
    rep.push("isotropy", isotropy_residual(&base.a0), "sup |<a0', a0'>|");
    push_surface_checks(&mut rep, &base.a0.f, &cfg)?;
    rep.push_config(&cfg);
    emit_mesh(&base.a0.f, &cfg, out, common)?;
    rep.emit(report_path(common, &cfg))
}

fn run_interpolate(
    curve: &Path,
    nearby: Option<&Path>,
    out: Option<&Path>,
    result: Option<&Path>,
    common: &Common,
) -> Result<()> {
    let cfg = load_config(common)?;
    let data = load_curve(curve, &cfg)?;
    let l = match nearby {
        Some(p) => {
            let other = load_curve(p, &cfg)?;
            if other.domain != data.domain {
                return Err(Error::DomainMismatch.at("input"));
            }
            other.nearby.unwrap_or(other.curve)
        }
        None => data.nearby.clone().unwrap_or_else(|| data.curve.clone()),
    };
    let p = interpolate_with_stages(&data.curve, &l, &cfg.interpolate_options())?;
    let r = &p.result;
    log(
        common,
        format!("chord iteration residuals: {:?}", r.newton_history),
    );
    let mut rep = Report::new();
    rep.push("perm", r.perm, "(i,j,k)");
    rep.push("anchor_u0", r.surface.anchor_u0, "u0");
    rep.push("iterations", r.iterations, "chord iterations");
    rep.push(
        "newton_residual",
        r.newton_history.last().copied().unwrap_or(0.0),
        "||(a - i d) o gamma - C_V||",
    );
    for m in 0..3 {
        rep.push(format!("v0_{}", m + 1), r.v0[m], "Im(z0) e_k");
    }
    rep.push("residual_on_I", r.residual_on_i, "sup_I |X(u,0) - a(u)|");
    rep.push(
        "interp_residual",
        r.interp_residual,
        "sup_I |X(gamma(u)) - l(u) - v0|",
    );
    rep.push(
        "free_imag_residual",
        r.free_imag_residual,
        "sup_I |Im d_k'|",
    );
    rep.push(
        "isotropy_base",
        isotropy_residual(&p.base.a0),
        "sup |<a0', a0'>|",
    );
    rep.push(
        "isotropy_target",
        isotropy_residual(&p.target),
        "sup |<C_V', C_V'>|",
    );
    rep.push(
        "isotropy_surface",
        isotropy_residual(&r.surface),
        "sup |<(a - iD)', (a - iD)'>|",
    );
    push_surface_checks(&mut rep, &r.surface.f, &cfg)?;
    rep.push_config(&cfg);
    emit_mesh(&r.surface.f, &cfg, out, common)?;
    if let Some(path) = result {
        ResultFile::new(r, &data.curve, &l, &cfg).save(path)?;
    }
    rep.emit(report_path(common, &cfg))
}

fn run_bounds(curve: &Path, epsilon0: Option<f64>, common: &Common) -> Result<()> {
    let cfg = load_config(common)?;
    let data = load_curve(curve, &cfg)?;
    let u0 = cfg.anchor_u0.unwrap_or_else(|| data.domain.midpoint());
    let nf = construct(&data.curve, cfg.perm, u0).map_err(|e| e.at("normal_field"))?;
    let (eps0, source) = match epsilon0.or(cfg.epsilon0) {
        Some(e) => (e, "supplied"),
        None => {
            let base = build_base(&data.curve, &nf, u0).map_err(|e| e.at("bjorling"))?;
            let probe = probe_epsilon0(&base, &cfg.probe());
            if probe.flagged {
                return Err(Error::DegenerateConstants(
                    "probe found no converging perturbation".into(),
                )
                .at("bounds"));
            }
            (probe.epsilon0, "probed")
        }
    };
    let b = compute_eta(&nf, &data.curve, eps0, cfg.safety).map_err(|e| e.at("bounds"))?;
    let mut rep = Report::new();
    rep.push("perm", nf.perm, "(i,j,k)");
    rep.push("M", b.m, "sup |a'|");
    rep.push("r", b.r, "diameter");
    rep.push("tau", b.tau, "inf |q0|");
    rep.push("M_1", b.m1, "sup |q0|");
    rep.push("M_2", b.m2, "sup |p01|");
    rep.push("M_c", b.mc, "sup |cos theta|");
    rep.push("M_s", b.ms, "sup |sin theta|");
    rep.push("epsilon0", b.epsilon0, source);
    rep.push(
        "epsilon",
        b.epsilon,
        "safety * min(1, eps0 / (4 (M + 2) r))",
    );
    rep.push(
        "delta",
        b.delta,
        "safety * min(eps tau^3 / (4 M_2), tau^2 / 2)",
    );
    rep.push("epsilon1", b.epsilon1, "largest t with t^2 P(t) < delta");
    rep.push("eta", b.eta, "min(eps0 / 2, eps1^2)");
    for c in b.checks() {
        rep.push(
            format!("check.{}", c.name),
            if c.holds() { "satisfied" } else { "violated" },
            format!("{:e} < {:e}", c.lhs, c.rhs),
        );
    }
    rep.push_config(&cfg);
    rep.emit(report_path(common, &cfg))?;
    if b.all_hold() {
        Ok(())
    } else {
        Err(Error::Verification("a bound inequality is violated".into()).at("bounds"))
    }
}

fn run_verify(result: &Path, common: &Common) -> Result<()> {
    let file = ResultFile::load(result)?;
    let cfg = match &common.config {
        Some(_) => load_config(common)?,
        None => file.config.clone(),
    };
    let c = file.curves()?;
    let (on_i, along) = residuals_from_parts(&c.surface, &c.gamma, &c.a, &c.l, file.v0);
    let iso = isotropy_residual(&IsotropicCurve::new_unchecked(
        c.surface.clone(),
        file.anchor_u0,
    ));
    let (ur, vr) = SurfaceGrid::default_ranges(&file.domain);
    let orders = surface_check_orders(&c.surface, ur, vr, cfg.grid_nu / 2, cfg.grid_nv / 2)?;
    let mut rep = Report::new();
    rep.push("residual_on_I", on_i, "sup_I |X(u,0) - a(u)|");
    rep.push("interp_residual", along, "sup_I |X(gamma(u)) - l(u) - v0|");
    rep.push("isotropy_surface", iso, "sup |<f', f'>|");
    let names = ["harmonicity", "conformality_diag", "conformality_cross"];
    for (n, o) in names.iter().zip(orders) {
        match o {
            Some(o) => rep.push(format!("order.{n}"), o, "log2 ratio under h -> h/2"),
            None => rep.push(
                format!("order.{n}"),
                "roundoff",
                "log2 ratio under h -> h/2",
            ),
        }
    }
    rep.push_config(&cfg);
    rep.emit(report_path(common, &cfg))?;
    let mut failures = Vec::new();
    if !(on_i < VERIFY_TOL) {
        failures.push(format!("residual on I {on_i:e}"));
    }
    if !(along < VERIFY_TOL) {
        failures.push(format!("interpolation residual {along:e}"));
    }
    if !(iso < VERIFY_TOL) {
        failures.push(format!("isotropy {iso:e}"));
    }
    if orders.iter().flatten().any(|&o| !(o >= MIN_ORDER)) {
        failures.push(format!("finite-difference orders {orders:?}"));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(failures.join("; ")).at("verify"))
    }
}

fn run_mesh(result: &Path, out: &Path, common: &Common) -> Result<()> {
    let file = ResultFile::load(result)?;
    let cfg = match &common.config {
        Some(_) => load_config(common)?,
        None => file.config.clone(),
    };
    let c = file.curves()?;
    emit_mesh(&c.surface, &cfg, Some(out), common)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Bjorling { curve, out, common } => run_bjorling(&curve, out.as_deref(), &common),
        Cmd::Interpolate {
            curve,
            nearby,
            out,
            result,
            common,
        } => run_interpolate(
            &curve,
            nearby.as_deref(),
            out.as_deref(),
            result.as_deref(),
            &common,
        ),
        Cmd::Bounds {
            curve,
            epsilon0,
            common,
        } => run_bounds(&curve, epsilon0, &common),
        Cmd::Verify { result, common } => run_verify(&result, &common),
        Cmd::Mesh {
            result,
            out,
            common,
        } => run_mesh(&result, &out, &common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
