//! Batch front end.
//!
//! `yamabe <mode> --config <path> [--out <dir>] [--seed <u64>]
//! [--tol-scale <f>] [--jet-order <k>] [--slow]`
//!
//! Exit codes: 0 every assertion within tolerance; 1 usage or config error;
//! 2 tolerance violations found; 3 numerical failure (singular metric,
//! divergence, collapse of the warping function).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{self, Format, Job, Mode};
use crate::expr::ExprError;
use crate::geometry::GeometryError;
use crate::ode::{self, Classification, IntegrationStatus, ProfileTrajectory};
use crate::report;
use crate::sample::halton_box;
use crate::soliton::{self, IdentityReport, SolitonError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_TOLERANCE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "yamabe",
    version,
    about = "Curvature, soliton-identity and radial-profile jobs over chart metrics"
)]
struct Cli {
    #[command(subcommand)]
    mode: ModeCmd,
}

#[derive(Subcommand)]
enum ModeCmd {
    /// Evaluate curvature tensors over the sample set
    Curvature(JobArgs),
    /// Run the soliton identity suite and/or the Cotton/Bach battery
    Verify(JobArgs),
    /// Integrate the radial profile and track its diagnostics
    Profile(JobArgs),
    /// Integrate and classify the trajectory
    Classify(JobArgs),
    /// Run everything the config describes and emit all report formats
    Report(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// TOML job description
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sampling seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Multiply every tolerance by this factor
    #[arg(long)]
    tol_scale: Option<f64>,
    /// Jet order for curvature packs (3..=8)
    #[arg(long)]
    jet_order: Option<usize>,
    /// Enable the order-6 double-divergence identity
    #[arg(long)]
    slow: bool,
}

/// Parse argv, run the job, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own help/version output with success status
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (mode, args) = match &cli.mode {
        ModeCmd::Curvature(a) => (Mode::Curvature, a),
        ModeCmd::Verify(a) => (Mode::Verify, a),
        ModeCmd::Profile(a) => (Mode::Profile, a),
        ModeCmd::Classify(a) => (Mode::Classify, a),
        ModeCmd::Report(a) => (Mode::Report, a),
    };

    let mut job = match config::load_job(&args.config, mode) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(out) = &args.out {
        job.out_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        job.sampling.seed = seed;
    }
    if let Some(scale) = args.tol_scale {
        if !(scale > 0.0 && scale.is_finite()) {
            eprintln!("config error: --tol-scale must be positive and finite");
            return EXIT_USAGE;
        }
        job.tol = job.tol.scaled(scale);
    }
    let jet_order = match args.jet_order {
        Some(k) if !(3..=8).contains(&k) => {
            eprintln!("config error: --jet-order must lie in 3..=8");
            return EXIT_USAGE;
        }
        Some(k) => k,
        None => 4,
    };

    match execute(&job, jet_order, args.slow) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}: {}", f.label(), f.message);
            f.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn label(&self) -> &'static str {
        match self.code {
            EXIT_USAGE => "config error",
            EXIT_NUMERICAL => "numerical failure",
            _ => "error",
        }
    }

    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Failure {
        match &e {
            GeometryError::SingularMetric { .. } => Failure::numerical(e.to_string()),
            GeometryError::Expr(ExprError::Domain { .. }) => Failure::numerical(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<SolitonError> for Failure {
    fn from(e: SolitonError) -> Failure {
        match &e {
            SolitonError::Geometry(GeometryError::SingularMetric { .. })
            | SolitonError::Geometry(GeometryError::Expr(ExprError::Domain { .. })) => {
                Failure::numerical(e.to_string())
            }
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<ode::OdeError> for Failure {
    fn from(e: ode::OdeError) -> Failure {
        Failure::usage(e.to_string())
    }
}

impl From<report::ReportError> for Failure {
    fn from(e: report::ReportError) -> Failure {
        match e {
            report::ReportError::Empty => Failure::usage(e.to_string()),
            _ => Failure {
                code: EXIT_USAGE,
                message: e.to_string(),
            },
        }
    }
}

fn execute(job: &Job, jet_order: usize, slow: bool) -> Result<i32, Failure> {
    match job.mode {
        Mode::Curvature => run_curvature(job, jet_order),
        Mode::Verify => run_verify(job, slow).map(|(code, _)| code),
        Mode::Profile => run_profile(job).map(|(code, _, _)| code),
        Mode::Classify => run_classify(job).map(|(code, _, _, _)| code),
        Mode::Report => run_report(job, slow),
    }
}

fn wants(job: &Job, f: Format) -> bool {
    job.formats.contains(&f)
}

fn out_path(job: &Job, name: &str) -> PathBuf {
    job.out_dir.join(name)
}

/// Sample the chart box; a degenerate metric at a point is a hard error
/// unless the config opted into skipping such points.
fn sample_points(job: &Job, metric: &crate::geometry::MetricField) -> Result<Vec<Vec<f64>>, Failure> {
    let raw = halton_box(
        metric.domain(),
        job.sampling.count,
        job.sampling.seed,
        job.sampling.margin,
    );
    if !job.sampling.skip_singular {
        return Ok(raw);
    }
    let mut kept = Vec::with_capacity(raw.len());
    for p in raw {
        match metric.metric_values(&p) {
            Ok(_) => kept.push(p),
            Err(GeometryError::SingularMetric { .. }) => {
                println!("skipping singular sample point {p:?}");
            }
            Err(e) => return Err(e.into()),
        }
    }
    if kept.is_empty() {
        return Err(Failure::usage(
            "every sample point was singular; nothing to evaluate",
        ));
    }
    Ok(kept)
}

fn run_curvature(job: &Job, jet_order: usize) -> Result<i32, Failure> {
    let metric = job
        .metric
        .as_ref()
        .ok_or_else(|| Failure::usage("curvature mode needs a metric"))?;
    let points = sample_points(job, metric)?;
    let mut packs = Vec::with_capacity(points.len());
    let mut warned = false;
    for p in &points {
        let pack = metric.curvature_pack(p, jet_order)?;
        if !pack.positive_definite && !warned {
            println!(
                "warning: metric is not positive definite at {:?} (reported, not fatal)",
                p
            );
            warned = true;
        }
        packs.push(pack);
    }
    if wants(job, Format::Csv) {
        let csv = report::curvature_csv(&packs, metric.coords())?;
        report::write_file(&out_path(job, "curvature.csv"), &csv)?;
    }
    if wants(job, Format::Json) {
        let json = report::to_json(&packs)?;
        report::write_file(&out_path(job, "curvature.json"), &json)?;
    }
    let max_r = packs.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p.scalar));
    let min_r = packs.iter().fold(f64::INFINITY, |m, p| m.min(p.scalar));
    println!(
        "curvature: {} points, scalar curvature in [{min_r:.6e}, {max_r:.6e}]",
        packs.len()
    );
    Ok(EXIT_OK)
}

fn run_verify(job: &Job, slow: bool) -> Result<(i32, Option<IdentityReport>), Failure> {
    let mut combined: Option<IdentityReport> = None;

    if let Some(spec) = &job.soliton {
        let points = sample_points(job, &spec.metric)?;
        let rep = spec.identity_report(&points, &job.tol)?;
        combined = Some(rep);
    }

    if !job.battery.is_empty() {
        let mut merged: Option<IdentityReport> = None;
        for metric in &job.battery {
            let points = sample_points(job, metric)?;
            let rep = soliton::cotton_identities(metric, &points, slow, &job.tol)?;
            merged = Some(match merged {
                None => rep,
                Some(acc) => merge_reports(acc, rep),
            });
        }
        let battery_rep = merged.expect("battery is non-empty");
        combined = Some(match combined {
            None => battery_rep,
            Some(acc) => merge_reports(acc, battery_rep),
        });
    }

    let rep = combined.ok_or_else(|| Failure::usage("verify mode found nothing to check"))?;

    if wants(job, Format::Csv) {
        report::write_file(&out_path(job, "identities.csv"), &report::identity_csv(&rep)?)?;
    }
    if wants(job, Format::Json) {
        report::write_file(&out_path(job, "identities.json"), &report::identity_json(&rep)?)?;
    }
    if wants(job, Format::Markdown) {
        let md = report::markdown_summary("Identity verification", &job.tol, Some(&rep), None, None);
        report::write_file(&out_path(job, "summary.md"), &md)?;
    }

    for (key, e) in &rep.entries {
        println!(
            "identity {key}: max residual {:.3e} (tol {:.1e}) {}",
            e.max_residual,
            e.tolerance,
            if e.passed { "pass" } else { "FAIL" }
        );
    }
    if rep.gate_violated {
        println!("soliton gate VIOLATED: the input does not satisfy the soliton equation");
    }
    let code = if rep.all_passed() { EXIT_OK } else { EXIT_TOLERANCE };
    Ok((code, Some(rep)))
}

fn merge_reports(mut a: IdentityReport, b: IdentityReport) -> IdentityReport {
    a.points.extend(b.points);
    a.gate_violated |= b.gate_violated;
    for (key, entry) in b.entries {
        match a.entries.remove(&key) {
            None => {
                a.entries.insert(key, entry);
            }
            Some(mut acc) => {
                acc.residuals.extend(entry.residuals.iter().copied());
                if entry.max_residual > acc.max_residual {
                    acc.max_residual = entry.max_residual;
                    acc.worst_point = entry.worst_point;
                }
                acc.passed = acc.max_residual <= acc.tolerance;
                a.entries.insert(key, acc);
            }
        }
    }
    a
}

fn build_trajectory(job: &Job) -> Result<ProfileTrajectory, Failure> {
    let w = job
        .warped
        .as_ref()
        .ok_or_else(|| Failure::usage("profile mode needs a [warped] section"))?;
    let opts = ode::IntegratorOptions {
        rel_tol: w.rel_tol,
        abs_tol: w.abs_tol,
        ..Default::default()
    };
    let t = if w.origin_start {
        ode::integrate_from_origin(w.n, w.fiber_scalar, w.rho, w.epsilon, w.r_end, &opts)?
    } else {
        let (r0, fp, fpp) = w
            .initial
            .ok_or_else(|| Failure::usage("warped.initial is required without origin_start"))?;
        let ic = ode::OdeState::from_profile(w.n, w.fiber_scalar, w.rho, r0, fp, fpp)?;
        ode::integrate(w.n, w.fiber_scalar, w.rho, ic, w.r_end, &opts)?
    };
    Ok(t)
}

fn write_trajectory_outputs(job: &Job, t: &ProfileTrajectory) -> Result<(), Failure> {
    if wants(job, Format::Csv) {
        report::write_file(&out_path(job, "trajectory.csv"), &report::trajectory_csv(t)?)?;
    }
    if wants(job, Format::Json) {
        report::write_file(&out_path(job, "trajectory.json"), &report::trajectory_json(t)?)?;
    }
    if wants(job, Format::Svg) {
        report::write_file(&out_path(job, "chart.svg"), &report::trajectory_svg(t)?)?;
    }
    Ok(())
}

/// Trajectory-level assertions: the dual-route scalar-curvature residual,
/// the dense-output R″ identity, and (for launches balanced in the
/// conserved quantity) its drift.
fn trajectory_assertions(job: &Job, t: &ProfileTrajectory) -> Result<bool, Failure> {
    let inv = ode::track_invariants(t).map_err(|e| Failure::usage(e.to_string()))?;
    let mut ok = true;
    if inv.rpp_residual_max > job.tol.rpp {
        println!(
            "trajectory: R'' residual {:.3e} exceeds {:.1e}",
            inv.rpp_residual_max, job.tol.rpp
        );
        ok = false;
    }
    let first = &t.samples[0];
    let balanced = (first.fpp * first.fppp).abs() <= 1e-12;
    if t.n == 3 && balanced && inv.c_drift_max > job.tol.c_drift {
        println!(
            "trajectory: drift of the conserved quantity {:.3e} exceeds {:.1e}",
            inv.c_drift_max, job.tol.c_drift
        );
        ok = false;
    }
    println!(
        "trajectory: {} samples, status {:?}, R'' residual {:.3e}, c drift {:.3e}",
        inv.samples, t.status, inv.rpp_residual_max, inv.c_drift_max
    );
    Ok(ok)
}

fn status_code(t: &ProfileTrajectory) -> Option<i32> {
    match t.status {
        IntegrationStatus::Completed => None,
        IntegrationStatus::PhiFloor => Some(EXIT_NUMERICAL),
        IntegrationStatus::BlowUp => Some(EXIT_NUMERICAL),
        IntegrationStatus::StepUnderflow => Some(EXIT_NUMERICAL),
    }
}

fn run_profile(job: &Job) -> Result<(i32, ProfileTrajectory, bool), Failure> {
    let t = build_trajectory(job)?;
    write_trajectory_outputs(job, &t)?;
    if let Some(code) = status_code(&t) {
        println!("trajectory halted: {:?} at r = {}", t.status, t.last().r);
        return Ok((code, t, false));
    }
    let ok = trajectory_assertions(job, &t)?;
    Ok((if ok { EXIT_OK } else { EXIT_TOLERANCE }, t, ok))
}

fn run_classify(job: &Job) -> Result<(i32, ProfileTrajectory, Classification, bool), Failure> {
    let t = build_trajectory(job)?;
    write_trajectory_outputs(job, &t)?;
    let w = job.warped.as_ref().expect("classify mode validated warped");
    let cls = ode::classify(&t, w.rho, job.tol.classify);
    if wants(job, Format::Json) {
        report::write_file(&out_path(job, "classification.json"), &report::to_json(&cls)?)?;
    }
    println!("classification: {:?}", cls.label);
    for f in &cls.evidence.fired {
        println!("  evidence: {f}");
    }
    if let Some(code) = status_code(&t) {
        println!("trajectory halted: {:?} at r = {}", t.status, t.last().r);
        return Ok((code, t, cls, false));
    }
    let ok = trajectory_assertions(job, &t)?;
    let code = if ok { EXIT_OK } else { EXIT_TOLERANCE };
    Ok((code, t, cls, ok))
}

fn run_report(job: &Job, slow: bool) -> Result<i32, Failure> {
    let mut worst = EXIT_OK;
    let mut identity = None;
    let mut trajectory = None;
    let mut classification = None;

    if job.soliton.is_some() || !job.battery.is_empty() {
        let (code, rep) = run_verify(job, slow)?;
        worst = worst.max(code);
        identity = rep;
    }
    if job.warped.is_some() {
        let (code, t, cls, _) = run_classify(job)?;
        worst = worst.max(code);
        trajectory = Some(t);
        classification = Some(cls);
    }
    if job.metric.is_some() && job.soliton.is_none() && job.battery.is_empty() {
        let code = run_curvature(job, 4)?;
        worst = worst.max(code);
    }

    let md = report::markdown_summary(
        "Job report",
        &job.tol,
        identity.as_ref(),
        trajectory.as_ref(),
        classification.as_ref(),
    );
    report::write_file(&out_path(job, "summary.md"), &md)?;
    Ok(worst)
}
