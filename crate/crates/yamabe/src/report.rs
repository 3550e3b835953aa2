//! Report emitters: CSV, JSON, Markdown and a single-series SVG chart.
//!
//! All output is byte-deterministic for identical inputs: floats print via
//! the shortest round-trip formatter, JSON maps are ordered, and nothing
//! depends on wall-clock time or environment.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::CurvaturePack;
use crate::ode::{Classification, ProfileTrajectory};
use crate::soliton::IdentityReport;
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("nothing to report")]
    Empty,
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| ReportError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
    }
    std::fs::write(path, contents).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, ReportError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Trajectory CSV with the stable column contract
/// `r,Fp,Fpp,Fppp,R,c,res_R2,res_key3`.
pub fn trajectory_csv(t: &ProfileTrajectory) -> Result<String, ReportError> {
    if t.samples.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut out = String::from("r,Fp,Fpp,Fppp,R,c,res_R2,res_key3\n");
    for (k, s) in t.samples.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.r, s.fp, s.fpp, s.fppp, t.scalar[k], t.c[k], t.res_r2[k], t.res_key3[k]
        )
        .expect("string writes are infallible");
    }
    Ok(out)
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    n: usize,
    fiber_scalar_curvature: f64,
    rho: f64,
    method: &'a str,
    rel_tol: f64,
    abs_tol: f64,
    status: crate::ode::IntegrationStatus,
    accepted_steps: usize,
    rejected_steps: usize,
    from_origin: bool,
    r: Vec<f64>,
    fp: Vec<f64>,
    fpp: Vec<f64>,
    fppp: Vec<f64>,
    scalar: Vec<f64>,
    c: Vec<f64>,
    res_r2: Vec<f64>,
    res_key3: Vec<f64>,
}

pub fn trajectory_json(t: &ProfileTrajectory) -> Result<String, ReportError> {
    if t.samples.is_empty() {
        return Err(ReportError::Empty);
    }
    to_json(&TrajectoryJson {
        n: t.n,
        fiber_scalar_curvature: t.fiber_scalar,
        rho: t.rho,
        method: t.method,
        rel_tol: t.rel_tol,
        abs_tol: t.abs_tol,
        status: t.status,
        accepted_steps: t.stats.accepted,
        rejected_steps: t.stats.rejected,
        from_origin: t.from_origin,
        r: t.samples.iter().map(|s| s.r).collect(),
        fp: t.samples.iter().map(|s| s.fp).collect(),
        fpp: t.samples.iter().map(|s| s.fpp).collect(),
        fppp: t.samples.iter().map(|s| s.fppp).collect(),
        scalar: t.scalar.clone(),
        c: t.c.clone(),
        res_r2: t.res_r2.clone(),
        res_key3: t.res_key3.clone(),
    })
}

/// Identity report CSV: one row per identity per point, then a `max`
/// summary row per identity.
pub fn identity_csv(rep: &IdentityReport) -> Result<String, ReportError> {
    if rep.entries.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut out = String::from("identity,point_index,residual\n");
    for (key, entry) in &rep.entries {
        for (k, r) in entry.residuals.iter().enumerate() {
            writeln!(out, "{key},{k},{r}").expect("string writes are infallible");
        }
    }
    for (key, entry) in &rep.entries {
        writeln!(out, "{key},max,{}", entry.max_residual).expect("string writes are infallible");
    }
    Ok(out)
}

/// Identity report JSON: an object keyed by identity name.
pub fn identity_json(rep: &IdentityReport) -> Result<String, ReportError> {
    if rep.entries.is_empty() {
        return Err(ReportError::Empty);
    }
    to_json(&rep.entries)
}

/// Curvature pack CSV over sample points. Columns: the chart coordinates,
/// then `R`, the Ricci components row-major, and the max-abs norms of the
/// Riemann, Cotton and Bach tensors.
pub fn curvature_csv(packs: &[CurvaturePack], coords: &[String]) -> Result<String, ReportError> {
    let Some(first) = packs.first() else {
        return Err(ReportError::Empty);
    };
    let n = first.n;
    let mut out = String::new();
    for c in coords {
        write!(out, "{c},").expect("string writes are infallible");
    }
    out.push('R');
    for i in 0..n {
        for j in 0..n {
            write!(out, ",ric_{i}{j}").expect("string writes are infallible");
        }
    }
    out.push_str(",riem_max,cotton_max,bach_max,positive_definite\n");
    for p in packs {
        for v in &p.point {
            write!(out, "{v},").expect("string writes are infallible");
        }
        write!(out, "{}", p.scalar).expect("string writes are infallible");
        for v in &p.ricci.components {
            write!(out, ",{v}").expect("string writes are infallible");
        }
        let bach = p
            .bach
            .as_ref()
            .map(|b| b.max_abs().to_string())
            .unwrap_or_default();
        writeln!(
            out,
            ",{},{},{},{}",
            p.riemann.max_abs(),
            p.cotton.max_abs(),
            bach,
            p.positive_definite
        )
        .expect("string writes are infallible");
    }
    Ok(out)
}

/// Markdown summary embedding the tolerance table and whatever results the
/// job produced.
pub fn markdown_summary(
    title: &str,
    tol: &Tolerances,
    identity: Option<&IdentityReport>,
    trajectory: Option<&ProfileTrajectory>,
    classification: Option<&Classification>,
) -> String {
    let mut out = String::new();
    writeln!(out, "# {title}\n").unwrap();

    writeln!(out, "## Tolerances\n").unwrap();
    writeln!(out, "| threshold | value |").unwrap();
    writeln!(out, "|---|---|").unwrap();
    writeln!(out, "| YS gate | {:e} |", tol.ys_gate).unwrap();
    writeln!(out, "| soliton identities | {:e} |", tol.soliton_identity).unwrap();
    writeln!(out, "| order-3 structure | {:e} |", tol.order3).unwrap();
    writeln!(out, "| DIVB (order 5) | {:e} |", tol.divb).unwrap();
    writeln!(out, "| M2 (order 5) | {:e} |", tol.m2).unwrap();
    writeln!(out, "| DDIV (order 6) | {:e} |", tol.ddiv).unwrap();
    writeln!(out, "| classification | {:e} |", tol.classify).unwrap();
    writeln!(out).unwrap();

    if let Some(rep) = identity {
        writeln!(out, "## Identity residuals\n").unwrap();
        if rep.gate_violated {
            writeln!(
                out,
                "**Soliton gate violated:** the YS residual exceeds its gate; the derived identities are reported for diagnosis, not asserted.\n"
            )
            .unwrap();
        }
        writeln!(out, "| identity | max residual | tolerance | status |").unwrap();
        writeln!(out, "|---|---|---|---|").unwrap();
        for (key, e) in &rep.entries {
            writeln!(
                out,
                "| {key} | {:.3e} | {:.1e} | {} |",
                e.max_residual,
                e.tolerance,
                if e.passed { "pass" } else { "FAIL" }
            )
            .unwrap();
        }
        writeln!(out).unwrap();
    }

    if let Some(t) = trajectory {
        let (lo, hi) = t.r_span();
        writeln!(out, "## Trajectory\n").unwrap();
        writeln!(out, "- status: {:?}", t.status).unwrap();
        writeln!(out, "- method: {} (rel_tol {:e}, abs_tol {:e})", t.method, t.rel_tol, t.abs_tol).unwrap();
        writeln!(out, "- span: r in [{lo}, {hi}], {} samples", t.samples.len()).unwrap();
        writeln!(
            out,
            "- steps: {} accepted, {} rejected",
            t.stats.accepted, t.stats.rejected
        )
        .unwrap();
        writeln!(out).unwrap();
    }

    if let Some(c) = classification {
        writeln!(out, "## Classification\n").unwrap();
        writeln!(out, "- label: **{:?}**", c.label).unwrap();
        writeln!(out, "- tolerance: {:e}", c.evidence.tolerance).unwrap();
        writeln!(out, "- rho: {}", c.evidence.rho).unwrap();
        writeln!(out, "- max |c|: {:.3e}", c.evidence.max_abs_c).unwrap();
        writeln!(out, "- max |R|: {:.3e}", c.evidence.max_abs_scalar).unwrap();
        writeln!(out, "- max |F''|: {:.3e}", c.evidence.max_abs_fpp).unwrap();
        writeln!(out, "- max |R − rho|: {:.3e}", c.evidence.max_scalar_minus_rho).unwrap();
        for f in &c.evidence.fired {
            writeln!(out, "- fired: {f}").unwrap();
        }
        writeln!(out).unwrap();
    }

    out
}

/// Simple polyline chart of trajectory diagnostics: r against R and c.
pub fn trajectory_svg(t: &ProfileTrajectory) -> Result<String, ReportError> {
    if t.samples.len() < 2 {
        return Err(ReportError::Empty);
    }
    let rs: Vec<f64> = t.samples.iter().map(|s| s.r).collect();
    let series: Vec<(&str, &[f64], &str)> = vec![
        ("R", &t.scalar, "#c0392b"),
        ("c", &t.c, "#2980b9"),
    ];

    let (w, h) = (640.0, 400.0);
    let (ml, mr, mt, mb) = (60.0, 20.0, 30.0, 40.0);
    let x_min = rs[0];
    let x_max = *rs.last().unwrap();
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, ys, _) in &series {
        for &v in ys.iter() {
            if v.is_finite() {
                y_min = y_min.min(v);
                y_max = y_max.max(v);
            }
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        y_min = -1.0;
        y_max = 1.0;
    }
    if y_max - y_min < 1e-12 {
        y_max += 0.5;
        y_min -= 0.5;
    }
    let sx = |x: f64| ml + (x - x_min) / (x_max - x_min) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - y_min) / (y_max - y_min) * (h - mt - mb);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    // axes
    writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333" stroke-width="1"/>"##,
        ml,
        h - mb,
        w - mr,
        h - mb
    )
    .unwrap();
    writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333" stroke-width="1"/>"##,
        ml, mt, ml,
        h - mb
    )
    .unwrap();
    writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" font-size="11" fill="#333">r = {x_min:.4}</text>"##,
        ml,
        h - mb + 16.0
    )
    .unwrap();
    writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" font-size="11" fill="#333" text-anchor="end">r = {x_max:.4}</text>"##,
        w - mr,
        h - mb + 16.0
    )
    .unwrap();
    writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" font-size="11" fill="#333">{y_max:.4}</text>"##,
        4.0,
        mt + 6.0
    )
    .unwrap();
    writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" font-size="11" fill="#333">{y_min:.4}</text>"##,
        4.0,
        h - mb
    )
    .unwrap();

    for (k, (name, ys, color)) in series.iter().enumerate() {
        let mut pts = String::new();
        let mut any = false;
        for (x, y) in rs.iter().zip(ys.iter()) {
            if y.is_finite() {
                write!(pts, "{:.2},{:.2} ", sx(*x), sy(*y)).unwrap();
                any = true;
            }
        }
        if !any {
            continue;
        }
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.trim_end()
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="{color}">{name}</text>"#,
            w - mr - 40.0,
            mt + 14.0 * (k as f64 + 1.0)
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}
