//! Job configuration: a single TOML file describing the chart, metric,
//! potential, warped-profile parameters, sampling, tolerances and outputs.
//! Expressions are quoted strings parsed against the declared coordinate
//! and parameter names. Every validation error carries the config key it
//! refers to.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::expr::{parse, Expr};
use crate::geometry::MetricField;
use crate::soliton::SolitonSpec;
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {message}")]
    Toml { path: PathBuf, message: String },
    #[error("{path}: missing required key `{key}`")]
    Missing { path: PathBuf, key: String },
    #[error("{path}: invalid value for `{key}`: {message}")]
    Invalid {
        path: PathBuf,
        key: String,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Curvature,
    Verify,
    Profile,
    Classify,
    Report,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        Some(match s {
            "curvature" => Mode::Curvature,
            "verify" => Mode::Verify,
            "profile" => Mode::Profile,
            "classify" => Mode::Classify,
            "report" => Mode::Report,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Curvature => "curvature",
            Mode::Verify => "verify",
            Mode::Profile => "profile",
            Mode::Classify => "classify",
            Mode::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Markdown,
    Svg,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<String>,
    chart: Option<RawChart>,
    metric: Option<RawMetric>,
    potential: Option<RawPotential>,
    params: Option<BTreeMap<String, f64>>,
    warped: Option<RawWarped>,
    battery: Option<RawBattery>,
    sampling: Option<RawSampling>,
    tolerances: Option<RawTolerances>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    dimension: usize,
    coordinates: Vec<String>,
    #[serde(rename = "box")]
    box_: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    components: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    f: Option<String>,
    rho: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWarped {
    n: usize,
    fiber_scalar_curvature: f64,
    fprime: Option<String>,
    initial: Option<RawInitial>,
    origin_start: Option<bool>,
    epsilon: Option<f64>,
    r_end: f64,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    r: f64,
    fp: f64,
    fpp: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBattery {
    metrics: Vec<RawMetric>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    count: Option<usize>,
    seed: Option<u64>,
    margin: Option<f64>,
    skip_singular: Option<bool>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    ys_gate: Option<f64>,
    soliton_identity: Option<f64>,
    order3: Option<f64>,
    divb: Option<f64>,
    m2: Option<f64>,
    ddiv: Option<f64>,
    classify: Option<f64>,
    rpp: Option<f64>,
    c_drift: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    formats: Option<Vec<Format>>,
}

/// Deterministic sampling parameters.
#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub count: usize,
    pub seed: u64,
    pub margin: f64,
    /// Drop sample points where the metric degenerates instead of failing.
    pub skip_singular: bool,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            count: 64,
            seed: 42,
            margin: 0.05,
            skip_singular: false,
        }
    }
}

/// Warped-profile job parameters.
#[derive(Debug, Clone)]
pub struct WarpedJob {
    pub n: usize,
    pub fiber_scalar: f64,
    pub rho: f64,
    pub fprime: Option<Expr>,
    pub initial: Option<(f64, f64, f64)>,
    pub origin_start: bool,
    pub epsilon: f64,
    pub r_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// A validated, fully parsed job.
#[derive(Debug)]
pub struct Job {
    pub mode: Mode,
    pub config_path: PathBuf,
    pub metric: Option<MetricField>,
    pub soliton: Option<SolitonSpec>,
    pub battery: Vec<MetricField>,
    pub warped: Option<WarpedJob>,
    pub sampling: Sampling,
    pub tol: Tolerances,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
}

struct Loader<'a> {
    path: &'a Path,
}

impl<'a> Loader<'a> {
    fn missing(&self, key: &str) -> ConfigError {
        ConfigError::Missing {
            path: self.path.to_path_buf(),
            key: key.to_string(),
        }
    }

    fn invalid(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            path: self.path.to_path_buf(),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn parse_expr(
        &self,
        src: &str,
        declared: &[&str],
        key: &str,
    ) -> Result<Expr, ConfigError> {
        parse(src, declared).map_err(|e| self.invalid(key, e.to_string()))
    }

    fn metric_field(
        &self,
        chart: &RawChart,
        raw: &RawMetric,
        params: &BTreeMap<String, f64>,
        key_prefix: &str,
    ) -> Result<MetricField, ConfigError> {
        let n = chart.dimension;
        if chart.coordinates.len() != n {
            return Err(self.invalid(
                "chart.coordinates",
                format!("expected {n} names, got {}", chart.coordinates.len()),
            ));
        }
        if chart.box_.len() != n {
            return Err(self.invalid(
                "chart.box",
                format!("expected {n} intervals, got {}", chart.box_.len()),
            ));
        }
        if raw.components.len() != n || raw.components.iter().any(|row| row.len() != n) {
            return Err(self.invalid(
                &format!("{key_prefix}.components"),
                format!("expected an {n}x{n} matrix"),
            ));
        }
        let mut declared: Vec<&str> = chart.coordinates.iter().map(|s| s.as_str()).collect();
        declared.extend(params.keys().map(|s| s.as_str()));
        let mut rows = Vec::with_capacity(n);
        for (i, row) in raw.components.iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for (j, src) in row.iter().enumerate() {
                out.push(self.parse_expr(
                    src,
                    &declared,
                    &format!("{key_prefix}.components[{i}][{j}]"),
                )?);
            }
            rows.push(out);
        }
        MetricField::new(
            chart.coordinates.clone(),
            rows,
            chart.box_.clone(),
            params.clone(),
        )
        .map_err(|e| self.invalid(&format!("{key_prefix}.components"), e.to_string()))
    }
}

/// Load and validate a config file against the requested mode. When the file
/// declares its own `mode`, it must match.
pub fn load_job(path: &Path, mode: Mode) -> Result<Job, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw: RawConfig = toml::from_str(&text).map_err(|e| ConfigError::Toml {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let ld = Loader { path };

    if let Some(declared_mode) = &raw.mode {
        match Mode::parse(declared_mode) {
            Some(m) if m == mode => {}
            Some(m) => {
                return Err(ld.invalid(
                    "mode",
                    format!(
                        "config declares mode `{}` but `{}` was requested",
                        m.name(),
                        mode.name()
                    ),
                ))
            }
            None => {
                return Err(ld.invalid("mode", format!("unknown mode `{declared_mode}`")));
            }
        }
    }

    let params = raw.params.clone().unwrap_or_default();

    let sampling = {
        let s = raw.sampling.as_ref();
        let d = Sampling::default();
        let sampling = Sampling {
            count: s.and_then(|s| s.count).unwrap_or(d.count),
            seed: s.and_then(|s| s.seed).unwrap_or(d.seed),
            margin: s.and_then(|s| s.margin).unwrap_or(d.margin),
            skip_singular: s.and_then(|s| s.skip_singular).unwrap_or(d.skip_singular),
        };
        if sampling.count == 0 {
            return Err(ld.invalid("sampling.count", "must be at least 1"));
        }
        if !(0.0..0.5).contains(&sampling.margin) {
            return Err(ld.invalid("sampling.margin", "must lie in [0, 0.5)"));
        }
        sampling
    };

    let tol = {
        let o = raw.tolerances.unwrap_or_default();
        let d = Tolerances::default();
        Tolerances {
            ys_gate: o.ys_gate.unwrap_or(d.ys_gate),
            soliton_identity: o.soliton_identity.unwrap_or(d.soliton_identity),
            order3: o.order3.unwrap_or(d.order3),
            divb: o.divb.unwrap_or(d.divb),
            m2: o.m2.unwrap_or(d.m2),
            ddiv: o.ddiv.unwrap_or(d.ddiv),
            classify: o.classify.unwrap_or(d.classify),
            rpp: o.rpp.unwrap_or(d.rpp),
            c_drift: o.c_drift.unwrap_or(d.c_drift),
        }
    };

    let (out_dir, formats) = {
        let o = raw.output.as_ref();
        let dir = o
            .and_then(|o| o.dir.clone())
            .unwrap_or_else(|| "out".to_string());
        let formats = o
            .and_then(|o| o.formats.clone())
            .unwrap_or_else(|| vec![Format::Csv, Format::Json]);
        (PathBuf::from(dir), formats)
    };

    // chart-based pieces
    let metric = match (&raw.chart, &raw.metric) {
        (Some(chart), Some(m)) => {
            let mut field = ld.metric_field(chart, m, &params, "metric")?;
            if let Some(pot) = &raw.potential {
                if let Some(src) = &pot.f {
                    let mut declared: Vec<&str> =
                        chart.coordinates.iter().map(|s| s.as_str()).collect();
                    declared.extend(params.keys().map(|s| s.as_str()));
                    let f = ld.parse_expr(src, &declared, "potential.f")?;
                    field = field.with_potential(f);
                }
            }
            Some(field)
        }
        (None, Some(_)) => return Err(ld.missing("chart")),
        _ => None,
    };

    let soliton = match (&metric, &raw.potential) {
        (Some(m), Some(pot)) if pot.f.is_some() => Some(SolitonSpec::new(
            m.clone(),
            m.potential().expect("potential attached above").clone(),
            pot.rho,
        )),
        _ => None,
    };

    let battery = match (&raw.chart, &raw.battery) {
        (Some(chart), Some(b)) => {
            if b.metrics.is_empty() {
                return Err(ld.invalid("battery.metrics", "must list at least one metric"));
            }
            let mut out = Vec::with_capacity(b.metrics.len());
            for (k, m) in b.metrics.iter().enumerate() {
                out.push(ld.metric_field(chart, m, &params, &format!("battery.metrics[{k}]"))?);
            }
            out
        }
        (None, Some(_)) => return Err(ld.missing("chart")),
        _ => Vec::new(),
    };

    let warped = match &raw.warped {
        Some(w) => {
            if w.n < 3 {
                return Err(ld.invalid("warped.n", "dimension must be >= 3"));
            }
            let rho = raw
                .potential
                .as_ref()
                .map(|p| p.rho)
                .ok_or_else(|| ld.missing("potential.rho"))?;
            let fprime = match &w.fprime {
                Some(src) => {
                    let mut declared: Vec<&str> = vec!["r"];
                    declared.extend(params.keys().map(|s| s.as_str()));
                    Some(ld.parse_expr(src, &declared, "warped.fprime")?)
                }
                None => None,
            };
            let origin_start = w.origin_start.unwrap_or(false);
            let initial = w.initial.as_ref().map(|i| (i.r, i.fp, i.fpp));
            if initial.is_none() && !origin_start {
                return Err(ld.invalid(
                    "warped",
                    "profile jobs need `initial` conditions or `origin_start = true`",
                ));
            }
            if let Some((_, fp, _)) = initial {
                if fp <= 0.0 {
                    return Err(ld.invalid("warped.initial.fp", "F' must be positive"));
                }
            }
            Some(WarpedJob {
                n: w.n,
                fiber_scalar: w.fiber_scalar_curvature,
                rho,
                fprime,
                initial,
                origin_start,
                epsilon: w.epsilon.unwrap_or(1e-4),
                r_end: w.r_end,
                rel_tol: w.rel_tol.unwrap_or(1e-10),
                abs_tol: w.abs_tol.unwrap_or(1e-12),
            })
        }
        None => None,
    };

    // mode-required fields
    match mode {
        Mode::Curvature => {
            if metric.is_none() {
                return Err(ld.missing("metric"));
            }
        }
        Mode::Verify => {
            if soliton.is_none() && battery.is_empty() {
                return Err(ld.missing("potential.f (or battery.metrics)"));
            }
        }
        Mode::Profile | Mode::Classify => {
            if warped.is_none() {
                return Err(ld.missing("warped"));
            }
        }
        Mode::Report => {
            if metric.is_none() && soliton.is_none() && battery.is_empty() && warped.is_none() {
                return Err(ld.missing("metric, potential, battery or warped"));
            }
        }
    }

    Ok(Job {
        mode,
        config_path: path.to_path_buf(),
        metric,
        soliton,
        battery,
        warped,
        sampling,
        tol,
        out_dir,
        formats,
    })
}
