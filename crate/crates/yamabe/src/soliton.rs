//! Gradient Yamabe soliton residual suites.
//!
//! A soliton is a metric g with potential F and constant ρ satisfying
//! (R − ρ)g = ∇∇F. This module evaluates that equation and its standard
//! consequences as pointwise residuals over deterministic sample sets:
//!
//! - YS:   (R − ρ)g − ∇∇F
//! - TYS:  n(R − ρ) − ΔF                    (trace)
//! - P1:   Δ∇F − ∇ΔF − Ric(∇F,·)            (commutation, holds for any g, F)
//! - P2:   (n−1)∇R + Ric(∇F,·)
//! - P3:   (n−1)g(∇R,∇F) + Ric(∇F,∇F)
//! - P4:   (n−1)ΔR + ½g(∇R,∇F) + R(R−ρ)
//! - P5:   ΔR − Ric(∇F,∇F)/(2(n−1)²) + R(R−ρ)/(n−1)
//!
//! P2–P5 are consequences of YS, so the report gates them on the YS
//! residual: a violated gate is flagged, not failed. Scalar-curvature
//! derivatives come from jets of the curvature field; a finite-difference
//! route recomputes them independently and the larger of the two residuals
//! is reported.
//!
//! The Cotton/Bach battery (DIVB, M2, DDIV) lives here too since it shares
//! the report plumbing:
//!
//! - DIVB: ∇^i B_{ij} + C_{jip}R^{ip}        (jet order 5)
//! - M2:   C^{ijk}∇_i R_{jk} − ½|C|²          (jet order 5)
//! - DDIV: ∇_i∇_j B_{ji} + B^{jk}R_{jk} + ½|C|²  (jet order 6, slow)

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{eval_jet, Expr};
use crate::geometry::{cov_deriv, for_each_index, GeometryError, JetArr, MetricField};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum SolitonError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("identity suite needs at least one sample point")]
    NoPoints,
    #[error("the Cotton/Bach identity battery needs dimension 3, got {0}")]
    DimensionNot3(usize),
    #[error("non-finite residual for {identity} at {point:?}")]
    NonFiniteResidual { identity: String, point: Vec<f64> },
}

/// Shrinking (ρ > 0), steady (ρ = 0) or expanding (ρ < 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolitonKind {
    Shrinking,
    Steady,
    Expanding,
}

impl SolitonKind {
    pub fn from_rho(rho: f64) -> SolitonKind {
        if rho > 0.0 {
            SolitonKind::Shrinking
        } else if rho < 0.0 {
            SolitonKind::Expanding
        } else {
            SolitonKind::Steady
        }
    }
}

/// Metric, potential and soliton constant; the kind is derived from ρ.
#[derive(Debug, Clone)]
pub struct SolitonSpec {
    pub metric: MetricField,
    pub potential: Expr,
    pub rho: f64,
    pub kind: SolitonKind,
}

impl SolitonSpec {
    pub fn new(metric: MetricField, potential: Expr, rho: f64) -> SolitonSpec {
        SolitonSpec {
            metric,
            potential,
            rho,
            kind: SolitonKind::from_rho(rho),
        }
    }

    /// Residual matrix ∇∇F − (R−ρ)g and its max-abs norm at one point.
    pub fn soliton_residual(&self, point: &[f64]) -> Result<(Vec<f64>, f64), SolitonError> {
        let n = self.metric.dimension();
        let hess = self.metric.hessian(&self.potential, point)?;
        let (ric_scalar, g) = {
            let (_, r) = self.metric.ricci_scalar(point)?;
            let (g, _) = self.metric.metric_values(point)?;
            (r, g)
        };
        let mut mat = vec![0.0; n * n];
        let mut norm = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = hess.get(&[i, j]) - (ric_scalar - self.rho) * g[i * n + j];
                mat[i * n + j] = v;
                norm = norm.max(v.abs());
            }
        }
        Ok((mat, norm))
    }

    /// Full identity suite over a sample set.
    pub fn identity_report(
        &self,
        points: &[Vec<f64>],
        tol: &Tolerances,
    ) -> Result<IdentityReport, SolitonError> {
        if points.is_empty() {
            return Err(SolitonError::NoPoints);
        }
        let keys = ["YS", "TYS", "P1", "P2", "P3", "P4", "P5"];
        let mut residuals: BTreeMap<&str, Vec<f64>> =
            keys.iter().map(|k| (*k, Vec::new())).collect();
        for p in points {
            let r = self.identities_at(p)?;
            residuals.get_mut("YS").unwrap().push(r.ys);
            residuals.get_mut("TYS").unwrap().push(r.tys);
            residuals.get_mut("P1").unwrap().push(r.p1);
            residuals.get_mut("P2").unwrap().push(r.p2);
            residuals.get_mut("P3").unwrap().push(r.p3);
            residuals.get_mut("P4").unwrap().push(r.p4);
            residuals.get_mut("P5").unwrap().push(r.p5);
        }
        let gate_violated = residuals["YS"].iter().any(|&v| v > tol.ys_gate);
        let mut entries = BTreeMap::new();
        for key in keys {
            let tolerance = if key == "YS" {
                tol.ys_gate
            } else {
                tol.soliton_identity
            };
            entries.insert(
                key.to_string(),
                IdentityEntry::build(key, &residuals[key], points, tolerance)?,
            );
        }
        Ok(IdentityReport {
            entries,
            gate_violated,
            points: points.to_vec(),
        })
    }

    /// All seven residuals at one point, P2–P5 with the jet route and the
    /// finite-difference route; each reported residual is the larger.
    fn identities_at(&self, point: &[f64]) -> Result<PointResiduals, SolitonError> {
        let m = &self.metric;
        let n = m.dimension();
        let nf = n as f64;
        let rho = self.rho;

        let mut ev = m.evaluator(point, 4)?;
        let f_jets = eval_jet(&self.potential, &m.bindings(point), 4)
            .map_err(GeometryError::Expr)?;

        let g = ev.g.values();
        let gi = ev.g_inv.values();
        let gamma = ev.gamma().clone();
        let ric = ev.ricci().clone();
        let scalar_jet = ev.scalar().clone();
        let r0 = scalar_jet.value();

        // gradient of F as a rank-1 jet field, order 3
        let grad_f = JetArr::from_fn(n, 1, |idx| f_jets.derivative(idx[0]));
        // Hessian of F as jets, order 2
        let hess = cov_deriv(&grad_f, &gamma);

        // YS
        let mut ys = 0.0f64;
        for_each_index(n, 2, |idx| {
            let v = hess.get(idx).value() - (r0 - rho) * g[idx[0] * n + idx[1]];
            ys = ys.max(v.abs());
        });

        // ΔF as a jet (order 2): g^{ij} Hess_{ij}
        let gi_jets = ev.g_inv.trunc(hess.order());
        let mut lap_f_jet = None;
        for i in 0..n {
            for j in 0..n {
                let term = gi_jets.get(&[i, j]) * hess.get(&[i, j]);
                lap_f_jet = Some(match lap_f_jet {
                    Some(acc) => &acc + &term,
                    None => term,
                });
            }
        }
        let lap_f_jet = lap_f_jet.unwrap();
        let tys = (nf * (r0 - rho) - lap_f_jet.value()).abs();

        // raised gradient ∇F^i and first partials ∂_i F
        let df: Vec<f64> = (0..n).map(|i| f_jets.derivative(i).value()).collect();
        let grad_f_up: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| gi[i * n + j] * df[j]).sum())
            .collect();

        // P1: rough Laplacian of dF vs ∇ΔF + Ric(∇F,·)
        let hess2 = cov_deriv(&hess, &gamma); // (∇∇ dF)_{b a i}, order 1
        let mut p1 = 0.0f64;
        for i in 0..n {
            let mut rough = 0.0;
            for a in 0..n {
                for b in 0..n {
                    rough += gi[b * n + a] * hess2.get(&[b, a, i]).value();
                }
            }
            let d_lap_f = lap_f_jet.derivative(i).value();
            let ric_df: f64 = (0..n).map(|j| ric.get(&[i, j]).value() * grad_f_up[j]).sum();
            p1 = p1.max((rough - d_lap_f - ric_df).abs());
        }

        // scalar-curvature derivatives: jet route
        let dr_jets: Vec<f64> = (0..n).map(|i| scalar_jet.derivative(i).value()).collect();
        let lap_r_jets = scalar_laplacian(&scalar_jet, &gamma, &gi, n);

        // finite-difference route for ∂R and ΔR: fourth-order central
        // stencils at h and h/2, Richardson-combined to cancel the h⁴ term
        let scalar_at = |q: &[f64]| -> Result<f64, SolitonError> {
            let mut e = m.evaluator(q, 2)?;
            Ok(e.scalar().value())
        };
        let h0 = 2e-2;
        let richardson = |coarse: f64, fine: f64| (16.0 * fine - coarse) / 15.0;
        let mut dr_fd = vec![0.0; n];
        let mut hess_r_fd = vec![0.0; n * n];
        let f0 = scalar_at(point)?;
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            let f = |s: f64| -> Result<f64, SolitonError> {
                let mut q = point.to_vec();
                q[i] += s;
                scalar_at(&q)
            };
            let grad_at = |h: f64| -> Result<f64, SolitonError> {
                Ok((8.0 * (f(h)? - f(-h)?) - (f(2.0 * h)? - f(-2.0 * h)?)) / (12.0 * h))
            };
            dr_fd[i] = richardson(grad_at(h0)?, grad_at(h0 / 2.0)?);
            let diag_at = |h: f64| -> Result<f64, SolitonError> {
                Ok((-f(2.0 * h)? + 16.0 * f(h)? - 30.0 * f0 + 16.0 * f(-h)? - f(-2.0 * h)?)
                    / (12.0 * h * h))
            };
            hess_r_fd[i * n + i] = richardson(diag_at(h0)?, diag_at(h0 / 2.0)?);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                // nested fourth-order first-derivative stencils
                let mixed_at = |h: f64| -> Result<f64, SolitonError> {
                    let g1 = |si: f64| -> Result<f64, SolitonError> {
                        let f = |sj: f64| -> Result<f64, SolitonError> {
                            let mut q = point.to_vec();
                            q[i] += si;
                            q[j] += sj;
                            scalar_at(&q)
                        };
                        Ok((8.0 * (f(h)? - f(-h)?) - (f(2.0 * h)? - f(-2.0 * h)?)) / (12.0 * h))
                    };
                    Ok((8.0 * (g1(h)? - g1(-h)?) - (g1(2.0 * h)? - g1(-2.0 * h)?)) / (12.0 * h))
                };
                let v = richardson(mixed_at(h0)?, mixed_at(h0 / 2.0)?);
                hess_r_fd[i * n + j] = v;
                hess_r_fd[j * n + i] = v;
            }
        }
        let mut lap_r_fd = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut cov = hess_r_fd[i * n + j];
                for (k, dr_k) in dr_fd.iter().enumerate() {
                    cov -= gamma.get(&[k, i, j]).value() * dr_k;
                }
                lap_r_fd += gi[i * n + j] * cov;
            }
        }

        let derived = |dr: &[f64], lap_r: f64| -> (f64, f64, f64, f64) {
            // P2 residual in the g-norm, so P3 ≤ |∇F|·P2 is exact Cauchy–Schwarz
            let mut v = vec![0.0; n];
            for i in 0..n {
                let ric_df: f64 = (0..n).map(|l| ric.get(&[i, l]).value() * grad_f_up[l]).sum();
                v[i] = (nf - 1.0) * dr[i] + ric_df;
            }
            let mut p2sq = 0.0;
            for i in 0..n {
                for j in 0..n {
                    p2sq += gi[i * n + j] * v[i] * v[j];
                }
            }
            let p2 = p2sq.max(0.0).sqrt();

            let mut g_dr_df = 0.0;
            for i in 0..n {
                for j in 0..n {
                    g_dr_df += gi[i * n + j] * dr[i] * df[j];
                }
            }
            let mut ric_ff = 0.0;
            for i in 0..n {
                for j in 0..n {
                    ric_ff += ric.get(&[i, j]).value() * grad_f_up[i] * grad_f_up[j];
                }
            }
            let p3 = ((nf - 1.0) * g_dr_df + ric_ff).abs();
            let p4 = ((nf - 1.0) * lap_r + 0.5 * g_dr_df + r0 * (r0 - rho)).abs();
            let p5 = (lap_r - ric_ff / (2.0 * (nf - 1.0).powi(2)) + r0 * (r0 - rho) / (nf - 1.0))
                .abs();
            (p2, p3, p4, p5)
        };

        let (p2a, p3a, p4a, p5a) = derived(&dr_jets, lap_r_jets);
        let (p2b, p3b, p4b, p5b) = derived(&dr_fd, lap_r_fd);

        Ok(PointResiduals {
            ys,
            tys,
            p1,
            p2: p2a.max(p2b),
            p3: p3a.max(p3b),
            p4: p4a.max(p4b),
            p5: p5a.max(p5b),
        })
    }
}

struct PointResiduals {
    ys: f64,
    tys: f64,
    p1: f64,
    p2: f64,
    p3: f64,
    p4: f64,
    p5: f64,
}

/// Δf for a jet-valued scalar field: g^{ij}(∂_i∂_j f − Γ^k_{ij} ∂_k f).
fn scalar_laplacian(f: &crate::expr::Jet, gamma: &JetArr, gi: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut cov = f.derivative(i).derivative(j).value();
            for k in 0..n {
                cov -= gamma.get(&[k, i, j]).value() * f.derivative(k).value();
            }
            acc += gi[i * n + j] * cov;
        }
    }
    acc
}

/// Cotton/Bach identity battery on a 3-metric. `slow` enables the
/// order-6 double-divergence identity.
pub fn cotton_identities(
    m: &MetricField,
    points: &[Vec<f64>],
    slow: bool,
    tol: &Tolerances,
) -> Result<IdentityReport, SolitonError> {
    if m.dimension() != 3 {
        return Err(SolitonError::DimensionNot3(m.dimension()));
    }
    if points.is_empty() {
        return Err(SolitonError::NoPoints);
    }
    let n = 3;
    let mut divb_res = Vec::new();
    let mut m2_res = Vec::new();
    let mut ddiv_res = Vec::new();
    for p in points {
        let order = if slow { 6 } else { 5 };
        let mut ev = m.evaluator(p, order)?;
        let gi = ev.g_inv.values();
        let gamma = ev.gamma().clone();
        let ric = ev.ricci().clone();
        let cotton = ev.cotton().clone();
        let bach = ev.bach_div_cotton();

        // raise all three Cotton slots
        let c_val = cotton.values();
        let mut c_up = vec![0.0; n * n * n];
        for_each_index(n, 3, |idx| {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        acc += gi[idx[0] * n + a]
                            * gi[idx[1] * n + b]
                            * gi[idx[2] * n + c]
                            * c_val[(a * n + b) * n + c];
                    }
                }
            }
            c_up[(idx[0] * n + idx[1]) * n + idx[2]] = acc;
        });
        let c_norm_sq: f64 = (0..n * n * n).map(|k| c_up[k] * c_val[k]).sum();

        // DIVB: g^{ia}∇_a B_{ij} + C_j{}^{ip} R_{ip}
        let grad_b = cov_deriv(&bach, &gamma);
        let mut divb = 0.0f64;
        for j in 0..n {
            let mut div = 0.0;
            for i in 0..n {
                for a in 0..n {
                    div += gi[i * n + a] * grad_b.get(&[a, i, j]).value();
                }
            }
            let mut c_ric = 0.0;
            for i in 0..n {
                for p_ in 0..n {
                    let mut c_j_up = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            c_j_up += gi[i * n + a] * gi[p_ * n + b] * c_val[(j * n + a) * n + b];
                        }
                    }
                    c_ric += c_j_up * ric.get(&[i, p_]).value();
                }
            }
            divb = divb.max((div + c_ric).abs());
        }
        divb_res.push(divb);

        // M2: C^{ijk} ∇_i R_{jk} − ½|C|²
        let grad_ric = cov_deriv(&ric, &gamma);
        let mut pairing = 0.0;
        for_each_index(n, 3, |idx| {
            pairing += c_up[(idx[0] * n + idx[1]) * n + idx[2]] * grad_ric.get(idx).value();
        });
        m2_res.push((pairing - 0.5 * c_norm_sq).abs());

        // DDIV: g^{ia}g^{jb} ∇_a∇_b B_{ji} + B^{jk}R_{jk} + ½|C|²
        if slow {
            let grad2_b = cov_deriv(&grad_b, &gamma);
            let mut ddiv = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            ddiv += gi[i * n + a] * gi[j * n + b]
                                * grad2_b.get(&[a, b, j, i]).value();
                        }
                    }
                }
            }
            let b_val = bach.values();
            let mut b_ric = 0.0;
            for j in 0..n {
                for k in 0..n {
                    let mut b_up = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            b_up += gi[j * n + a] * gi[k * n + b] * b_val[a * n + b];
                        }
                    }
                    b_ric += b_up * ric.get(&[j, k]).value();
                }
            }
            ddiv_res.push((ddiv + b_ric + 0.5 * c_norm_sq).abs());
        }
    }

    let mut entries = BTreeMap::new();
    entries.insert(
        "DIVB".to_string(),
        IdentityEntry::build("DIVB", &divb_res, points, tol.divb)?,
    );
    entries.insert(
        "M2".to_string(),
        IdentityEntry::build("M2", &m2_res, points, tol.m2)?,
    );
    if slow {
        entries.insert(
            "DDIV".to_string(),
            IdentityEntry::build("DDIV", &ddiv_res, points, tol.ddiv)?,
        );
    }
    Ok(IdentityReport {
        entries,
        gate_violated: false,
        points: points.to_vec(),
    })
}

/// Per-identity residual summary over a sample set.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityEntry {
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityEntry {
    fn build(
        key: &str,
        residuals: &[f64],
        points: &[Vec<f64>],
        tolerance: f64,
    ) -> Result<IdentityEntry, SolitonError> {
        let mut max_residual = 0.0f64;
        let mut worst = 0usize;
        for (k, &v) in residuals.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(SolitonError::NonFiniteResidual {
                    identity: key.to_string(),
                    point: points[k].clone(),
                });
            }
            if v >= max_residual {
                max_residual = v;
                worst = k;
            }
        }
        Ok(IdentityEntry {
            max_residual,
            worst_point: points[worst].clone(),
            residuals: residuals.to_vec(),
            tolerance,
            passed: max_residual <= tolerance,
        })
    }
}

/// Identity residuals keyed by identity name, with the YS gate state.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub entries: BTreeMap<String, IdentityEntry>,
    pub gate_violated: bool,
    pub points: Vec<Vec<f64>>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        !self.gate_violated && self.entries.values().all(|e| e.passed)
    }

    pub fn max_residual(&self, key: &str) -> Option<f64> {
        self.entries.get(key).map(|e| e.max_residual)
    }
}
