//! Radial soliton profile ODE.
//!
//! On a warped chart g = dr² + φ(r)²ḡ with φ = F′ and constant fiber scalar
//! curvature R̄, the scalar-curvature formula and the trace relation
//! R − ρ = F″ close into a third-order profile equation: with φ > 0,
//!
//!   φ″ = φ·( R̄φ⁻² − (n−1)(n−2)(φ′/φ)² − ρ − φ′ ) / (2(n−1)),
//!
//! integrated here as the explicit first-order system
//! d/dr (F, φ, φ′) = (φ, φ′, φ″(φ, φ′)) with an embedded Dormand–Prince
//! 5(4) pair, cubic-Hermite dense output, and a positivity guard on φ.
//! Every accepted sample carries diagnostics: R from the curvature formula,
//! the dual-route residual against ρ + φ′, the n = 3 conserved quantity
//! c = ¼Rφ² + φF‴, and Ric(∇F,∇F) = −(n−1)φF‴.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("integration requires phi = F' > 0, got {fp}")]
    PhiNonpositive { fp: f64 },
    #[error("invalid tolerances: rel_tol and abs_tol must be positive and finite")]
    InvalidTolerances,
    #[error("invalid integration range: r_end = {r_end} must exceed r0 = {r0}")]
    InvalidRange { r0: f64, r_end: f64 },
    #[error("dimension must be >= 3, got {0}")]
    BadDimension(usize),
    #[error(
        "smooth closure at the origin requires a unit round fiber with scalar curvature {expected}, got {got}"
    )]
    FiberNotUnitSphere { expected: f64, got: f64 },
    #[error("trajectory too short for curvature-derivative estimates ({0} samples, need >= 3)")]
    TooShort(usize),
}

/// Profile state at one radius: (r, F′, F″, F‴).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeState {
    pub r: f64,
    /// φ = F′
    pub fp: f64,
    /// φ′ = F″
    pub fpp: f64,
    /// φ″ = F‴, determined by the profile equation
    pub fppp: f64,
}

impl OdeState {
    /// Build a state from (r, F′, F″), filling F‴ from the profile equation.
    pub fn from_profile(
        n: usize,
        fiber_scalar: f64,
        rho: f64,
        r: f64,
        fp: f64,
        fpp: f64,
    ) -> Result<OdeState, OdeError> {
        let fppp = profile_rhs(n, fiber_scalar, rho, fp, fpp)?;
        Ok(OdeState { r, fp, fpp, fppp })
    }
}

/// φ″ from (φ, φ′): the third-derivative update that makes the warped
/// scalar-curvature formula and R − ρ = F″ hold simultaneously.
pub fn profile_rhs(n: usize, fiber_scalar: f64, rho: f64, fp: f64, fpp: f64) -> Result<f64, OdeError> {
    if n < 3 {
        return Err(OdeError::BadDimension(n));
    }
    if fp <= 0.0 {
        return Err(OdeError::PhiNonpositive { fp });
    }
    let m = n as f64 - 1.0;
    Ok((fiber_scalar / fp - m * (m - 1.0) * fpp * fpp / fp - (rho + fpp) * fp) / (2.0 * m))
}

/// F⁗ along solutions, by the chain rule through the profile equation.
pub fn profile_fourth(n: usize, fiber_scalar: f64, rho: f64, fp: f64, fpp: f64) -> Result<f64, OdeError> {
    let g = profile_rhs(n, fiber_scalar, rho, fp, fpp)?;
    let m = n as f64 - 1.0;
    let dg_dfp =
        (-fiber_scalar / (fp * fp) + m * (m - 1.0) * (fpp / fp).powi(2) - (rho + fpp)) / (2.0 * m);
    let dg_dfpp = (-2.0 * m * (m - 1.0) * fpp / fp - fp) / (2.0 * m);
    Ok(dg_dfp * fpp + dg_dfpp * g)
}

/// Scalar curvature from the warped closed form at a profile state.
pub fn scalar_from_state(n: usize, fiber_scalar: f64, fp: f64, fpp: f64, fppp: f64) -> f64 {
    let m = n as f64 - 1.0;
    fiber_scalar / (fp * fp) - m * (m - 1.0) * (fpp / fp).powi(2) - 2.0 * m * fppp / fp
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard cap on the step size; small values keep the dense output
    /// accurate enough for stencil differentiation of the diagnostics.
    pub h_max: f64,
    pub max_steps: usize,
    /// Halt as the warping function approaches zero from above.
    pub phi_floor: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_max: 0.01,
            max_steps: 200_000,
            phi_floor: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntegrationStatus {
    /// reached r_end
    Completed,
    /// halted with φ at the positivity floor
    PhiFloor,
    /// a state component exceeded the blow-up bound
    BlowUp,
    /// step size underflowed without a φ guard firing
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// One accepted step, stored for cubic-Hermite dense output.
#[derive(Debug, Clone, Copy)]
struct DenseSeg {
    r0: f64,
    r1: f64,
    y0: [f64; 3],
    y1: [f64; 3],
    f0: [f64; 3],
    f1: [f64; 3],
}

impl DenseSeg {
    fn eval(&self, r: f64) -> [f64; 3] {
        let h = self.r1 - self.r0;
        let t = (r - self.r0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = h00 * self.y0[k] + h10 * h * self.f0[k] + h01 * self.y1[k] + h11 * h * self.f1[k];
        }
        out
    }
}

/// Sampled radial solution with per-sample diagnostics.
#[derive(Debug, Clone)]
pub struct ProfileTrajectory {
    pub n: usize,
    pub fiber_scalar: f64,
    pub rho: f64,
    pub samples: Vec<OdeState>,
    /// F along the trajectory (F(r0) = 0 normalization)
    pub potential: Vec<f64>,
    /// scalar curvature via the warped closed form
    pub scalar: Vec<f64>,
    /// conserved-quantity candidate c = ¼Rφ² + φF‴ (n = 3; NaN otherwise)
    pub c: Vec<f64>,
    /// dual-route residual |R_closed_form − (ρ + F″)|
    pub res_r2: Vec<f64>,
    /// |¼Rφ² − c| = |φF‴|, the term key3 asserts vanishes for products
    pub res_key3: Vec<f64>,
    /// Ric(∇F,∇F) = −(n−1)φF‴
    pub ric_grad: Vec<f64>,
    pub status: IntegrationStatus,
    pub stats: IntegratorStats,
    pub from_origin: bool,
    pub method: &'static str,
    pub rel_tol: f64,
    pub abs_tol: f64,
    dense: Vec<DenseSeg>,
}

impl ProfileTrajectory {
    pub fn last(&self) -> &OdeState {
        self.samples.last().expect("trajectory has at least the initial state")
    }

    pub fn r_span(&self) -> (f64, f64) {
        (self.samples[0].r, self.last().r)
    }

    /// Dense-output state (F, φ, φ′) at any radius inside the span.
    pub fn dense_eval(&self, r: f64) -> Option<[f64; 3]> {
        if self.dense.is_empty() {
            return None;
        }
        let (lo, hi) = self.r_span();
        if r < lo || r > hi {
            return None;
        }
        let seg = match self
            .dense
            .binary_search_by(|s| s.r1.partial_cmp(&r).expect("finite radii"))
        {
            Ok(i) => i,
            Err(i) => i.min(self.dense.len() - 1),
        };
        Some(self.dense[seg].eval(r))
    }
}

fn push_sample(t: &mut ProfileTrajectory, r: f64, y: &[f64; 3]) {
    let (fp, fpp) = (y[1], y[2]);
    let fppp = profile_rhs(t.n, t.fiber_scalar, t.rho, fp, fpp).unwrap_or(f64::NAN);
    let scalar = scalar_from_state(t.n, t.fiber_scalar, fp, fpp, fppp);
    t.samples.push(OdeState { r, fp, fpp, fppp });
    t.potential.push(y[0]);
    t.scalar.push(scalar);
    t.res_r2.push((scalar - (t.rho + fpp)).abs());
    if t.n == 3 {
        let c = 0.25 * scalar * fp * fp + fp * fppp;
        t.c.push(c);
        t.res_key3.push((0.25 * scalar * fp * fp - c).abs());
    } else {
        t.c.push(f64::NAN);
        t.res_key3.push(f64::NAN);
    }
    t.ric_grad.push(-(t.n as f64 - 1.0) * fp * fppp);
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// b − b̂: fifth-order weights minus the embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const BLOWUP: f64 = 1e12;

/// Integrate the profile system from `ic` to `r_end`.
pub fn integrate(
    n: usize,
    fiber_scalar: f64,
    rho: f64,
    ic: OdeState,
    r_end: f64,
    opts: &IntegratorOptions,
) -> Result<ProfileTrajectory, OdeError> {
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0)
        || !opts.rel_tol.is_finite()
        || !opts.abs_tol.is_finite()
    {
        return Err(OdeError::InvalidTolerances);
    }
    if ic.fp <= 0.0 {
        return Err(OdeError::PhiNonpositive { fp: ic.fp });
    }
    if r_end.is_nan() || r_end <= ic.r {
        return Err(OdeError::InvalidRange { r0: ic.r, r_end });
    }
    if n < 3 {
        return Err(OdeError::BadDimension(n));
    }

    let mut traj = ProfileTrajectory {
        n,
        fiber_scalar,
        rho,
        samples: Vec::new(),
        potential: Vec::new(),
        scalar: Vec::new(),
        c: Vec::new(),
        res_r2: Vec::new(),
        res_key3: Vec::new(),
        ric_grad: Vec::new(),
        status: IntegrationStatus::Completed,
        stats: IntegratorStats::default(),
        from_origin: false,
        method: "dopri5(4)",
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        dense: Vec::new(),
    };

    let rhs = |y: &[f64; 3]| -> Option<[f64; 3]> {
        if y[1] <= 0.0 {
            return None;
        }
        match profile_rhs(n, fiber_scalar, rho, y[1], y[2]) {
            Ok(g) => Some([y[1], y[2], g]),
            Err(_) => None,
        }
    };

    let mut r = ic.r;
    let mut y = [0.0, ic.fp, ic.fpp];
    push_sample(&mut traj, r, &y);

    let span = r_end - ic.r;
    let mut h = (1e-4 * span).min(opts.h_max);
    let mut f0 = match rhs(&y) {
        Some(f) => f,
        None => return Err(OdeError::PhiNonpositive { fp: y[1] }),
    };
    traj.stats.rhs_evals += 1;

    let mut phi_guard_fired = false;
    while r < r_end {
        if traj.stats.accepted + traj.stats.rejected > opts.max_steps {
            traj.status = IntegrationStatus::StepUnderflow;
            break;
        }
        h = h.min(r_end - r).min(opts.h_max);
        if h < 1e-13 * r.abs().max(1.0) {
            let collapsing = y[1] <= (1e-3 * ic.fp).max(1e3 * opts.phi_floor) && y[2] < 0.0;
            traj.status = if phi_guard_fired || collapsing {
                IntegrationStatus::PhiFloor
            } else {
                IntegrationStatus::StepUnderflow
            };
            break;
        }

        // stages
        let mut k = [[0.0f64; 3]; 7];
        k[0] = f0;
        let mut stage_failed = false;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for d in 0..3 {
                    ys[d] += h * A[s][j] * kj[d];
                }
            }
            traj.stats.rhs_evals += 1;
            match rhs(&ys) {
                Some(f) => k[s] = f,
                None => {
                    stage_failed = true;
                    break;
                }
            }
            let _ = C[s];
        }
        if stage_failed {
            phi_guard_fired = true;
            traj.stats.rejected += 1;
            h *= 0.5;
            continue;
        }

        // fifth-order solution is the last stage node (FSAL structure)
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            for d in 0..3 {
                y_new[d] += h * A[6][j] * kj[d];
            }
        }

        if y_new.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP) {
            traj.status = IntegrationStatus::BlowUp;
            break;
        }
        if y_new[1] <= opts.phi_floor {
            phi_guard_fired = true;
            traj.stats.rejected += 1;
            h *= 0.5;
            continue;
        }

        // embedded error estimate
        let mut err_norm_sq = 0.0;
        for d in 0..3 {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[d];
            }
            e *= h;
            let scale = opts.abs_tol + opts.rel_tol * y[d].abs().max(y_new[d].abs());
            err_norm_sq += (e / scale) * (e / scale);
        }
        let err = (err_norm_sq / 3.0).sqrt();

        if err <= 1.0 {
            let f_new = match rhs(&y_new) {
                Some(f) => f,
                None => {
                    phi_guard_fired = true;
                    traj.stats.rejected += 1;
                    h *= 0.5;
                    continue;
                }
            };
            traj.stats.rhs_evals += 1;
            traj.dense.push(DenseSeg {
                r0: r,
                r1: r + h,
                y0: y,
                y1: y_new,
                f0,
                f1: f_new,
            });
            r += h;
            y = y_new;
            f0 = f_new;
            traj.stats.accepted += 1;
            push_sample(&mut traj, r, &y);
            phi_guard_fired = false;
            let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            h *= factor;
        } else {
            traj.stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }

    Ok(traj)
}

/// State at r = ε of the unique power-series solution closing smoothly at
/// the origin over a unit round fiber: φ = r + a₃r³ + O(r⁵) with
/// a₃ = −(ρ+1)/(6n(n−1)), φ(0) = 0, φ′(0) = 1, φ″(0) = 0.
pub fn origin_series_start(
    n: usize,
    fiber_scalar: f64,
    rho: f64,
    eps: f64,
) -> Result<OdeState, OdeError> {
    if n < 3 {
        return Err(OdeError::BadDimension(n));
    }
    let expected = ((n - 1) * (n - 2)) as f64;
    if (fiber_scalar - expected).abs() > 1e-9 * expected.max(1.0) {
        return Err(OdeError::FiberNotUnitSphere {
            expected,
            got: fiber_scalar,
        });
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(OdeError::InvalidRange { r0: 0.0, r_end: eps });
    }
    let a3 = -(rho + 1.0) / (6.0 * (n as f64) * (n as f64 - 1.0));
    Ok(OdeState {
        r: eps,
        fp: eps + a3 * eps.powi(3),
        fpp: 1.0 + 3.0 * a3 * eps * eps,
        fppp: 6.0 * a3 * eps,
    })
}

/// Series start at ε followed by integration to `r_end`; the resulting
/// trajectory is marked as extending from the origin closure.
pub fn integrate_from_origin(
    n: usize,
    fiber_scalar: f64,
    rho: f64,
    eps: f64,
    r_end: f64,
    opts: &IntegratorOptions,
) -> Result<ProfileTrajectory, OdeError> {
    let start = origin_series_start(n, fiber_scalar, rho, eps)?;
    let mut t = integrate(n, fiber_scalar, rho, start, r_end, opts)?;
    t.from_origin = true;
    Ok(t)
}

/// Conserved-quantity and curvature-consistency diagnostics along a
/// trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    /// c at the first sample
    pub c_reference: f64,
    /// max |c(r) − c(r₀)|
    pub c_drift_max: f64,
    /// max |¼Rφ² − c| over samples with |F″| below the product threshold;
    /// None when no sample qualifies
    pub key3_max: Option<f64>,
    /// max residual of R″ = −(n−1)(F″/F′)R′ − F′R′/(2(n−1)) − R(R−ρ)/(n−1)
    /// with R′ = F‴ and R″ estimated from dense output
    pub rpp_residual_max: f64,
    /// counts of samples with Ric(∇F,∇F) ≤ 0 / ≥ 0
    pub ric_nonpositive: usize,
    pub ric_nonnegative: usize,
    pub samples: usize,
}

/// 5-point second-derivative stencil over dense output, spacing chosen
/// against the step cap so interpolation error stays below the estimate.
pub fn track_invariants(t: &ProfileTrajectory) -> Result<InvariantReport, OdeError> {
    if t.samples.len() < 3 {
        return Err(OdeError::TooShort(t.samples.len()));
    }
    let c0 = t.c[0];
    let mut c_drift = 0.0f64;
    if t.n == 3 {
        for &c in &t.c {
            c_drift = c_drift.max((c - c0).abs());
        }
    }

    let product_thresh = 1e-9;
    let mut key3: Option<f64> = None;
    if t.n == 3 {
        for (s, &res) in t.samples.iter().zip(&t.res_key3) {
            if s.fpp.abs() <= product_thresh {
                key3 = Some(key3.unwrap_or(0.0).max(res));
            }
        }
    }

    let (lo, hi) = t.r_span();
    let span = hi - lo;
    let delta = (span / 8.0).min(0.01);
    let nf = t.n as f64;
    let mut rpp_max = 0.0f64;
    for s in &t.samples {
        if s.r - 2.0 * delta < lo || s.r + 2.0 * delta > hi {
            continue;
        }
        let r_at = |r: f64| -> f64 {
            let y = t.dense_eval(r).expect("stencil stays inside the span");
            t.rho + y[2]
        };
        let rpp_est = (-r_at(s.r + 2.0 * delta) + 16.0 * r_at(s.r + delta) - 30.0 * r_at(s.r)
            + 16.0 * r_at(s.r - delta)
            - r_at(s.r - 2.0 * delta))
            / (12.0 * delta * delta);
        let r0 = t.rho + s.fpp;
        let r_prime = s.fppp;
        let rhs = -(nf - 1.0) * (s.fpp / s.fp) * r_prime - s.fp * r_prime / (2.0 * (nf - 1.0))
            - r0 * (r0 - t.rho) / (nf - 1.0);
        rpp_max = rpp_max.max((rpp_est - rhs).abs());
    }

    let mut nonpos = 0;
    let mut nonneg = 0;
    for &v in &t.ric_grad {
        if v <= 0.0 {
            nonpos += 1;
        }
        if v >= 0.0 {
            nonneg += 1;
        }
    }

    Ok(InvariantReport {
        c_reference: c0,
        c_drift_max: c_drift,
        key3_max: key3,
        rpp_residual_max: rpp_max,
        ric_nonpositive: nonpos,
        ric_nonnegative: nonneg,
        samples: t.samples.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    Flat,
    RotationallySymmetricCandidate,
    ShrinkingProduct,
    ExpandingProduct,
    SteadyContradiction,
    Unclassified,
}

/// Thresholds that fired, with the observed extrema, so every verdict is
/// auditable.
#[derive(Debug, Clone, Serialize)]
pub struct Evidence {
    pub tolerance: f64,
    pub rho: f64,
    pub max_abs_c: f64,
    pub max_abs_scalar: f64,
    pub max_abs_fpp: f64,
    pub max_scalar_minus_rho: f64,
    pub from_origin: bool,
    pub fired: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub label: ClassLabel,
    pub evidence: Evidence,
}

/// Trajectory trichotomy: flat when c ≈ 0 and R ≈ 0; a product when F″ ≈ 0
/// with R ≈ ρ of the matching sign; a steady constant-warping non-flat
/// input is contradictory; an origin-closed trajectory that is none of the
/// above is a rotationally symmetric candidate.
pub fn classify(t: &ProfileTrajectory, rho: f64, tol: f64) -> Classification {
    let max_abs_c = t
        .c
        .iter()
        .fold(0.0f64, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) });
    let max_abs_scalar = t.scalar.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_abs_fpp = t.samples.iter().fold(0.0f64, |m, s| m.max(s.fpp.abs()));
    let max_scalar_minus_rho = t.scalar.iter().fold(0.0f64, |m, v| m.max((v - rho).abs()));

    let mut fired = Vec::new();
    let flat = max_abs_c <= tol && max_abs_scalar <= tol;
    if flat {
        fired.push(format!("max|c| = {max_abs_c:.3e} <= {tol:.1e}"));
        fired.push(format!("max|R| = {max_abs_scalar:.3e} <= {tol:.1e}"));
    }
    let constant_warping = max_abs_fpp <= tol;
    let matches_rho = max_scalar_minus_rho <= tol;

    let label = if flat {
        ClassLabel::Flat
    } else if constant_warping && rho > 0.0 && matches_rho {
        fired.push(format!("max|F''| = {max_abs_fpp:.3e} <= {tol:.1e}"));
        fired.push(format!("max|R - rho| = {max_scalar_minus_rho:.3e} <= {tol:.1e}"));
        fired.push("rho > 0".into());
        ClassLabel::ShrinkingProduct
    } else if constant_warping && rho < 0.0 && matches_rho {
        fired.push(format!("max|F''| = {max_abs_fpp:.3e} <= {tol:.1e}"));
        fired.push(format!("max|R - rho| = {max_scalar_minus_rho:.3e} <= {tol:.1e}"));
        fired.push("rho < 0".into());
        ClassLabel::ExpandingProduct
    } else if rho == 0.0 && constant_warping {
        fired.push(format!("max|F''| = {max_abs_fpp:.3e} <= {tol:.1e}"));
        fired.push("rho = 0 with constant warping but nonzero curvature".into());
        ClassLabel::SteadyContradiction
    } else if t.from_origin {
        fired.push("trajectory extends from an origin series start".into());
        ClassLabel::RotationallySymmetricCandidate
    } else {
        ClassLabel::Unclassified
    };

    Classification {
        label,
        evidence: Evidence {
            tolerance: tol,
            rho,
            max_abs_c,
            max_abs_scalar,
            max_abs_fpp,
            max_scalar_minus_rho,
            from_origin: t.from_origin,
            fired,
        },
    }
}
