//! Closed-form curvature of warped products g = dr² + (F′(r))² ḡ over
//! constant-curvature fibers, and the explicit charts that let the generic
//! engine cross-check every formula.
//!
//! With m = n−1 the fiber dimension and κ = R̄/(m(m−1)) the fiber sectional
//! curvature, the nonzero curvature blocks are
//!
//!   R_{1a1b} = −F′F‴ ḡ_{ab}
//!   R_{abcd} = ((F′)²κ − (F′F″)²)(ḡ_{ac}ḡ_{bd} − ḡ_{ad}ḡ_{bc})
//!   R_{11}   = −(n−1) F‴/F′
//!   R_{ab}   = (R̄/(n−1) − (n−2)(F″)² − F′F‴) ḡ_{ab}
//!   R        = (F′)⁻²R̄ − (n−1)(n−2)(F″/F′)² − 2(n−1) F‴/F′
//!
//! and the scalar trace identity R = R_{11} + (F′)⁻² ḡ^{ab}R_{ab} holds by
//! construction. In dimension 3 the quantity c = ¼R(F′)² + F′F‴ equals the
//! ḡ_{ab}-coefficient of R_{ab} − ¼R g_{ab}; its radial rate dc/dr is the
//! radial Cotton diagnostic, zero exactly when c is conserved.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{eval_jet, Bindings, Expr, ExprError};
use crate::geometry::{GeometryError, MetricField};
use crate::soliton::SolitonSpec;

#[derive(Debug, Error)]
pub enum WarpedError {
    #[error("warping function must be positive, got F' = {fp}")]
    NonpositiveWarping { fp: f64 },
    #[error("operation requires dimension 3, got {0}")]
    DimensionNot3(usize),
    #[error("dimension error: {0}")]
    BadDimension(String),
    #[error("{kind:?} product requires {requirement}, got rho = {rho}")]
    KindMismatch {
        kind: ProductKind,
        requirement: &'static str,
        rho: f64,
    },
    #[error("fourth derivative F'''' is required for the radial Cotton rate")]
    MissingFourthDerivative,
    #[error("gradient norm must be positive, got {0}")]
    NonpositiveGradient(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Pointwise state of a radial profile: dimension, fiber scalar curvature,
/// radius, and the derivatives of the potential that curvature needs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WarpedProfilePoint {
    pub n: usize,
    pub fiber_scalar: f64,
    pub r: f64,
    /// F′ (the warping function; must stay positive)
    pub fp: f64,
    /// F″
    pub fpp: f64,
    /// F‴
    pub fppp: f64,
    /// F⁗, needed only for the radial Cotton rate and Laplacian-of-R checks
    pub f4: Option<f64>,
}

impl WarpedProfilePoint {
    pub fn new(
        n: usize,
        fiber_scalar: f64,
        r: f64,
        fp: f64,
        fpp: f64,
        fppp: f64,
    ) -> Result<WarpedProfilePoint, WarpedError> {
        if n < 3 {
            return Err(WarpedError::BadDimension(format!(
                "warped products here need n >= 3, got {n}"
            )));
        }
        if fp <= 0.0 {
            return Err(WarpedError::NonpositiveWarping { fp });
        }
        Ok(WarpedProfilePoint {
            n,
            fiber_scalar,
            r,
            fp,
            fpp,
            fppp,
            f4: None,
        })
    }

    pub fn with_fourth(mut self, f4: f64) -> WarpedProfilePoint {
        self.f4 = Some(f4);
        self
    }

    /// Build the state at radius `r` from an expression for F′(r); all
    /// derivatives come from a univariate jet, no finite differencing.
    pub fn from_expression(
        n: usize,
        fiber_scalar: f64,
        fprime: &Expr,
        r: f64,
    ) -> Result<WarpedProfilePoint, WarpedError> {
        let coords = vec!["r".to_string()];
        let base = [r];
        let params = std::collections::BTreeMap::new();
        let jet = eval_jet(fprime, &Bindings::new(&coords, &base, &params), 3)?;
        let fp = jet.value();
        if fp <= 0.0 {
            return Err(WarpedError::NonpositiveWarping { fp });
        }
        Ok(WarpedProfilePoint {
            n,
            fiber_scalar,
            r,
            fp,
            fpp: jet.partial(&[1])?,
            fppp: jet.partial(&[2])?,
            f4: Some(jet.partial(&[3])?),
        })
    }
}

/// Curvature blocks of the warped metric in the ḡ-frame.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WarpedCurvature {
    pub n: usize,
    /// coefficient of ḡ_{ab} in R_{1a1b}
    pub riem_radial: f64,
    /// coefficient of (ḡ_{ac}ḡ_{bd} − ḡ_{ad}ḡ_{bc}) in R_{abcd}
    pub riem_fiber: f64,
    /// R_{11}
    pub ric_rr: f64,
    /// coefficient of ḡ_{ab} in R_{ab}
    pub ric_fiber: f64,
    /// scalar curvature
    pub scalar: f64,
}

pub fn closed_form_curvature(w: &WarpedProfilePoint) -> Result<WarpedCurvature, WarpedError> {
    if w.fp <= 0.0 {
        return Err(WarpedError::NonpositiveWarping { fp: w.fp });
    }
    let nf = w.n as f64;
    let m = nf - 1.0;
    let kappa = w.fiber_scalar / (m * (m - 1.0).max(1.0));
    // m = 2 fibers: κ = R̄/2; the (m−1) guard only matters for m = 1,
    // which the n >= 3 gate already excludes
    let kappa = if w.n == 3 { w.fiber_scalar / 2.0 } else { kappa };
    let scalar = w.fiber_scalar / (w.fp * w.fp)
        - m * (m - 1.0) * (w.fpp / w.fp).powi(2)
        - 2.0 * m * w.fppp / w.fp;
    Ok(WarpedCurvature {
        n: w.n,
        riem_radial: -w.fp * w.fppp,
        riem_fiber: w.fp * w.fp * kappa - (w.fp * w.fpp).powi(2),
        ric_rr: -m * w.fppp / w.fp,
        ric_fiber: w.fiber_scalar / m - (nf - 2.0) * w.fpp * w.fpp - w.fp * w.fppp,
        scalar,
    })
}

/// The n = 3 conserved-quantity diagnostic: returns
/// (c, dc/dr) with c = ¼R(F′)² + F′F‴ and dc/dr computed by the chain rule
/// through the closed forms. dc/dr is the ḡ_{ab}-coefficient of
/// ∂_r(R_{ab} − ¼R g_{ab}) and vanishes exactly when c is r-independent.
pub fn radial_cotton_c(w: &WarpedProfilePoint) -> Result<(f64, f64), WarpedError> {
    if w.n != 3 {
        return Err(WarpedError::DimensionNot3(w.n));
    }
    if w.fp <= 0.0 {
        return Err(WarpedError::NonpositiveWarping { fp: w.fp });
    }
    let f4 = w.f4.ok_or(WarpedError::MissingFourthDerivative)?;
    let cf = closed_form_curvature(w)?;
    let r = cf.scalar;
    let c = 0.25 * r * w.fp * w.fp + w.fp * w.fppp;
    // R′ from differentiating R = R̄ φ⁻² − 2(φ′/φ)² − 4 φ″/φ
    let (p0, p1, p2, p3) = (w.fp, w.fpp, w.fppp, f4);
    let r_prime = -2.0 * w.fiber_scalar * p1 / p0.powi(3)
        - 4.0 * (p1 / p0) * (p2 * p0 - p1 * p1) / (p0 * p0)
        - 4.0 * (p3 * p0 - p2 * p1) / (p0 * p0);
    let dc_dr = 0.25 * r_prime * p0 * p0 + 0.5 * r * p0 * p1 + p1 * p2 + p0 * p3;
    Ok((c, dc_dr))
}

/// Δ of a radial function: R″ + (n−1)(F″/F′)R′.
pub fn radial_laplacian_r(w: &WarpedProfilePoint, r_prime: f64, r_second: f64) -> Result<f64, WarpedError> {
    if w.fp <= 0.0 {
        return Err(WarpedError::NonpositiveWarping { fp: w.fp });
    }
    Ok(r_second + (w.n as f64 - 1.0) * (w.fpp / w.fp) * r_prime)
}

/// Ric(∇F, ∇F) = (F′)² R_{11} = −(n−1) F′F‴.
pub fn ric_radial(w: &WarpedProfilePoint) -> Result<f64, WarpedError> {
    if w.fp <= 0.0 {
        return Err(WarpedError::NonpositiveWarping { fp: w.fp });
    }
    Ok(-(w.n as f64 - 1.0) * w.fp * w.fppp)
}

/// Product soliton flavor; the sign of ρ must match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProductKind {
    Shrinking,
    Expanding,
}

/// A constant-curvature fiber chart: coordinate names, metric expressions,
/// and a sampling box clear of chart singularities.
#[derive(Debug, Clone)]
pub struct FiberChart {
    pub coords: Vec<String>,
    pub components: Vec<Vec<Expr>>,
    pub domain: Vec<[f64; 2]>,
}

/// Unit-curvature model chart scaled so the fiber scalar curvature equals
/// `scalar`: hyperspherical polar for positive values, upper half-space for
/// negative, a flat chart for zero.
pub fn fiber_chart(fiber_dim: usize, scalar: f64) -> Result<FiberChart, WarpedError> {
    if fiber_dim < 2 {
        return Err(WarpedError::BadDimension(format!(
            "fiber dimension must be >= 2, got {fiber_dim}"
        )));
    }
    let m = fiber_dim as f64;
    let declared_names: Vec<String> = (0..fiber_dim).map(|k| format!("t{k}")).collect();
    let declared: Vec<&str> = declared_names.iter().map(|s| s.as_str()).collect();
    let zero = || Expr::num(0.0);

    if scalar == 0.0 {
        let comps = (0..fiber_dim)
            .map(|i| {
                (0..fiber_dim)
                    .map(|j| if i == j { Expr::num(1.0) } else { zero() })
                    .collect()
            })
            .collect();
        return Ok(FiberChart {
            coords: declared_names,
            components: comps,
            domain: vec![[-1.0, 1.0]; fiber_dim],
        });
    }

    let s2 = m * (m - 1.0) / scalar.abs();
    if scalar > 0.0 {
        // scaled round sphere: s²(dt0² + sin²t0 dt1² + sin²t0 sin²t1 dt2² + …)
        let mut comps = vec![vec![zero(); fiber_dim]; fiber_dim];
        for (k, row) in comps.iter_mut().enumerate() {
            let mut src = format!("{s2}");
            for j in 0..k {
                src.push_str(&format!("*sin(t{j})^2"));
            }
            row[k] = crate::expr::parse(&src, &declared)?;
        }
        let mut domain = vec![[0.4, 2.7]; fiber_dim];
        domain[fiber_dim - 1] = [0.0, 6.0];
        Ok(FiberChart {
            coords: declared_names,
            components: comps,
            domain,
        })
    } else {
        // scaled upper half-space: s²(dt0² + … + dt_{m-1}²)/t_{m-1}², t_{m-1} > 0
        let v = format!("t{}", fiber_dim - 1);
        let mut comps = vec![vec![zero(); fiber_dim]; fiber_dim];
        for (k, row) in comps.iter_mut().enumerate() {
            row[k] = crate::expr::parse(&format!("{s2}/{v}^2"), &declared)?;
        }
        let mut domain = vec![[-1.0, 1.0]; fiber_dim];
        domain[fiber_dim - 1] = [0.7, 2.2];
        Ok(FiberChart {
            coords: declared_names,
            components: comps,
            domain,
        })
    }
}

/// Materialize g = dr² + (F′(r))² ḡ as an explicit chart metric. `fprime`
/// is an expression in the single symbol `r`.
pub fn warped_chart(
    n: usize,
    fiber_scalar: f64,
    fprime: &Expr,
    r_range: [f64; 2],
) -> Result<MetricField, WarpedError> {
    if n < 3 {
        return Err(WarpedError::BadDimension(format!(
            "warped charts need n >= 3, got {n}"
        )));
    }
    let fiber = fiber_chart(n - 1, fiber_scalar)?;
    let mut coords = vec!["r".to_string()];
    coords.extend(fiber.coords.iter().cloned());
    let mut domain = vec![r_range];
    domain.extend(fiber.domain.iter().copied());

    let fp_sq = Expr::Pow(Box::new(fprime.clone()), Box::new(Expr::num(2.0)));
    let mut comps = vec![vec![Expr::num(0.0); n]; n];
    comps[0][0] = Expr::num(1.0);
    for a in 0..n - 1 {
        for b in 0..n - 1 {
            let gbar = fiber.components[a][b].clone();
            if gbar == Expr::num(0.0) {
                continue;
            }
            comps[a + 1][b + 1] = Expr::Mul(Box::new(fp_sq.clone()), Box::new(gbar));
        }
    }
    Ok(MetricField::new(
        coords,
        comps,
        domain,
        std::collections::BTreeMap::new(),
    )?)
}

/// Explicit product-soliton construction: g = dr² + a²ḡ with F = a·r,
/// where ḡ has scalar curvature R̄ = ρa² (round for shrinking, hyperbolic
/// for expanding). The assembled fiber a²ḡ carries Gaussian curvature ρ/2;
/// both normalizations are recorded.
#[derive(Debug, Clone)]
pub struct ProductSoliton {
    pub spec: SolitonSpec,
    /// |∇F| = F′ = a
    pub gradient_norm: f64,
    /// scalar curvature of (N, ḡ): ρa²
    pub fiber_scalar_curvature: f64,
    /// Gaussian curvature of the assembled fiber (N, a²ḡ): ρ/2
    pub warped_fiber_gaussian: f64,
}

pub fn build_product_soliton(
    kind: ProductKind,
    a: f64,
    rho: f64,
) -> Result<ProductSoliton, WarpedError> {
    if a <= 0.0 {
        return Err(WarpedError::NonpositiveGradient(a));
    }
    match kind {
        ProductKind::Shrinking if rho <= 0.0 => {
            return Err(WarpedError::KindMismatch {
                kind,
                requirement: "rho > 0",
                rho,
            })
        }
        ProductKind::Expanding if rho >= 0.0 => {
            return Err(WarpedError::KindMismatch {
                kind,
                requirement: "rho < 0",
                rho,
            })
        }
        _ => {}
    }
    let fiber_scalar = rho * a * a;
    let fprime = Expr::num(a);
    let metric = warped_chart(3, fiber_scalar, &fprime, [-1.5, 1.5])?;
    let potential = Expr::Mul(Box::new(Expr::num(a)), Box::new(Expr::sym("r")));
    let spec = SolitonSpec::new(metric, potential, rho);
    Ok(ProductSoliton {
        spec,
        gradient_norm: a,
        fiber_scalar_curvature: fiber_scalar,
        warped_fiber_gaussian: rho / 2.0,
    })
}

/// Maximum discrepancies between the closed forms and the generic engine on
/// the materialized chart, normalized by the larger of the block scale and 1.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckReport {
    pub riemann: f64,
    pub ricci: f64,
    pub scalar: f64,
    /// radial Cotton rate (n = 3 only)
    pub cotton: Option<f64>,
    pub points_checked: usize,
}

impl CrossCheckReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.riemann
            .max(self.ricci)
            .max(self.scalar)
            .max(self.cotton.unwrap_or(0.0))
    }
}

/// Diff closed-form curvature against the generic engine at `samples`
/// radii spread over `r_range`, with the fiber point fixed at the center
/// of the fiber chart box.
pub fn cross_check(
    n: usize,
    fiber_scalar: f64,
    fprime: &Expr,
    r_range: [f64; 2],
    samples: usize,
) -> Result<CrossCheckReport, WarpedError> {
    let metric = warped_chart(n, fiber_scalar, fprime, r_range)?;
    let fiber = fiber_chart(n - 1, fiber_scalar)?;

    // ḡ values at the fiber base point
    let fiber_point: Vec<f64> = fiber.domain.iter().map(|iv| 0.5 * (iv[0] + iv[1])).collect();
    let fm = MetricField::new(
        fiber.coords.clone(),
        fiber.components.clone(),
        fiber.domain.clone(),
        std::collections::BTreeMap::new(),
    )?;
    let (gbar, _) = fm.metric_values(&fiber_point)?;

    let m = n - 1;
    let mut worst = CrossCheckReport {
        riemann: 0.0,
        ricci: 0.0,
        scalar: 0.0,
        cotton: if n == 3 { Some(0.0) } else { None },
        points_checked: 0,
    };

    for k in 0..samples {
        let t = if samples == 1 {
            0.5
        } else {
            k as f64 / (samples as f64 - 1.0)
        };
        let r = r_range[0] + t * (r_range[1] - r_range[0]);
        let w = WarpedProfilePoint::from_expression(n, fiber_scalar, fprime, r)?;
        let cf = closed_form_curvature(&w)?;

        let mut point = vec![r];
        point.extend(fiber_point.iter().copied());

        let riem = metric.riemann(&point)?;
        let (ric, scal) = metric.ricci_scalar(&point)?;

        // Riemann blocks
        let mut riem_expected = vec![0.0; n * n * n * n];
        let idx4 = |i: usize, j: usize, k_: usize, l: usize| ((i * n + j) * n + k_) * n + l;
        for a in 0..m {
            for b in 0..m {
                let v = cf.riem_radial * gbar[a * m + b];
                riem_expected[idx4(0, a + 1, 0, b + 1)] = v;
                riem_expected[idx4(a + 1, 0, b + 1, 0)] = v;
                riem_expected[idx4(0, a + 1, b + 1, 0)] = -v;
                riem_expected[idx4(a + 1, 0, 0, b + 1)] = -v;
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        riem_expected[idx4(a + 1, b + 1, c + 1, d + 1)] = cf.riem_fiber
                            * (gbar[a * m + c] * gbar[b * m + d]
                                - gbar[a * m + d] * gbar[b * m + c]);
                    }
                }
            }
        }
        let riem_scale = riem_expected
            .iter()
            .fold(0.0f64, |s, v| s.max(v.abs()))
            .max(1.0);
        let mut riem_diff = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k_ in 0..n {
                    for l in 0..n {
                        riem_diff = riem_diff
                            .max((riem.get(&[i, j, k_, l]) - riem_expected[idx4(i, j, k_, l)]).abs());
                    }
                }
            }
        }
        worst.riemann = worst.riemann.max(riem_diff / riem_scale);

        // Ricci blocks
        let mut ric_diff = (ric.get(&[0, 0]) - cf.ric_rr).abs();
        for a in 0..m {
            ric_diff = ric_diff.max(ric.get(&[0, a + 1]).abs());
            for b in 0..m {
                ric_diff =
                    ric_diff.max((ric.get(&[a + 1, b + 1]) - cf.ric_fiber * gbar[a * m + b]).abs());
            }
        }
        let ric_scale = cf.ric_rr.abs().max(cf.ric_fiber.abs()).max(1.0);
        worst.ricci = worst.ricci.max(ric_diff / ric_scale);

        worst.scalar = worst
            .scalar
            .max((scal - cf.scalar).abs() / cf.scalar.abs().max(1.0));

        // radial Cotton rate: ∂_r of the Schouten block against dc/dr
        if n == 3 {
            let (_, dc_dr) = radial_cotton_c(&w)?;
            let ds = metric.schouten_partial(&point, 0)?;
            let mut cot_diff = 0.0f64;
            for a in 0..m {
                for b in 0..m {
                    cot_diff = cot_diff.max((ds.get(&[a + 1, b + 1]) - dc_dr * gbar[a * m + b]).abs());
                }
            }
            let scale = dc_dr.abs().max(1.0);
            let prev = worst.cotton.unwrap();
            worst.cotton = Some(prev.max(cot_diff / scale));
        }

        worst.points_checked += 1;
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn wp(n: usize, rbar: f64, fp: f64, fpp: f64, fppp: f64) -> WarpedProfilePoint {
        WarpedProfilePoint::new(n, rbar, 1.0, fp, fpp, fppp).unwrap()
    }

    #[test]
    fn flat_spherical_in_disguise() {
        // n=3, F' = r at r=1, unit S² fiber: flat space
        let w = wp(3, 2.0, 1.0, 1.0, 0.0);
        let cf = closed_form_curvature(&w).unwrap();
        assert!(cf.scalar.abs() < 1e-14);
        assert!(cf.ric_rr.abs() < 1e-14);
        assert!(cf.riem_radial.abs() < 1e-14);
        assert!(cf.riem_fiber.abs() < 1e-14);
    }

    #[test]
    fn constant_warping_product_blocks() {
        // F' = a constant: R = R̄/a², R_11 = 0, R_ab = (R/2)(F')² ḡ_ab
        let a = 1.7;
        let rbar = 0.9;
        let w = wp(3, rbar, a, 0.0, 0.0);
        let cf = closed_form_curvature(&w).unwrap();
        assert!((cf.scalar - rbar / (a * a)).abs() < 1e-14);
        assert!(cf.ric_rr.abs() < 1e-14);
        let expect = 0.5 * cf.scalar * a * a;
        assert!((cf.ric_fiber - expect).abs() < 1e-13);
    }

    #[test]
    fn trace_identity_exact() {
        // R = R_11 + (n−1)(F')⁻² · ric_fiber for random states
        for (n, rbar, fp, fpp, fppp) in [
            (3, 2.0, 1.3, 0.4, -0.2),
            (4, 6.0, 0.8, -0.3, 0.5),
            (5, 12.0, 2.1, 0.9, 0.1),
            (3, -2.0, 0.6, -0.1, 0.7),
        ] {
            let w = wp(n, rbar, fp, fpp, fppp);
            let cf = closed_form_curvature(&w).unwrap();
            let m = n as f64 - 1.0;
            let trace = cf.ric_rr + m * cf.ric_fiber / (fp * fp);
            assert!(
                (trace - cf.scalar).abs() < 1e-12 * cf.scalar.abs().max(1.0),
                "trace identity broke for n={n}"
            );
        }
    }

    #[test]
    fn rt22_form_matches_general_fiber_coefficient() {
        // n=3 display: R_ab = (R/2 (F')² + F'F''') ḡ_ab
        let w = wp(3, 2.0, 1.2, 0.5, -0.3);
        let cf = closed_form_curvature(&w).unwrap();
        let rt22 = 0.5 * cf.scalar * w.fp * w.fp + w.fp * w.fppp;
        assert!((cf.ric_fiber - rt22).abs() < 1e-13);
    }

    #[test]
    fn radial_cotton_flat_case() {
        // flat: R = 0, F''' = 0 -> c = 0
        let w = wp(3, 2.0, 1.0, 1.0, 0.0).with_fourth(0.0);
        let (c, _) = radial_cotton_c(&w).unwrap();
        assert!(c.abs() < 1e-14);
    }

    #[test]
    fn radial_cotton_key3_for_products() {
        // F' = a, R constant: c = R a²/4
        let a = 1.4;
        let rbar = 3.0;
        let w = wp(3, rbar, a, 0.0, 0.0).with_fourth(0.0);
        let (c, dc) = radial_cotton_c(&w).unwrap();
        let r = rbar / (a * a);
        assert!((c - 0.25 * r * a * a).abs() < 1e-13);
        assert!(dc.abs() < 1e-13);
    }

    #[test]
    fn dc_dr_equals_minus_fpp_fppp() {
        // algebraic consequence of the closed forms: c = ¼R̄ − ½(F″)²
        for (rbar, fp, fpp, fppp, f4) in [
            (2.0, 1.3, 0.4, -0.2, 0.15),
            (-1.0, 0.7, -0.6, 0.3, -0.4),
            (0.0, 2.0, 1.0, 0.5, 0.2),
        ] {
            let w = wp(3, rbar, fp, fpp, fppp).with_fourth(f4);
            let (c, dc) = radial_cotton_c(&w).unwrap();
            assert!((c - (0.25 * rbar - 0.5 * fpp * fpp)).abs() < 1e-12);
            assert!((dc + fpp * fppp).abs() < 1e-12, "dc/dr != −F″F‴");
        }
    }

    #[test]
    fn balance_identity_holds_unconditionally() {
        // (F″)² + 2c = ½ R̄ for every warped profile state
        for (rbar, fp, fpp, fppp) in [(2.0, 1.1, 0.3, 0.2), (5.0, 0.4, -1.2, 0.9)] {
            let w = wp(3, rbar, fp, fpp, fppp).with_fourth(0.0);
            let (c, _) = radial_cotton_c(&w).unwrap();
            assert!((fpp * fpp + 2.0 * c - 0.5 * rbar).abs() < 1e-9);
        }
    }

    #[test]
    fn radial_laplacian_examples() {
        let w = wp(3, 2.0, 1.0, 0.0, 0.0);
        assert_eq!(radial_laplacian_r(&w, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(radial_laplacian_r(&w, 3.0, 5.0).unwrap(), 5.0);
        let w = wp(3, 2.0, 2.0, 1.0, 0.0);
        let v = radial_laplacian_r(&w, 4.0, 1.0).unwrap();
        assert!((v - (1.0 + 2.0 * 0.5 * 4.0)).abs() < 1e-14);
    }

    #[test]
    fn radial_laplacian_matches_generic_engine() {
        // ΔR over the full chart (fiber Christoffel terms included) reduces
        // to R'' + (n−1)(F''/F')R' for radial fields
        let d = ["r"];
        let fprime = parse("cosh(r)", &d).unwrap();
        let metric = warped_chart(3, 2.0, &fprime, [0.2, 2.0]).unwrap();
        let point = [1.1, 1.4, 2.5];
        let mut ev = metric.evaluator(&point, 4).unwrap();
        let gi = ev.g_inv.values();
        let gamma = ev.gamma().clone();
        let scalar = ev.scalar().clone();
        let n = 3;
        let mut lap = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut cov = scalar.derivative(i).derivative(j).value();
                for k in 0..n {
                    cov -= gamma.get(&[k, i, j]).value() * scalar.derivative(k).value();
                }
                lap += gi[i * n + j] * cov;
            }
        }
        let w = WarpedProfilePoint::from_expression(3, 2.0, &fprime, point[0]).unwrap();
        let rp = scalar.derivative(0).value();
        let rpp = scalar.derivative(0).derivative(0).value();
        let rhs = radial_laplacian_r(&w, rp, rpp).unwrap();
        assert!(
            (lap - rhs).abs() < 1e-6 * rhs.abs().max(1.0),
            "generic ΔR {lap} vs radial form {rhs}"
        );
    }

    #[test]
    fn ric_radial_examples_and_sign() {
        let w = wp(3, 2.0, 1.0, 0.0, 0.0);
        assert_eq!(ric_radial(&w).unwrap(), 0.0);
        let w = wp(3, 2.0, 2.0, 0.0, -1.0);
        assert!((ric_radial(&w).unwrap() - 4.0).abs() < 1e-14);
        // sign equivalence: F‴ >= 0 ⟺ Ric(∇F,∇F) <= 0 when F' > 0
        for fppp in [-2.0, -0.5, 0.0, 0.3, 1.7] {
            let w = wp(4, 6.0, 1.3, 0.2, fppp);
            let v = ric_radial(&w).unwrap();
            assert_eq!(fppp >= 0.0, v <= 0.0);
        }
    }

    #[test]
    fn cross_check_flat_and_product() {
        let d = ["r"];
        let flat = parse("r", &d).unwrap();
        let rep = cross_check(3, 2.0, &flat, [0.5, 2.0], 4).unwrap();
        assert!(rep.max_discrepancy() < 1e-9, "flat: {rep:?}");

        let constant = parse("1.5", &d).unwrap();
        let rep = cross_check(3, 2.0, &constant, [0.5, 2.0], 4).unwrap();
        assert!(rep.max_discrepancy() < 1e-9, "product: {rep:?}");
    }

    #[test]
    fn cross_check_cosh_profile() {
        let d = ["r"];
        let fprime = parse("cosh(r)", &d).unwrap();
        let rep = cross_check(3, 2.0, &fprime, [0.2, 2.0], 5).unwrap();
        assert!(rep.max_discrepancy() < 1e-7, "cosh n=3: {rep:?}");
        let rep4 = cross_check(4, 6.0, &fprime, [0.2, 2.0], 3).unwrap();
        assert!(rep4.max_discrepancy() < 1e-7, "cosh n=4: {rep4:?}");
    }

    #[test]
    fn warped_charts_are_truly_cotton_flat() {
        // the full Cotton tensor of a warped 3-chart over a constant-curvature
        // fiber vanishes identically (such metrics are conformally flat);
        // the nonzero radial diagnostic lives in ∂_r of the Schouten block
        let d = ["r"];
        let fprime = parse("cosh(r)", &d).unwrap();
        let metric = warped_chart(3, 2.0, &fprime, [0.2, 2.0]).unwrap();
        let point = [1.0, 1.55, 3.0];
        let c = metric.cotton(&point).unwrap();
        assert!(c.max_abs() < 1e-9, "true Cotton = {}", c.max_abs());
        let w = WarpedProfilePoint::from_expression(3, 2.0, &fprime, 1.0).unwrap();
        let (_, dc) = radial_cotton_c(&w).unwrap();
        assert!(dc.abs() > 0.1, "radial rate should be nonzero for cosh");
    }

    #[test]
    fn product_soliton_construction() {
        let p = build_product_soliton(ProductKind::Shrinking, 1.0, 2.0).unwrap();
        assert!((p.fiber_scalar_curvature - 2.0).abs() < 1e-15);
        assert!((p.warped_fiber_gaussian - 1.0).abs() < 1e-15);
        // scalar curvature equals rho everywhere sampled
        let m = &p.spec.metric;
        for q in crate::sample::halton_box(m.domain(), 6, 5, 0.08) {
            let (_, r) = m.ricci_scalar(&q).unwrap();
            assert!((r - 2.0).abs() < 1e-10, "R = {r} at {q:?}");
            let (_, norm) = p.spec.soliton_residual(&q).unwrap();
            assert!(norm < 1e-10, "soliton residual {norm}");
        }

        let p = build_product_soliton(ProductKind::Expanding, 1.0, -2.0).unwrap();
        for q in crate::sample::halton_box(p.spec.metric.domain(), 6, 5, 0.08) {
            let (_, r) = p.spec.metric.ricci_scalar(&q).unwrap();
            assert!((r + 2.0).abs() < 1e-10, "R = {r} at {q:?}");
            let (_, norm) = p.spec.soliton_residual(&q).unwrap();
            assert!(norm < 1e-10);
        }
    }

    #[test]
    fn product_kind_sign_mismatch_rejected() {
        assert!(matches!(
            build_product_soliton(ProductKind::Shrinking, 1.0, -0.5),
            Err(WarpedError::KindMismatch { .. })
        ));
        assert!(matches!(
            build_product_soliton(ProductKind::Expanding, 1.0, 0.5),
            Err(WarpedError::KindMismatch { .. })
        ));
    }

    #[test]
    fn nonpositive_warping_rejected() {
        assert!(matches!(
            WarpedProfilePoint::new(3, 2.0, 1.0, -0.2, 0.0, 0.0),
            Err(WarpedError::NonpositiveWarping { .. })
        ));
    }

    #[test]
    fn fourth_derivative_required_for_cotton_rate() {
        let w = wp(3, 2.0, 1.0, 0.2, 0.1);
        assert!(matches!(
            radial_cotton_c(&w),
            Err(WarpedError::MissingFourthDerivative)
        ));
    }

    #[test]
    fn fiber_charts_have_requested_scalar_curvature() {
        for (dim, scalar) in [(2usize, 2.0), (2, -2.0), (3, 6.0), (3, -1.5), (4, 12.0), (2, 0.0)] {
            let fc = fiber_chart(dim, scalar).unwrap();
            let m = MetricField::new(
                fc.coords.clone(),
                fc.components.clone(),
                fc.domain.clone(),
                std::collections::BTreeMap::new(),
            )
            .unwrap();
            let mid: Vec<f64> = fc.domain.iter().map(|iv| 0.5 * (iv[0] + iv[1])).collect();
            let (_, r) = m.ricci_scalar(&mid).unwrap();
            assert!(
                (r - scalar).abs() < 1e-8 * scalar.abs().max(1.0),
                "fiber dim {dim} wanted scalar {scalar}, got {r}"
            );
        }
    }
}
