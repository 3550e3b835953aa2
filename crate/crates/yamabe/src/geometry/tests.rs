use std::collections::BTreeMap;

use super::*;
use crate::expr::parse;

fn e(src: &str, declared: &[&str]) -> Expr {
    parse(src, declared).unwrap()
}

/// Flat R^3 in Cartesian coordinates on a unit box.
pub(crate) fn euclidean3() -> MetricField {
    let coords = vec!["x".into(), "y".into(), "z".into()];
    let d = ["x", "y", "z"];
    let comps = vec![
        vec![e("1", &d), e("0", &d), e("0", &d)],
        vec![e("0", &d), e("1", &d), e("0", &d)],
        vec![e("0", &d), e("0", &d), e("1", &d)],
    ];
    MetricField::new(coords, comps, vec![[-1.0, 1.0]; 3], BTreeMap::new()).unwrap()
}

/// Flat R^3 in spherical coordinates, dr² + r²dθ² + r²sin²θ dφ².
pub(crate) fn flat_spherical() -> MetricField {
    let coords = vec!["r".into(), "theta".into(), "phi".into()];
    let d = ["r", "theta", "phi"];
    let comps = vec![
        vec![e("1", &d), e("0", &d), e("0", &d)],
        vec![e("0", &d), e("r^2", &d), e("0", &d)],
        vec![e("0", &d), e("0", &d), e("r^2*sin(theta)^2", &d)],
    ];
    MetricField::new(
        coords,
        comps,
        vec![[0.5, 3.0], [0.4, 2.7], [0.0, 6.0]],
        BTreeMap::new(),
    )
    .unwrap()
}

/// Unit round S^3 in a hyperspherical chart,
/// dχ² + sin²χ (dθ² + sin²θ dφ²).
pub(crate) fn round_s3() -> MetricField {
    let coords = vec!["chi".into(), "theta".into(), "phi".into()];
    let d = ["chi", "theta", "phi"];
    let comps = vec![
        vec![e("1", &d), e("0", &d), e("0", &d)],
        vec![e("0", &d), e("sin(chi)^2", &d), e("0", &d)],
        vec![e("0", &d), e("0", &d), e("sin(chi)^2*sin(theta)^2", &d)],
    ];
    MetricField::new(
        coords,
        comps,
        vec![[0.4, 2.7], [0.4, 2.7], [0.0, 6.0]],
        BTreeMap::new(),
    )
    .unwrap()
}

/// Unit round S^4, dχ² + sin²χ (dθ² + sin²θ (dφ² + sin²φ dψ²)).
fn round_s4() -> MetricField {
    let coords = vec!["chi".into(), "theta".into(), "phi".into(), "psi".into()];
    let d = ["chi", "theta", "phi", "psi"];
    let comps = vec![
        vec![e("1", &d), e("0", &d), e("0", &d), e("0", &d)],
        vec![e("0", &d), e("sin(chi)^2", &d), e("0", &d), e("0", &d)],
        vec![
            e("0", &d),
            e("0", &d),
            e("sin(chi)^2*sin(theta)^2", &d),
            e("0", &d),
        ],
        vec![
            e("0", &d),
            e("0", &d),
            e("0", &d),
            e("sin(chi)^2*sin(theta)^2*sin(phi)^2", &d),
        ],
    ];
    MetricField::new(
        coords,
        comps,
        vec![[0.4, 2.7], [0.4, 2.7], [0.4, 2.7], [0.0, 6.0]],
        BTreeMap::new(),
    )
    .unwrap()
}

/// A generic analytic 3-metric with no special structure: diagonal-dominant
/// perturbation of the identity, positive definite over the unit box.
pub(crate) fn bumpy3() -> MetricField {
    let coords = vec!["x".into(), "y".into(), "z".into()];
    let d = ["x", "y", "z"];
    let comps = vec![
        vec![
            e("1 + 0.2*sin(x)*cos(y)", &d),
            e("0.1*x*y", &d),
            e("0.05*sin(z)", &d),
        ],
        vec![
            e("0.1*x*y", &d),
            e("1.1 + 0.15*exp(-x^2) + 0.1*z^2", &d),
            e("0.08*cos(x+z)", &d),
        ],
        vec![
            e("0.05*sin(z)", &d),
            e("0.08*cos(x+z)", &d),
            e("0.9 + 0.1*cosh(y/2)", &d),
        ],
    ];
    MetricField::new(coords, comps, vec![[-0.5, 0.5]; 3], BTreeMap::new()).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn euclidean_christoffel_vanishes() {
    let m = euclidean3();
    let g = m.christoffel(&[0.3, -0.2, 0.9]).unwrap();
    assert!(g.max_abs() == 0.0);
}

#[test]
fn flat_spherical_christoffel_hand_values() {
    let m = flat_spherical();
    let p = [2.0, std::f64::consts::FRAC_PI_2, 0.0];
    let g = m.christoffel(&p).unwrap();
    // Γ^r_θθ = -r, Γ^r_φφ = -r sin²θ, Γ^θ_rθ = 1/r
    assert!((g.get(&[0, 1, 1]) + 2.0).abs() < 1e-12);
    assert!((g.get(&[0, 2, 2]) + 2.0).abs() < 1e-12);
    assert!((g.get(&[1, 0, 1]) - 0.5).abs() < 1e-12);
    // symmetry in the lower pair
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.get(&[k, i, j]), g.get(&[k, j, i]));
            }
        }
    }
}

#[test]
fn flat_charts_have_no_curvature() {
    let m = flat_spherical();
    for p in crate::sample::halton_box(m.domain(), 6, 3, 0.05) {
        let riem = m.riemann(&p).unwrap();
        assert!(riem.max_abs() < 1e-9, "Riemann {} at {p:?}", riem.max_abs());
        let (ric, r) = m.ricci_scalar(&p).unwrap();
        assert!(ric.max_abs() < 1e-9);
        assert!(r.abs() < 1e-9);
    }
}

#[test]
fn round_s3_calibration() {
    let m = round_s3();
    for p in crate::sample::halton_box(m.domain(), 5, 11, 0.05) {
        let (g, _) = m.metric_values(&p).unwrap();
        let (ric, r) = m.ricci_scalar(&p).unwrap();
        assert!((r - 6.0).abs() < 1e-8, "R = {r} at {p:?}");
        let expect: Vec<f64> = g.iter().map(|v| 2.0 * v).collect();
        assert!(max_abs_diff(&ric.components, &expect) < 1e-8);

        // constant-curvature form R_{ijkl} = g_{ik}g_{jl} − g_{il}g_{jk}
        let riem = m.riemann(&p).unwrap();
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let expect = g[i * n + k] * g[j * n + l] - g[i * n + l] * g[j * n + k];
                        assert!(
                            (riem.get(&[i, j, k, l]) - expect).abs() < 1e-8,
                            "R_{{{i}{j}{k}{l}}}"
                        );
                    }
                }
            }
        }
        assert!((riem.get(&[0, 1, 0, 1]).abs() - g[0] * g[4]).abs() < 1e-8);
    }
}

#[test]
fn metric_inverse_round_trip_in_jets() {
    let m = bumpy3();
    let p = [0.2, -0.3, 0.1];
    let ev = m.evaluator(&p, 4).unwrap();
    // g · g⁻¹ = 1 through every jet coefficient
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = ev.g.get(&[i, 0]) * ev.g_inv.get(&[0, j]);
            for k in 1..3 {
                acc = &acc + &(ev.g.get(&[i, k]) * ev.g_inv.get(&[k, j]));
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((acc.value() - expect).abs() < 1e-13);
            assert!(
                acc.coefficients()[1..]
                    .iter()
                    .all(|v| v.abs() < 1e-12),
                "non-constant coefficients survive in g·g⁻¹"
            );
        }
    }
}

#[test]
fn riemann_symmetries_on_generic_metrics() {
    for (m, seed) in [(bumpy3(), 1u64), (round_s3(), 2u64), (bumpy4(), 3u64)] {
        for p in crate::sample::halton_box(m.domain(), 4, seed, 0.05) {
            let riem = m.riemann(&p).unwrap();
            let n = m.dimension();
            let scale = riem.max_abs().max(1.0);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let v = riem.get(&[i, j, k, l]);
                            assert!((v + riem.get(&[j, i, k, l])).abs() < 1e-10 * scale);
                            assert!((v + riem.get(&[i, j, l, k])).abs() < 1e-10 * scale);
                            assert!((v - riem.get(&[k, l, i, j])).abs() < 1e-10 * scale);
                            // first Bianchi
                            let b = v + riem.get(&[j, k, i, l]) + riem.get(&[k, i, j, l]);
                            assert!(b.abs() < 1e-10 * scale);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn ricci_is_symmetric() {
    let m = bumpy3();
    let p = [0.1, 0.2, -0.3];
    let (ric, _) = m.ricci_scalar(&p).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((ric.get(&[i, j]) - ric.get(&[j, i])).abs() < 1e-12);
        }
    }
}

#[test]
fn schouten_trace_identity() {
    // g^{ij} S_{ij} = R − 3R/4 = R/4 in dimension 3
    let m = bumpy3();
    for p in crate::sample::halton_box(m.domain(), 5, 17, 0.05) {
        let s = m.schouten(&p).unwrap();
        let (_, r) = m.ricci_scalar(&p).unwrap();
        let (_, gi) = m.metric_values(&p).unwrap();
        let mut tr = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                tr += gi[i * 3 + j] * s.get(&[i, j]);
            }
        }
        assert!((tr - r / 4.0).abs() < 1e-10 * r.abs().max(1.0));
    }
}

#[test]
fn weyl_vanishes_in_dimension_3() {
    let m = bumpy3();
    let w = m.weyl(&[0.25, -0.15, 0.4]).unwrap();
    assert!(w.max_abs() < 1e-9, "3d Weyl = {}", w.max_abs());
}

#[test]
fn weyl_and_bach_vanish_on_flat_4_space() {
    let coords = vec!["x".into(), "y".into(), "z".into(), "w".into()];
    let d = ["x", "y", "z", "w"];
    let comps = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| e(if i == j { "1" } else { "0" }, &d))
                .collect()
        })
        .collect();
    let m = MetricField::new(coords, comps, vec![[-1.0, 1.0]; 4], BTreeMap::new()).unwrap();
    let p = [0.3, -0.2, 0.5, 0.1];
    assert_eq!(m.weyl(&p).unwrap().max_abs(), 0.0);
    assert_eq!(m.bach(&p).unwrap().max_abs(), 0.0);
}

#[test]
fn weyl_vanishes_on_round_s4() {
    let m = round_s4();
    let w = m.weyl(&[1.1, 1.3, 0.9, 0.5]).unwrap();
    let riem = m.riemann(&[1.1, 1.3, 0.9, 0.5]).unwrap();
    assert!(w.max_abs() < 1e-8 * riem.max_abs().max(1.0));
    // sanity: S4 itself is curved
    assert!(riem.max_abs() > 0.1);
}

#[test]
fn weyl_trace_free() {
    let m = round_s4();
    let p = [1.0, 1.2, 0.8, 0.3];
    let w = m.weyl(&p).unwrap();
    let (_, gi) = m.metric_values(&p).unwrap();
    let n = 4;
    // contract first and third slots
    for j in 0..n {
        for l in 0..n {
            let mut tr = 0.0;
            for i in 0..n {
                for k in 0..n {
                    tr += gi[i * n + k] * w.get(&[i, j, k, l]);
                }
            }
            assert!(tr.abs() < 1e-10);
        }
    }
}

#[test]
fn decomposition_reconstructs_riemann_in_3d() {
    // Riem = S∧g with W = 0 in dimension 3
    let m = bumpy3();
    for p in crate::sample::halton_box(m.domain(), 4, 23, 0.05) {
        let riem = m.riemann(&p).unwrap();
        let s = m.schouten(&p).unwrap();
        let (g, _) = m.metric_values(&p).unwrap();
        let n = 3;
        let scale = riem.max_abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let rec = s.get(&[i, k]) * g[j * n + l] + s.get(&[j, l]) * g[i * n + k]
                            - s.get(&[i, l]) * g[j * n + k]
                            - s.get(&[j, k]) * g[i * n + l];
                        assert!((riem.get(&[i, j, k, l]) - rec).abs() < 1e-9 * scale);
                    }
                }
            }
        }
    }
}

#[test]
fn cotton_skew_and_trace_free() {
    let m = bumpy3();
    for p in crate::sample::halton_box(m.domain(), 5, 29, 0.05) {
        let c = m.cotton(&p).unwrap();
        let (_, gi) = m.metric_values(&p).unwrap();
        let n = 3;
        let scale = c.max_abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert!((c.get(&[i, j, k]) + c.get(&[j, i, k])).abs() < 1e-9 * scale);
                }
            }
        }
        for k in 0..n {
            let mut t1 = 0.0;
            let mut t2 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    t1 += gi[i * n + j] * c.get(&[i, j, k]);
                    t2 += gi[i * n + j] * c.get(&[i, k, j]);
                }
            }
            assert!(t1.abs() < 1e-9 * scale);
            assert!(t2.abs() < 1e-9 * scale);
        }
    }
}

#[test]
fn cotton_two_forms_agree() {
    // ∇S form vs the Ricci/scalar form with the 1/(2(n−1)) trace terms
    let m = bumpy3();
    let p = [0.3, 0.3, -0.2];
    let c = m.cotton(&p).unwrap();
    let mut ev = m.evaluator(&p, 3).unwrap();
    let gamma = ev.gamma().clone();
    let ric = ev.ricci().clone();
    let scalar = ev.scalar().clone();
    let grad_ric = engine::cov_deriv(&ric, &gamma);
    let n = 3;
    let g = ev.g.values();
    // ∇R as jets: coefficient-level derivatives of the scalar jet
    let dr: Vec<f64> = (0..n).map(|a| scalar.derivative(a).value()).collect();
    let scale = c.max_abs().max(1.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let alt = grad_ric.get(&[i, j, k]).value() - grad_ric.get(&[j, i, k]).value()
                    - (g[j * n + k] * dr[i] - g[i * n + k] * dr[j]) / 4.0;
                assert!((c.get(&[i, j, k]) - alt).abs() < 1e-9 * scale);
            }
        }
    }
}

#[test]
fn cotton_zero_on_constant_curvature() {
    let m = round_s3();
    let c = m.cotton(&[1.2, 1.0, 0.7]).unwrap();
    assert!(c.max_abs() < 1e-9, "round sphere Cotton = {}", c.max_abs());
    let m = flat_spherical();
    let c = m.cotton(&[1.7, 1.3, 2.0]).unwrap();
    assert!(c.max_abs() < 1e-9);
}

#[test]
fn bumpy_metric_is_not_conformally_flat() {
    let m = bumpy3();
    let c = m.cotton(&[0.3, -0.2, 0.25]).unwrap();
    assert!(c.max_abs() > 1e-4, "test metric should have nonzero Cotton");
}

#[test]
fn bach_zero_on_constant_curvature() {
    let m = round_s3();
    let b = m.bach(&[1.2, 1.0, 0.7]).unwrap();
    assert!(b.max_abs() < 1e-8);
}

#[test]
fn bach_trace_free_in_3d() {
    let m = bumpy3();
    let p = [0.2, 0.25, -0.3];
    let b = m.bach(&p).unwrap();
    let (_, gi) = m.metric_values(&p).unwrap();
    let mut tr = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            tr += gi[i * 3 + j] * b.get(&[i, j]);
        }
    }
    assert!(tr.abs() < 1e-8 * b.max_abs().max(1.0), "tr B = {tr}");
}

/// A generic analytic 4-metric for the n = 4 code paths.
fn bumpy4() -> MetricField {
    let coords = vec!["x".into(), "y".into(), "z".into(), "w".into()];
    let d = ["x", "y", "z", "w"];
    let comps = vec![
        vec![
            e("1 + 0.1*sin(x+w)", &d),
            e("0.05*x*y", &d),
            e("0", &d),
            e("0.04*cos(z)", &d),
        ],
        vec![
            e("0.05*x*y", &d),
            e("1.2 + 0.1*cos(z)", &d),
            e("0.06*sin(w)", &d),
            e("0", &d),
        ],
        vec![
            e("0", &d),
            e("0.06*sin(w)", &d),
            e("0.9 + 0.1*exp(-y^2)", &d),
            e("0.03*x", &d),
        ],
        vec![
            e("0.04*cos(z)", &d),
            e("0", &d),
            e("0.03*x", &d),
            e("1 + 0.08*cosh(x/2)", &d),
        ],
    ];
    MetricField::new(coords, comps, vec![[-0.5, 0.5]; 4], BTreeMap::new()).unwrap()
}

#[test]
fn bach_routes_agree_for_n4() {
    let m = bumpy4();
    let p = [0.2, -0.1, 0.15, 0.05];
    let (bw, bc) = m.bach_both_routes(&p).unwrap();
    let scale = bw.max_abs().max(bc.max_abs()).max(1e-9);
    assert!(
        max_abs_diff(&bw.components, &bc.components) < 1e-7 * scale,
        "Bach routes differ by {} (scale {scale})",
        max_abs_diff(&bw.components, &bc.components)
    );
    assert!(bw.max_abs() > 1e-8, "generic 4-metric should not be Bach-flat");
}

#[test]
fn bach_routes_rejected_for_n3() {
    let m = bumpy3();
    assert!(matches!(
        m.bach_both_routes(&[0.1, 0.1, 0.1]),
        Err(GeometryError::BadDimension(_))
    ));
}

#[test]
fn contracted_second_bianchi() {
    // ∇^i R_{ij} = ½ ∂_j R
    let m = bumpy3();
    for p in crate::sample::halton_box(m.domain(), 4, 31, 0.05) {
        let mut ev = m.evaluator(&p, 3).unwrap();
        let gamma = ev.gamma().clone();
        let ric = ev.ricci().clone();
        let scalar = ev.scalar().clone();
        let grad_ric = engine::cov_deriv(&ric, &gamma);
        let gi = ev.g_inv.values();
        let n = 3;
        for j in 0..n {
            let mut div = 0.0;
            for i in 0..n {
                for a in 0..n {
                    div += gi[i * n + a] * grad_ric.get(&[a, i, j]).value();
                }
            }
            let half_dr = 0.5 * scalar.derivative(j).value();
            assert!(
                (div - half_dr).abs() < 1e-7,
                "second Bianchi residual {} at {p:?}",
                (div - half_dr).abs()
            );
        }
    }
}

#[test]
fn hessian_laplacian_grad_inner_flat() {
    let m = euclidean3();
    let d = ["x", "y", "z"];
    let f = e("x^2 + y^2 + z^2", &d);
    let p = [0.4, -0.7, 0.1];
    let h = m.hessian(&f, &p).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j { 2.0 } else { 0.0 };
            assert!((h.get(&[i, j]) - expect).abs() < 1e-12);
        }
    }
    let fx2 = e("x^2", &d);
    assert!((m.laplacian(&fx2, &p).unwrap() - 2.0).abs() < 1e-12);
    let harmonic = e("x*y", &d);
    assert!(m.laplacian(&harmonic, &p).unwrap().abs() < 1e-12);
    let fx = e("x", &d);
    let fy = e("y", &d);
    assert!((m.grad_inner(&fx, &fx, &p).unwrap() - 1.0).abs() < 1e-12);
    assert!(m.grad_inner(&fx, &fy, &p).unwrap().abs() < 1e-12);

    let c = e("3.7", &d);
    assert!(m.hessian(&c, &p).unwrap().max_abs() == 0.0);
}

#[test]
fn raise_lower_round_trip() {
    let m = bumpy3();
    let p = [0.1, -0.2, 0.35];
    let (g, gi) = m.metric_values(&p).unwrap();
    let (ric, _) = m.ricci_scalar(&p).unwrap();
    let up = ric.raise_index(0, &gi);
    let back = up.lower_index(0, &g);
    let scale = ric.max_abs().max(1.0);
    assert!(max_abs_diff(&back.components, &ric.components) < 1e-12 * scale);
}

#[test]
fn asymmetric_metric_rejected() {
    let coords = vec!["x".into(), "y".into()];
    let d = ["x", "y"];
    let comps = vec![
        vec![e("1", &d), e("x", &d)],
        vec![e("y", &d), e("1", &d)],
    ];
    let r = MetricField::new(coords, comps, vec![[-1.0, 1.0]; 2], BTreeMap::new());
    assert!(matches!(r, Err(GeometryError::AsymmetricMetric { .. })));
}

#[test]
fn singular_metric_detected() {
    let coords = vec!["x".into(), "y".into()];
    let d = ["x", "y"];
    let comps = vec![
        vec![e("x", &d), e("0", &d)],
        vec![e("0", &d), e("1", &d)],
    ];
    let m = MetricField::new(coords, comps, vec![[-1.0, 1.0], [-1.0, 1.0]], BTreeMap::new()).unwrap();
    assert!(matches!(
        m.riemann(&[0.0, 0.5]),
        Err(GeometryError::SingularMetric { .. })
    ));
    // fine away from the degeneracy
    assert!(m.riemann(&[0.5, 0.5]).is_ok());
}

#[test]
fn positive_definite_probe() {
    let m = bumpy3();
    assert!(m.is_positive_definite(&[0.1, 0.1, 0.1]).unwrap());
    let coords = vec!["x".into(), "y".into()];
    let d = ["x", "y"];
    let comps = vec![
        vec![e("1", &d), e("0", &d)],
        vec![e("0", &d), e("-1", &d)],
    ];
    let lorentz =
        MetricField::new(coords, comps, vec![[-1.0, 1.0]; 2], BTreeMap::new()).unwrap();
    assert!(!lorentz.is_positive_definite(&[0.0, 0.0]).unwrap());
}
