//! Jet-valued tensor engine.
//!
//! Everything here works in the truncated Taylor ring: metric components are
//! evaluated as jets at the base point and every curvature quantity is
//! assembled by ring arithmetic, so each stage keeps exact derivatives of
//! the stage below it. An order-K metric jet supports Christoffel symbols to
//! order K−1, Riemann/Ricci/scalar/Schouten/Weyl to K−2, Cotton to K−3,
//! Bach to K−4, and so on; covariant derivatives of computed fields are one
//! more coefficient-level derivative plus connection terms.

use crate::expr::{eval_jet, Jet, JetSpace};

use super::{GeometryError, MetricField};

/// Dense rank-`rank` array of jets over an `n`-dimensional chart, indexed
/// row-major. All entries share one jet shape.
#[derive(Clone)]
pub(crate) struct JetArr {
    pub n: usize,
    pub rank: usize,
    pub data: Vec<Jet>,
}

pub(crate) fn flat(n: usize, idx: &[usize]) -> usize {
    let mut out = 0;
    for &i in idx {
        debug_assert!(i < n);
        out = out * n + i;
    }
    out
}

/// Visit all rank-tuples over 0..n in row-major order.
pub(crate) fn for_each_index(n: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let total = n.pow(rank as u32);
    let mut idx = vec![0usize; rank];
    for _ in 0..total {
        f(&idx);
        for pos in (0..rank).rev() {
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

impl JetArr {
    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Jet) -> JetArr {
        let mut data = Vec::with_capacity(n.pow(rank as u32));
        for_each_index(n, rank, |idx| data.push(f(idx)));
        JetArr { n, rank, data }
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.data[flat(self.n, idx)]
    }

    pub fn order(&self) -> usize {
        self.data[0].order()
    }

    pub fn trunc(&self, q: usize) -> JetArr {
        if q == self.order() {
            return self.clone();
        }
        JetArr {
            n: self.n,
            rank: self.rank,
            data: self.data.iter().map(|j| j.truncate(q)).collect(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.data.iter().map(|j| j.value()).collect()
    }
}

/// Covariant derivative of a fully covariant rank-r jet field; the result
/// has rank r+1 with the derivative index first:
/// (∇T)_{a i1..ir} = ∂_a T_{i1..ir} − Σ_s Γ^p_{a i_s} T_{..p..}.
pub(crate) fn cov_deriv(t: &JetArr, gamma: &JetArr) -> JetArr {
    let n = t.n;
    let q = t.order();
    assert!(q >= 1, "covariant derivative needs jet order >= 1");
    let gam = gamma.trunc(q - 1);
    let tq = t.trunc(q - 1);
    JetArr::from_fn(n, t.rank + 1, |idx| {
        let a = idx[0];
        let inner = &idx[1..];
        let mut out = t.get(inner).derivative(a);
        let mut swapped = inner.to_vec();
        for s in 0..inner.len() {
            let orig = inner[s];
            for p in 0..n {
                swapped[s] = p;
                out = &out - &(gam.get(&[p, a, orig]) * tq.get(&swapped));
            }
            swapped[s] = orig;
        }
        out
    })
}

/// Invert a small dense value matrix by Gaussian elimination with partial
/// pivoting. Returns None when a pivot collapses relative to the scale.
pub(crate) fn invert_values(mat: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = mat.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let scale = mat.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() < 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
                inv.swap(col * n + k, pivot * n + k);
            }
        }
        let d = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for row in 0..n {
            if row != col {
                let f = a[row * n + col];
                if f != 0.0 {
                    for k in 0..n {
                        a[row * n + k] -= f * a[col * n + k];
                        inv[row * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
    }
    if inv.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(inv)
}

fn mat_mul_jets(a: &JetArr, b: &JetArr) -> JetArr {
    let n = a.n;
    JetArr::from_fn(n, 2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = a.get(&[i, 0]) * b.get(&[0, j]);
        for k in 1..n {
            acc = &acc + &(a.get(&[i, k]) * b.get(&[k, j]));
        }
        acc
    })
}

/// Incremental curvature evaluator at one chart point.
pub(crate) struct Evaluator {
    pub n: usize,
    pub order: usize,
    pub g: JetArr,
    pub g_inv: JetArr,
    gamma: Option<JetArr>,
    riemann: Option<JetArr>,
    ricci: Option<JetArr>,
    scalar: Option<Jet>,
    schouten: Option<JetArr>,
    weyl: Option<JetArr>,
    cotton: Option<JetArr>,
    bach: Option<JetArr>,
}

impl Evaluator {
    pub fn new(m: &MetricField, point: &[f64], order: usize) -> Result<Evaluator, GeometryError> {
        let n = m.dimension();
        if point.len() != n {
            return Err(GeometryError::BadDimension(format!(
                "point has {} coordinates, chart has {n}",
                point.len()
            )));
        }
        let space = JetSpace::get(n, order);
        let bindings = m.bindings(point);
        // evaluate the lower-triangle entry for both (i,j) and (j,i) so the
        // computed metric is exactly symmetric
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                data.push(eval_jet(m.component(a, b), &bindings, order).map_err(GeometryError::Expr)?);
            }
        }
        let g = JetArr { n, rank: 2, data };

        let g0 = g.values();
        let g0_inv = invert_values(&g0, n).ok_or_else(|| GeometryError::SingularMetric {
            point: point.to_vec(),
        })?;

        // Neumann series for the jet inverse: with g = g0(I + A) and
        // A = g0⁻¹·(g − g0) carrying a zero constant term, Σ (−A)^m
        // terminates at the truncation order.
        let delta = JetArr::from_fn(n, 2, |idx| g.get(idx).zero_constant());
        let g0_inv_jets = JetArr::from_fn(n, 2, |idx| {
            Jet::constant(space.clone(), g0_inv[idx[0] * n + idx[1]])
        });
        let a = mat_mul_jets(&g0_inv_jets, &delta);
        let identity = JetArr::from_fn(n, 2, |idx| {
            Jet::constant(space.clone(), if idx[0] == idx[1] { 1.0 } else { 0.0 })
        });
        let mut acc = identity.clone();
        let mut power = identity;
        for _ in 0..order {
            power = mat_mul_jets(&power, &a);
            for j in power.data.iter_mut() {
                *j = -&*j;
            }
            for (x, y) in acc.data.iter_mut().zip(&power.data) {
                *x = &*x + y;
            }
        }
        let g_inv = mat_mul_jets(&acc, &g0_inv_jets);

        Ok(Evaluator {
            n,
            order,
            g,
            g_inv,
            gamma: None,
            riemann: None,
            ricci: None,
            scalar: None,
            schouten: None,
            weyl: None,
            cotton: None,
            bach: None,
        })
    }

    pub fn gamma(&mut self) -> &JetArr {
        if self.gamma.is_none() {
            let n = self.n;
            let k1 = self.order - 1;
            let gi = self.g_inv.trunc(k1);
            let g = &self.g;
            let gamma = JetArr::from_fn(n, 3, |idx| {
                let (k, i, j) = (idx[0], idx[1], idx[2]);
                let mut acc: Option<Jet> = None;
                for l in 0..n {
                    let sym = &(&g.get(&[j, l]).derivative(i) + &g.get(&[i, l]).derivative(j))
                        - &g.get(&[i, j]).derivative(l);
                    let term = gi.get(&[k, l]) * &sym;
                    acc = Some(match acc {
                        Some(a) => &a + &term,
                        None => term,
                    });
                }
                acc.unwrap().scale(0.5)
            });
            self.gamma = Some(gamma);
        }
        self.gamma.as_ref().unwrap()
    }

    /// Fully covariant Riemann tensor, in the sign convention where the unit
    /// round sphere has R_{1212} > 0 and Ric = (n−1)g.
    pub fn riemann(&mut self) -> &JetArr {
        if self.riemann.is_none() {
            let n = self.n;
            let k2 = self.order - 2;
            let gamma = self.gamma().clone();
            let gam = gamma.trunc(k2);
            let g = self.g.trunc(k2);
            // R^m_{kij} = ∂_i Γ^m_{jk} − ∂_j Γ^m_{ik} + Γ^m_{ip}Γ^p_{jk} − Γ^m_{jp}Γ^p_{ik}
            let op = JetArr::from_fn(n, 4, |idx| {
                let (m_, k, i, j) = (idx[0], idx[1], idx[2], idx[3]);
                let mut acc = &gamma.get(&[m_, j, k]).derivative(i)
                    - &gamma.get(&[m_, i, k]).derivative(j);
                for p in 0..n {
                    acc = &acc + &(gam.get(&[m_, i, p]) * gam.get(&[p, j, k]));
                    acc = &acc - &(gam.get(&[m_, j, p]) * gam.get(&[p, i, k]));
                }
                acc
            });
            let riem = JetArr::from_fn(n, 4, |idx| {
                let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
                let mut acc: Option<Jet> = None;
                for m_ in 0..n {
                    let term = g.get(&[l, m_]) * op.get(&[m_, k, i, j]);
                    acc = Some(match acc {
                        Some(a) => &a + &term,
                        None => term,
                    });
                }
                -&acc.unwrap()
            });
            self.riemann = Some(riem);
        }
        self.riemann.as_ref().unwrap()
    }

    /// Ricci tensor R_{ij} = g^{kl} R_{ikjl}.
    pub fn ricci(&mut self) -> &JetArr {
        if self.ricci.is_none() {
            let n = self.n;
            let k2 = self.order - 2;
            let riem = self.riemann().clone();
            let gi = self.g_inv.trunc(k2);
            let ric = JetArr::from_fn(n, 2, |idx| {
                let (i, j) = (idx[0], idx[1]);
                let mut acc: Option<Jet> = None;
                for k in 0..n {
                    for l in 0..n {
                        let term = gi.get(&[k, l]) * riem.get(&[i, k, j, l]);
                        acc = Some(match acc {
                            Some(a) => &a + &term,
                            None => term,
                        });
                    }
                }
                acc.unwrap()
            });
            self.ricci = Some(ric);
        }
        self.ricci.as_ref().unwrap()
    }

    pub fn scalar(&mut self) -> &Jet {
        if self.scalar.is_none() {
            let n = self.n;
            let k2 = self.order - 2;
            let ric = self.ricci().clone();
            let gi = self.g_inv.trunc(k2);
            let mut acc: Option<Jet> = None;
            for i in 0..n {
                for j in 0..n {
                    let term = gi.get(&[i, j]) * ric.get(&[i, j]);
                    acc = Some(match acc {
                        Some(a) => &a + &term,
                        None => term,
                    });
                }
            }
            self.scalar = Some(acc.unwrap());
        }
        self.scalar.as_ref().unwrap()
    }

    /// Schouten tensor S = Ric − R g / (2(n−1)).
    pub fn schouten(&mut self) -> &JetArr {
        if self.schouten.is_none() {
            let n = self.n;
            let k2 = self.order - 2;
            let factor = -1.0 / (2.0 * (n as f64 - 1.0));
            let scalar = self.scalar().clone();
            let ric = self.ricci().clone();
            let g = self.g.trunc(k2);
            let s = JetArr::from_fn(n, 2, |idx| {
                ric.get(idx) + &(&scalar * g.get(idx)).scale(factor)
            });
            self.schouten = Some(s);
        }
        self.schouten.as_ref().unwrap()
    }

    /// Weyl tensor from the curvature decomposition,
    /// W = Riem − R/((n−1)(n−2)) (g∧g terms) + 1/(n−2) (Ric∧g terms).
    pub fn weyl(&mut self) -> Result<&JetArr, GeometryError> {
        if self.n < 3 {
            return Err(GeometryError::BadDimension(
                "the Weyl tensor needs dimension >= 3".into(),
            ));
        }
        if self.weyl.is_none() {
            let n = self.n;
            let nf = n as f64;
            let k2 = self.order - 2;
            let riem = self.riemann().clone();
            let scalar = self.scalar().clone();
            let ric = self.ricci().clone();
            let g = self.g.trunc(k2);
            let c_scalar = 1.0 / ((nf - 1.0) * (nf - 2.0));
            let c_ric = 1.0 / (nf - 2.0);
            let w = JetArr::from_fn(n, 4, |idx| {
                let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
                let gg = &(g.get(&[i, l]) * g.get(&[j, k])) - &(g.get(&[i, k]) * g.get(&[j, l]));
                let ric_g = &(&(ric.get(&[i, l]) * g.get(&[j, k]))
                    + &(ric.get(&[j, k]) * g.get(&[i, l])))
                    - &(&(ric.get(&[i, k]) * g.get(&[j, l]))
                        + &(ric.get(&[j, l]) * g.get(&[i, k])));
                let mut out = riem.get(&[i, j, k, l]) - &(&scalar * &gg).scale(c_scalar);
                out = &out + &ric_g.scale(c_ric);
                out
            });
            self.weyl = Some(w);
        }
        Ok(self.weyl.as_ref().unwrap())
    }

    /// Cotton tensor C_{ijk} = ∇_i S_{jk} − ∇_j S_{ik}.
    pub fn cotton(&mut self) -> &JetArr {
        if self.cotton.is_none() {
            let n = self.n;
            let gamma = self.gamma().clone();
            let s = self.schouten().clone();
            let grad_s = cov_deriv(&s, &gamma);
            let c = JetArr::from_fn(n, 3, |idx| {
                let (i, j, k) = (idx[0], idx[1], idx[2]);
                grad_s.get(&[i, j, k]) - grad_s.get(&[j, i, k])
            });
            self.cotton = Some(c);
        }
        self.cotton.as_ref().unwrap()
    }

    /// Bach tensor. Dimension 3 uses B_{ij} = ∇_k C_{kij}; n ≥ 4 uses the
    /// Weyl-based form. The two n ≥ 4 routes are exposed separately via
    /// [`Evaluator::bach_routes`].
    pub fn bach(&mut self) -> Result<&JetArr, GeometryError> {
        if self.bach.is_none() {
            let b = if self.n == 3 {
                self.bach_div_cotton()
            } else if self.n >= 4 {
                self.bach_routes()?.0
            } else {
                return Err(GeometryError::BadDimension(
                    "the Bach tensor needs dimension >= 3".into(),
                ));
            };
            self.bach = Some(b);
        }
        Ok(self.bach.as_ref().unwrap())
    }

    /// Divergence of the Cotton tensor over its first index,
    /// B_{ij} = g^{ka} ∇_a C_{kij}.
    pub fn bach_div_cotton(&mut self) -> JetArr {
        let n = self.n;
        let gamma = self.gamma().clone();
        let c = self.cotton().clone();
        let grad_c = cov_deriv(&c, &gamma);
        let q = grad_c.order();
        let gi = self.g_inv.trunc(q);
        JetArr::from_fn(n, 2, |idx| {
            let (i, j) = (idx[0], idx[1]);
            let mut acc: Option<Jet> = None;
            for k in 0..n {
                for a in 0..n {
                    let term = gi.get(&[k, a]) * grad_c.get(&[a, k, i, j]);
                    acc = Some(match acc {
                        Some(x) => &x + &term,
                        None => term,
                    });
                }
            }
            acc.unwrap()
        })
    }

    /// Both n ≥ 4 Bach forms:
    /// (W route)  B_{ij} = 1/(n−3) ∇^k∇^l W_{ikjl} + 1/(n−2) R_{kl} W_i{}^k{}_j{}^l,
    /// (C route)  B_{ij} = 1/(n−2) (∇_k C_{kij} + R_{kl} W_i{}^k{}_j{}^l).
    pub fn bach_routes(&mut self) -> Result<(JetArr, JetArr), GeometryError> {
        let n = self.n;
        if n < 4 {
            return Err(GeometryError::BadDimension(
                "the Weyl-based Bach form needs dimension >= 4".into(),
            ));
        }
        let nf = n as f64;
        let gamma = self.gamma().clone();
        let w = self.weyl()?.clone();
        let ric = self.ricci().clone();
        let grad_w = cov_deriv(&w, &gamma);
        let grad2_w = cov_deriv(&grad_w, &gamma);
        let q = grad2_w.order();
        let gi = self.g_inv.trunc(q);
        let ric_q = ric.trunc(q);
        let w_q = w.trunc(q);

        // shared contraction R_{kl} W_i{}^k{}_j{}^l
        let ric_weyl = JetArr::from_fn(n, 2, |idx| {
            let (i, j) = (idx[0], idx[1]);
            let mut acc: Option<Jet> = None;
            for k in 0..n {
                for l in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            let term = &(ric_q.get(&[k, l]) * gi.get(&[k, a]))
                                * &(gi.get(&[l, b]) * w_q.get(&[i, a, j, b]));
                            acc = Some(match acc {
                                Some(x) => &x + &term,
                                None => term,
                            });
                        }
                    }
                }
            }
            acc.unwrap()
        });

        let div_div_w = JetArr::from_fn(n, 2, |idx| {
            let (i, j) = (idx[0], idx[1]);
            let mut acc: Option<Jet> = None;
            for k in 0..n {
                for l in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            let term = &(gi.get(&[k, a]) * gi.get(&[l, b]))
                                * grad2_w.get(&[a, b, i, k, j, l]);
                            acc = Some(match acc {
                                Some(x) => &x + &term,
                                None => term,
                            });
                        }
                    }
                }
            }
            acc.unwrap()
        });

        let route_w = JetArr::from_fn(n, 2, |idx| {
            &div_div_w.get(idx).scale(1.0 / (nf - 3.0))
                + &ric_weyl.get(idx).scale(1.0 / (nf - 2.0))
        });

        let div_cotton = self.bach_div_cotton();
        let qc = div_cotton.order().min(q);
        let div_cotton = div_cotton.trunc(qc);
        let ric_weyl_c = ric_weyl.trunc(qc);
        let route_c = JetArr::from_fn(n, 2, |idx| {
            (div_cotton.get(idx) + ric_weyl_c.get(idx)).scale(1.0 / (nf - 2.0))
        });

        Ok((route_w, route_c))
    }
}
