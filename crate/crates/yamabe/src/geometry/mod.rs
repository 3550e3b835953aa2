//! Curvature of coordinate-chart metrics.
//!
//! A [`MetricField`] is an n×n symmetric matrix of analytic expressions over
//! named coordinates. All curvature operations evaluate pointwise through
//! jets and return plain component arrays; sign conventions are fixed so
//! that the unit round sphere has positive scalar curvature, `R_{ij} =
//! R_{ipjp}`, and the Schouten tensor is `Ric − R g / (2(n−1))`.

mod engine;
#[cfg(test)]
mod tests;

pub(crate) use engine::{cov_deriv, for_each_index, Evaluator, JetArr};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{eval_jet, Bindings, Expr, ExprError};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("metric expression matrix is not symmetric at entry ({i},{j})")]
    AsymmetricMetric { i: usize, j: usize },
    #[error("dimension error: {0}")]
    BadDimension(String),
    #[error("chart domain error: {0}")]
    BadDomain(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Variance of one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// Dense pointwise tensor with an explicit variance signature.
#[derive(Debug, Clone, Serialize)]
pub struct TensorValue {
    pub point: Vec<f64>,
    pub variance: Vec<Variance>,
    pub n: usize,
    pub components: Vec<f64>,
}

impl TensorValue {
    pub(crate) fn new(point: &[f64], variance: Vec<Variance>, n: usize, components: Vec<f64>) -> Self {
        assert_eq!(components.len(), n.pow(variance.len() as u32));
        TensorValue {
            point: point.to_vec(),
            variance,
            n,
            components,
        }
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.components[engine::flat(self.n, idx)]
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Contract one slot with g⁻¹ (raising) or g (lowering); `metric` is the
    /// n×n matrix to contract with, row-major.
    fn contract_slot(&self, slot: usize, metric: &[f64], new_variance: Variance) -> TensorValue {
        let n = self.n;
        let rank = self.rank();
        assert!(slot < rank);
        let mut out = vec![0.0; self.components.len()];
        let mut variance = self.variance.clone();
        variance[slot] = new_variance;
        engine::for_each_index(n, rank, |idx| {
            let mut acc = 0.0;
            let mut src = idx.to_vec();
            for p in 0..n {
                src[slot] = p;
                acc += metric[idx[slot] * n + p] * self.components[engine::flat(n, &src)];
            }
            out[engine::flat(n, idx)] = acc;
        });
        TensorValue {
            point: self.point.clone(),
            variance,
            n,
            components: out,
        }
    }

    pub fn raise_index(&self, slot: usize, g_inv: &[f64]) -> TensorValue {
        assert_eq!(self.variance[slot], Variance::Covariant, "slot already raised");
        self.contract_slot(slot, g_inv, Variance::Contravariant)
    }

    pub fn lower_index(&self, slot: usize, g: &[f64]) -> TensorValue {
        assert_eq!(self.variance[slot], Variance::Contravariant, "slot already lowered");
        self.contract_slot(slot, g, Variance::Covariant)
    }
}

/// All curvature-derived tensors of one metric at one point.
#[derive(Debug, Clone, Serialize)]
pub struct CurvaturePack {
    pub point: Vec<f64>,
    pub n: usize,
    pub metric: Vec<f64>,
    pub metric_inv: Vec<f64>,
    pub christoffel: TensorValue,
    pub riemann: TensorValue,
    pub ricci: TensorValue,
    pub scalar: f64,
    pub schouten: TensorValue,
    pub weyl: TensorValue,
    pub cotton: TensorValue,
    pub bach: Option<TensorValue>,
    pub positive_definite: bool,
}

/// Chart metric: coordinate names, a symmetric expression matrix, a domain
/// box used for sampling, optional potential, and named parameter bindings.
#[derive(Debug, Clone)]
pub struct MetricField {
    coords: Vec<String>,
    components: Vec<Expr>,
    domain: Vec<[f64; 2]>,
    potential: Option<Expr>,
    params: BTreeMap<String, f64>,
}

impl MetricField {
    pub fn new(
        coords: Vec<String>,
        components: Vec<Vec<Expr>>,
        domain: Vec<[f64; 2]>,
        params: BTreeMap<String, f64>,
    ) -> Result<MetricField, GeometryError> {
        let n = coords.len();
        if n == 0 {
            return Err(GeometryError::BadDimension("empty coordinate list".into()));
        }
        if components.len() != n || components.iter().any(|row| row.len() != n) {
            return Err(GeometryError::BadDimension(format!(
                "metric component matrix must be {n}x{n}"
            )));
        }
        if domain.len() != n {
            return Err(GeometryError::BadDomain(format!(
                "domain box must have {n} intervals"
            )));
        }
        for (k, iv) in domain.iter().enumerate() {
            if iv[0].is_nan() || iv[1].is_nan() || iv[0] >= iv[1] {
                return Err(GeometryError::BadDomain(format!(
                    "domain interval {k} is empty: [{}, {}]",
                    iv[0], iv[1]
                )));
            }
        }
        let flat: Vec<Expr> = components.into_iter().flatten().collect();
        let m = MetricField {
            coords,
            components: flat,
            domain,
            potential: None,
            params,
        };
        m.check_symmetry()?;
        Ok(m)
    }

    /// Symmetry gate: entries must be structurally equal or evaluate
    /// identically at a handful of interior sample points.
    fn check_symmetry(&self) -> Result<(), GeometryError> {
        let n = self.dimension();
        let probes = crate::sample::halton_box(&self.domain, 5, 7, 0.1);
        for i in 0..n {
            for j in (i + 1)..n {
                let a = &self.components[i * n + j];
                let b = &self.components[j * n + i];
                if a == b {
                    continue;
                }
                for p in &probes {
                    let bind = self.bindings(p);
                    let va = crate::expr::eval_scalar(a, &bind)?;
                    let vb = crate::expr::eval_scalar(b, &bind)?;
                    let scale = va.abs().max(vb.abs()).max(1.0);
                    if (va - vb).abs() > 1e-12 * scale {
                        return Err(GeometryError::AsymmetricMetric { i, j });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_potential(mut self, f: Expr) -> MetricField {
        self.potential = Some(f);
        self
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn domain(&self) -> &[[f64; 2]] {
        &self.domain
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn potential(&self) -> Option<&Expr> {
        self.potential.as_ref()
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[i * self.dimension() + j]
    }

    pub(crate) fn bindings<'a>(&'a self, point: &'a [f64]) -> Bindings<'a> {
        Bindings::new(&self.coords, point, &self.params)
    }

    pub(crate) fn evaluator(&self, point: &[f64], order: usize) -> Result<Evaluator, GeometryError> {
        Evaluator::new(self, point, order)
    }

    /// Metric and inverse metric values at a point.
    pub fn metric_values(&self, point: &[f64]) -> Result<(Vec<f64>, Vec<f64>), GeometryError> {
        let ev = self.evaluator(point, 0)?;
        Ok((ev.g.values(), ev.g_inv.values()))
    }

    /// Cholesky probe; positive definiteness is reported, not enforced.
    pub fn is_positive_definite(&self, point: &[f64]) -> Result<bool, GeometryError> {
        let (g, _) = self.metric_values(point)?;
        let n = self.dimension();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = g[i * n + j];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Ok(false);
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(true)
    }

    /// Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}),
    /// component order (k, i, j).
    pub fn christoffel(&self, point: &[f64]) -> Result<TensorValue, GeometryError> {
        let mut ev = self.evaluator(point, 1)?;
        let vals = ev.gamma().values();
        Ok(TensorValue::new(
            point,
            vec![Variance::Contravariant, Variance::Covariant, Variance::Covariant],
            self.dimension(),
            vals,
        ))
    }

    /// Fully covariant Riemann tensor R_{ijkl}.
    pub fn riemann(&self, point: &[f64]) -> Result<TensorValue, GeometryError> {
        let mut ev = self.evaluator(point, 2)?;
        let vals = ev.riemann().values();
        Ok(TensorValue::new(
            point,
            vec![Variance::Covariant; 4],
            self.dimension(),
            vals,
        ))
    }

    /// Ricci tensor and scalar curvature.
    pub fn ricci_scalar(&self, point: &[f64]) -> Result<(TensorValue, f64), GeometryError> {
        let mut ev = self.evaluator(point, 2)?;
        let ric = ev.ricci().values();
        let r = ev.scalar().value();
        Ok((
            TensorValue::new(point, vec![Variance::Covariant; 2], self.dimension(), ric),
            r,
        ))
    }

    /// Schouten tensor S = Ric − R g / (2(n−1)).
    pub fn schouten(&self, point: &[f64]) -> Result<TensorValue, GeometryError> {
        if self.dimension() < 3 {
            return Err(GeometryError::BadDimension(
                "the Schouten tensor needs dimension >= 3".into(),
            ));
        }
        let mut ev = self.evaluator(point, 2)?;
        let vals = ev.schouten().values();
        Ok(TensorValue::new(
            point,
            vec![Variance::Covariant; 2],
            self.dimension(),
            vals,
        ))
    }

    /// Coordinate partial ∂_axis of the Schouten component field, the radial
    /// derivative block used by the warped-product cross-checks.
    pub fn schouten_partial(&self, point: &[f64], axis: usize) -> Result<TensorValue, GeometryError> {
        let n = self.dimension();
        if axis >= n {
            return Err(GeometryError::BadDimension(format!(
                "axis {axis} out of range for dimension {n}"
            )));
        }
        let mut ev = self.evaluator(point, 3)?;
        let s = ev.schouten().clone();
        let mut vals = Vec::with_capacity(n * n);
        for_each_index(n, 2, |idx| {
            vals.push(s.get(idx).derivative(axis).value());
        });
        Ok(TensorValue::new(
            point,
            vec![Variance::Covariant; 2],
            n,
            vals,
        ))
    }

    /// Weyl tensor.
    pub fn weyl(&self, point: &[f64]) -> Result<TensorValue, GeometryError> {
        let mut ev = self.evaluator(point, 2)?;
        let vals = ev.weyl()?.values();
        Ok(TensorValue::new(
            point,
            vec![Variance::Covariant; 4],
            self.dimension(),
            vals,
        ))
    }

    /// Cotton tensor C_{ijk} = ∇_i S_{jk} − ∇_j S_{ik}.
    pub fn cotton(&self, point: &[f64]) -> Result<TensorValue, GeometryError> {
        let mut ev = self.evaluator(point, 3)?;
        let vals = ev.cotton().values();
        Ok(TensorValue::new(
            point,
            vec![Variance::Covariant; 3],
            self.dimension(),
            vals,
        ))
    }

    /// Bach tensor: ∇_k C_{kij} in dimension 3, the Weyl-based form for n ≥ 4.
    pub fn bach(&self, point: &[f64]) -> Result<TensorValue, GeometryError> {
        let mut ev = self.evaluator(point, 4)?;
        let vals = ev.bach()?.values();
        Ok(TensorValue::new(
            point,
            vec![Variance::Covariant; 2],
            self.dimension(),
            vals,
        ))
    }

    /// Both n ≥ 4 Bach routes (Weyl route, Cotton route) for agreement checks.
    pub fn bach_both_routes(&self, point: &[f64]) -> Result<(TensorValue, TensorValue), GeometryError> {
        let mut ev = self.evaluator(point, 4)?;
        let (w, c) = ev.bach_routes()?;
        let n = self.dimension();
        Ok((
            TensorValue::new(point, vec![Variance::Covariant; 2], n, w.values()),
            TensorValue::new(point, vec![Variance::Covariant; 2], n, c.values()),
        ))
    }

    /// Everything at once, at a caller-chosen jet order (≥ 4 includes Bach).
    pub fn curvature_pack(&self, point: &[f64], order: usize) -> Result<CurvaturePack, GeometryError> {
        if order < 3 {
            return Err(GeometryError::BadDimension(
                "curvature pack needs jet order >= 3".into(),
            ));
        }
        let n = self.dimension();
        let mut ev = self.evaluator(point, order)?;
        let metric = ev.g.values();
        let metric_inv = ev.g_inv.values();
        let christoffel = TensorValue::new(
            point,
            vec![Variance::Contravariant, Variance::Covariant, Variance::Covariant],
            n,
            ev.gamma().values(),
        );
        let riemann = TensorValue::new(point, vec![Variance::Covariant; 4], n, ev.riemann().values());
        let ricci = TensorValue::new(point, vec![Variance::Covariant; 2], n, ev.ricci().values());
        let scalar = ev.scalar().value();
        let schouten = TensorValue::new(point, vec![Variance::Covariant; 2], n, ev.schouten().values());
        let weyl = TensorValue::new(point, vec![Variance::Covariant; 4], n, ev.weyl()?.values());
        let cotton = TensorValue::new(point, vec![Variance::Covariant; 3], n, ev.cotton().values());
        let bach = if order >= 4 {
            Some(TensorValue::new(
                point,
                vec![Variance::Covariant; 2],
                n,
                ev.bach()?.values(),
            ))
        } else {
            None
        };
        let positive_definite = self.is_positive_definite(point)?;
        Ok(CurvaturePack {
            point: point.to_vec(),
            n,
            metric,
            metric_inv,
            christoffel,
            riemann,
            ricci,
            scalar,
            schouten,
            weyl,
            cotton,
            bach,
            positive_definite,
        })
    }

    /// Hessian of a scalar field, (∇∇f)_{ij} = ∂_i∂_j f − Γ^k_{ij} ∂_k f.
    pub fn hessian(&self, f: &Expr, point: &[f64]) -> Result<TensorValue, GeometryError> {
        let n = self.dimension();
        let mut ev = self.evaluator(point, 2)?;
        let fj = eval_jet(f, &self.bindings(point), 2)?;
        let gamma = ev.gamma();
        let mut vals = Vec::with_capacity(n * n);
        for_each_index(n, 2, |idx| {
            let (i, j) = (idx[0], idx[1]);
            let mut v = fj.derivative(i).derivative(j).value();
            for k in 0..n {
                v -= gamma.get(&[k, i, j]).value() * fj.derivative(k).value();
            }
            vals.push(v);
        });
        Ok(TensorValue::new(
            point,
            vec![Variance::Covariant; 2],
            n,
            vals,
        ))
    }

    /// Laplacian Δf = g^{ij} (∇∇f)_{ij}.
    pub fn laplacian(&self, f: &Expr, point: &[f64]) -> Result<f64, GeometryError> {
        let hess = self.hessian(f, point)?;
        let (_, g_inv) = self.metric_values(point)?;
        let n = self.dimension();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += g_inv[i * n + j] * hess.get(&[i, j]);
            }
        }
        Ok(acc)
    }

    /// g(∇f, ∇h) = g^{ij} ∂_i f ∂_j h.
    pub fn grad_inner(&self, f: &Expr, h: &Expr, point: &[f64]) -> Result<f64, GeometryError> {
        let n = self.dimension();
        let bind = self.bindings(point);
        let fj = eval_jet(f, &bind, 1)?;
        let hj = eval_jet(h, &bind, 1)?;
        let (_, g_inv) = self.metric_values(point)?;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += g_inv[i * n + j] * fj.derivative(i).value() * hj.derivative(j).value();
            }
        }
        Ok(acc)
    }
}
