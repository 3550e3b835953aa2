//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] carries the value of a scalar field together with all of its
//! partial derivatives up to a fixed total degree `K`, stored as Taylor
//! coefficients `∂^α f / α!` indexed by multi-index `α` with `|α| ≤ K`.
//! Arithmetic on jets is exact truncated power-series arithmetic, so a jet
//! built from an analytic expression carries derivatives that are exact up
//! to floating-point rounding — there is no truncation error of the kind
//! finite differences introduce.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use super::{ExprError, Func};

/// Shared layout data for all jets of a given `(dimension, order)` pair:
/// the graded multi-index enumeration, the truncated-product pairing table,
/// and per-axis differentiation tables. Built once and cached globally.
#[derive(Debug)]
pub struct JetSpace {
    dim: usize,
    order: usize,
    /// All multi-indices with |α| ≤ order, sorted by (|α|, lexicographic).
    /// The first `count_up_to(q)` entries are exactly the order-q layout,
    /// which makes truncation a prefix copy.
    indices: Vec<Vec<u8>>,
    rank: HashMap<Vec<u8>, usize>,
    /// (i, j, k) triples with indices[i] + indices[j] = indices[k].
    products: Vec<(u32, u32, u32)>,
    /// derivs[axis][out] = (src, factor): ∂_axis maps coefficient `src`
    /// of an order-K jet to `factor * c[src]` at position `out` of the
    /// order-(K-1) layout.
    derivs: Vec<Vec<(u32, f64)>>,
}

fn space_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<JetSpace>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl JetSpace {
    pub fn get(dim: usize, order: usize) -> Arc<JetSpace> {
        let mut cache = space_cache().lock().expect("jet space cache poisoned");
        cache
            .entry((dim, order))
            .or_insert_with(|| Arc::new(JetSpace::build(dim, order)))
            .clone()
    }

    fn build(dim: usize, order: usize) -> JetSpace {
        let mut indices = Vec::new();
        let mut current = vec![0u8; dim];
        enumerate(&mut indices, &mut current, 0, order);
        indices.sort_by(|a, b| {
            let (sa, sb) = (degree(a), degree(b));
            sa.cmp(&sb).then_with(|| a.cmp(b))
        });

        let rank: HashMap<Vec<u8>, usize> = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();

        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if degree(a) + degree(b) <= order {
                    let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    products.push((i as u32, j as u32, rank[&sum] as u32));
                }
            }
        }

        let out_len = if order == 0 {
            0
        } else {
            indices.iter().filter(|a| degree(a) < order).count()
        };
        let mut derivs = Vec::with_capacity(dim);
        for axis in 0..dim {
            let mut table = Vec::with_capacity(out_len);
            for beta in indices.iter().take(out_len) {
                let mut src = beta.clone();
                src[axis] += 1;
                table.push((rank[&src] as u32, f64::from(beta[axis]) + 1.0));
            }
            derivs.push(table);
        }

        JetSpace {
            dim,
            order,
            indices,
            rank,
            products,
            derivs,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored coefficients, `binomial(dim + order, order)`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.rank.get(alpha).copied()
    }

    pub fn multi_indices(&self) -> &[Vec<u8>] {
        &self.indices
    }
}

fn enumerate(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, pos: usize, budget: usize) {
    if pos == current.len() {
        out.push(current.clone());
        return;
    }
    for v in 0..=budget {
        current[pos] = v as u8;
        enumerate(out, current, pos + 1, budget - v);
    }
    current[pos] = 0;
}

fn degree(alpha: &[u8]) -> usize {
    alpha.iter().map(|&v| v as usize).sum()
}

fn factorial(alpha: &[u8]) -> f64 {
    let mut f = 1.0;
    for &a in alpha {
        for k in 2..=a {
            f *= f64::from(k);
        }
    }
    f
}

/// Truncated Taylor expansion of a scalar field at a base point.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(d={}, K={}, ", self.space.dim, self.space.order)?;
        let mut first = true;
        for (alpha, &v) in self.space.indices.iter().zip(&self.c) {
            if v != 0.0 {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "{v}·x^{alpha:?}")?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl Jet {
    pub fn constant(space: Arc<JetSpace>, value: f64) -> Jet {
        let mut c = vec![0.0; space.len()];
        c[0] = value;
        Jet { space, c }
    }

    /// Jet of the coordinate function `x_axis` at base value `value`:
    /// constant term `value`, first-order coefficient 1 on that axis.
    pub fn coordinate(space: Arc<JetSpace>, axis: usize, value: f64) -> Jet {
        assert!(axis < space.dim(), "coordinate axis out of range");
        let mut c = vec![0.0; space.len()];
        c[0] = value;
        if space.order() >= 1 {
            let mut e = vec![0u8; space.dim()];
            e[axis] = 1;
            let pos = space.index_of(&e).expect("unit multi-index present");
            c[pos] = 1.0;
        }
        Jet { space, c }
    }

    fn constant_like(&self, value: f64) -> Jet {
        Jet::constant(self.space.clone(), value)
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    /// The degree-0 coefficient: the plain value of the field at the base point.
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn coeff(&self, alpha: &[u8]) -> f64 {
        match self.space.index_of(alpha) {
            Some(i) => self.c[i],
            None => 0.0,
        }
    }

    /// Raw partial derivative `∂^α f` at the base point, i.e. `α! · coeff(α)`.
    pub fn partial(&self, alpha: &[u8]) -> Result<f64, ExprError> {
        if alpha.len() != self.space.dim {
            return Err(ExprError::ShapeMismatch(format!(
                "multi-index length {} does not match jet dimension {}",
                alpha.len(),
                self.space.dim
            )));
        }
        if degree(alpha) > self.space.order {
            return Err(ExprError::OrderOverflow {
                requested: degree(alpha),
                order: self.space.order,
            });
        }
        Ok(factorial(alpha) * self.coeff(alpha))
    }

    /// Restriction to total degree ≤ `q`.
    pub fn truncate(&self, q: usize) -> Jet {
        assert!(q <= self.space.order, "cannot truncate upward");
        if q == self.space.order {
            return self.clone();
        }
        let space = JetSpace::get(self.space.dim, q);
        let c = self.c[..space.len()].to_vec();
        Jet { space, c }
    }

    /// Coefficient-level partial derivative along one axis; drops the order by one.
    pub fn derivative(&self, axis: usize) -> Jet {
        assert!(self.space.order >= 1, "cannot differentiate an order-0 jet");
        assert!(axis < self.space.dim, "derivative axis out of range");
        let out_space = JetSpace::get(self.space.dim, self.space.order - 1);
        let table = &self.space.derivs[axis];
        let mut c = vec![0.0; out_space.len()];
        for (out, &(src, factor)) in table.iter().enumerate() {
            c[out] = factor * self.c[src as usize];
        }
        Jet { space: out_space, c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().map(|v| s * v).collect(),
        }
    }

    fn same_shape(&self, other: &Jet) -> bool {
        self.space.dim == other.space.dim && self.space.order == other.space.order
    }

    fn shape_err(&self, other: &Jet) -> ExprError {
        ExprError::ShapeMismatch(format!(
            "(d={}, K={}) vs (d={}, K={})",
            self.space.dim, self.space.order, other.space.dim, other.space.order
        ))
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet, ExprError> {
        if !self.same_shape(other) {
            return Err(self.shape_err(other));
        }
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet, ExprError> {
        if !self.same_shape(other) {
            return Err(self.shape_err(other));
        }
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Jet) -> Result<Jet, ExprError> {
        if !self.same_shape(other) {
            return Err(self.shape_err(other));
        }
        Ok(self * other)
    }

    pub fn checked_div(&self, other: &Jet) -> Result<Jet, ExprError> {
        if !self.same_shape(other) {
            return Err(self.shape_err(other));
        }
        Ok(self * &other.recip()?)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Jet, ExprError> {
        let a0 = self.value();
        if a0 == 0.0 {
            return Err(ExprError::ZeroDivisor);
        }
        let k = self.space.order;
        let mut t = Vec::with_capacity(k + 1);
        let mut tk = 1.0 / a0;
        t.push(tk);
        for _ in 1..=k {
            tk = -tk / a0;
            t.push(tk);
        }
        Ok(self.compose(&t))
    }

    /// Integer power by repeated multiplication; negative exponents invert.
    pub fn powi(&self, m: i64) -> Result<Jet, ExprError> {
        if m < 0 {
            return self.powi(-m)?.recip();
        }
        let mut acc = self.constant_like(1.0);
        let mut base = self.clone();
        let mut m = m as u64;
        while m > 0 {
            if m & 1 == 1 {
                acc = &acc * &base;
            }
            m >>= 1;
            if m > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Elementary function applied through the jet via univariate Taylor
    /// composition: with `u = self - value()`, evaluates `Σ t_j u^j` where
    /// `t_j = f^(j)(value())/j!`. Exact through the truncation order because
    /// `u` has zero constant term.
    pub fn apply(&self, f: Func) -> Result<Jet, ExprError> {
        let a0 = self.value();
        let k = self.space.order;
        match f {
            // tan and tanh through the quotient; avoids deep derivative tables
            Func::Tan => {
                let s = self.apply(Func::Sin)?;
                let c = self.apply(Func::Cos)?;
                if c.value() == 0.0 {
                    return Err(ExprError::Domain {
                        subtree: "tan".into(),
                        message: format!("tan undefined at {a0} (cos vanishes)"),
                    });
                }
                s.checked_div(&c)
            }
            Func::Tanh => {
                let s = self.apply(Func::Sinh)?;
                let c = self.apply(Func::Cosh)?;
                s.checked_div(&c)
            }
            _ => {
                let t = univariate_taylor(f, a0, k)?;
                Ok(self.compose(&t))
            }
        }
    }

    /// Horner evaluation of the univariate polynomial `Σ t_j u^j` at
    /// `u = self - value()`.
    fn compose(&self, t: &[f64]) -> Jet {
        let mut u = self.clone();
        u.c[0] = 0.0;
        let k = self.space.order;
        let mut acc = self.constant_like(t[k]);
        for j in (0..k).rev() {
            acc = &acc * &u;
            acc.c[0] += t[j];
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Copy with the constant term zeroed.
    pub fn zero_constant(&self) -> Jet {
        let mut j = self.clone();
        j.c[0] = 0.0;
        j
    }

    /// True when every derivative coefficient is exactly zero.
    pub fn is_constant(&self) -> bool {
        self.c[1..].iter().all(|&v| v == 0.0)
    }
}

fn univariate_taylor(f: Func, a0: f64, k: usize) -> Result<Vec<f64>, ExprError> {
    let mut t = Vec::with_capacity(k + 1);
    match f {
        Func::Exp => {
            let mut v = a0.exp();
            t.push(v);
            for j in 1..=k {
                v /= j as f64;
                t.push(v);
            }
        }
        Func::Log => {
            if a0 <= 0.0 {
                return Err(domain(f, a0, "requires a positive argument"));
            }
            t.push(a0.ln());
            if k >= 1 {
                let mut v = 1.0 / a0;
                t.push(v);
                for j in 2..=k {
                    v *= -((j - 1) as f64) / (j as f64 * a0);
                    t.push(v);
                }
            }
        }
        Func::Sqrt => {
            if a0 <= 0.0 {
                return Err(domain(f, a0, "requires a positive argument"));
            }
            let mut v = a0.sqrt();
            t.push(v);
            for j in 1..=k {
                v *= (1.5 - j as f64) / (j as f64 * a0);
                t.push(v);
            }
        }
        Func::Sin | Func::Cos => {
            let (s, c) = a0.sin_cos();
            let cycle = if matches!(f, Func::Sin) {
                [s, c, -s, -c]
            } else {
                [c, -s, -c, s]
            };
            let mut fact = 1.0;
            for j in 0..=k {
                if j > 0 {
                    fact *= j as f64;
                }
                t.push(cycle[j % 4] / fact);
            }
        }
        Func::Sinh | Func::Cosh => {
            let (s, c) = (a0.sinh(), a0.cosh());
            let cycle = if matches!(f, Func::Sinh) { [s, c] } else { [c, s] };
            let mut fact = 1.0;
            for j in 0..=k {
                if j > 0 {
                    fact *= j as f64;
                }
                t.push(cycle[j % 2] / fact);
            }
        }
        Func::Tan | Func::Tanh => unreachable!("handled via quotient"),
    }
    Ok(t)
}

fn domain(f: Func, a0: f64, message: &str) -> ExprError {
    ExprError::Domain {
        subtree: f.name().to_string(),
        message: format!("{f_name}({a0}): {message}", f_name = f.name()),
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        assert!(self.same_shape(rhs), "jet shape mismatch in add");
        Jet {
            space: self.space.clone(),
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        assert!(self.same_shape(rhs), "jet shape mismatch in sub");
        Jet {
            space: self.space.clone(),
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert!(self.same_shape(rhs), "jet shape mismatch in mul");
        let mut c = vec![0.0; self.space.len()];
        for &(i, j, k) in &self.space.products {
            c[k as usize] += self.c[i as usize] * rhs.c[j as usize];
        }
        Jet {
            space: self.space.clone(),
            c,
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
