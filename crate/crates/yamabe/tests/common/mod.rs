//! Shared test oracles: Fornberg finite-difference weights, arbitrary-order
//! partial derivatives of scalar callables, and a generator of random
//! analytic expressions with safe domains. Everything here differentiates
//! by sampling plain function values, so it stays independent of the jet
//! arithmetic it is used to check.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use yamabe::{Expr, Func};

/// Fornberg weights for the m-th derivative at 0 from the given nodes.
pub fn fornberg_weights(nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(m < n);
    // c[node][order]
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    (0..n).map(|j| c[j][m]).collect()
}

/// m-th derivative along one axis by a 9-point central stencil.
fn fd_axis(
    f: &mut dyn FnMut(&[f64]) -> f64,
    base: &[f64],
    axis: usize,
    m: usize,
    h: f64,
) -> f64 {
    let offsets: Vec<f64> = (-4..=4).map(|k| k as f64).collect();
    let w = fornberg_weights(&offsets, m);
    let mut acc = 0.0;
    let mut q = base.to_vec();
    for (k, off) in offsets.iter().enumerate() {
        q[axis] = base[axis] + off * h;
        acc += w[k] * f(&q);
    }
    q[axis] = base[axis];
    acc / h.powi(m as i32)
}

/// Mixed partial ∂^α f at `base` by nested central stencils.
pub fn fd_partial(f: &mut dyn FnMut(&[f64]) -> f64, base: &[f64], alpha: &[usize], h: f64) -> f64 {
    // peel one axis at a time, differentiating the remaining-FD closure
    match alpha.iter().rposition(|&a| a > 0) {
        None => f(base),
        Some(axis) => {
            let m = alpha[axis];
            let mut rest = alpha.to_vec();
            rest[axis] = 0;
            if rest.iter().all(|&a| a == 0) {
                fd_axis(f, base, axis, m, h)
            } else {
                let mut inner = |q: &[f64]| fd_partial(f, q, &rest, h);
                fd_axis(&mut inner, base, axis, m, h)
            }
        }
    }
}

/// Partial derivative with an adaptive step: scan a few step sizes and
/// return the estimate from the best-agreeing consecutive pair, which picks
/// the regime where truncation has converged but roundoff has not yet taken
/// over (high-order stencils lose to cancellation at small h).
pub fn fd_partial_adaptive(
    f: &mut dyn FnMut(&[f64]) -> f64,
    base: &[f64],
    alpha: &[usize],
) -> f64 {
    let steps = [0.16, 0.08, 0.04, 0.02];
    let mut prev = fd_partial(f, base, alpha, steps[0]);
    let mut best_gap = f64::INFINITY;
    let mut best = prev;
    for &h in &steps[1..] {
        let next = fd_partial(f, base, alpha, h);
        let scale = prev.abs().max(next.abs()).max(1.0);
        let gap = (next - prev).abs() / scale;
        if gap < best_gap {
            best_gap = gap;
            best = next;
        }
        prev = next;
    }
    best
}

/// Random analytic expression over the given coordinates, built from
/// domain-safe combinators (log and sqrt only see arguments bounded away
/// from zero, denominators are bounded away from zero).
pub fn random_expr(rng: &mut ChaCha8Rng, coords: &[&str], depth: usize) -> Expr {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Expr::sym(coords[rng.gen_range(0..coords.len())]),
            1 => Expr::num((rng.gen_range(1..20) as f64) / 10.0),
            _ => Expr::sym(coords[rng.gen_range(0..coords.len())]),
        };
    }
    let a = random_expr(rng, coords, depth - 1);
    let b = random_expr(rng, coords, depth - 1);
    let quarter = |e: Expr| Expr::Div(Box::new(e), Box::new(Expr::num(4.0)));
    match rng.gen_range(0..10) {
        0 => Expr::Add(Box::new(a), Box::new(b)),
        1 => Expr::Sub(Box::new(a), Box::new(b)),
        2 => Expr::Mul(Box::new(a), Box::new(b)),
        // safe division: denominator 2 + b²/4 >= 2
        3 => Expr::Div(
            Box::new(a),
            Box::new(Expr::Add(
                Box::new(Expr::num(2.0)),
                Box::new(quarter(Expr::Pow(Box::new(b), Box::new(Expr::num(2.0))))),
            )),
        ),
        4 => Expr::Call(Func::Sin, Box::new(a)),
        5 => Expr::Call(Func::Cos, Box::new(a)),
        // tamed exponentials keep high-order derivatives bounded
        6 => Expr::Call(Func::Exp, Box::new(quarter(a))),
        7 => Expr::Call(Func::Tanh, Box::new(a)),
        // log of 2 + sin(a)/2 stays inside (log 1.5, log 2.5)
        8 => Expr::Call(
            Func::Log,
            Box::new(Expr::Add(
                Box::new(Expr::num(2.0)),
                Box::new(Expr::Div(
                    Box::new(Expr::Call(Func::Sin, Box::new(a))),
                    Box::new(Expr::num(2.0)),
                )),
            )),
        ),
        // sqrt of 1.5 + cos(a)/2 stays inside [1, 2]
        _ => Expr::Call(
            Func::Sqrt,
            Box::new(Expr::Add(
                Box::new(Expr::num(1.5)),
                Box::new(Expr::Div(
                    Box::new(Expr::Call(Func::Cos, Box::new(a))),
                    Box::new(Expr::num(2.0)),
                )),
            )),
        ),
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every multi-index over `dim` axes with 1 <= |alpha| <= max_total.
pub fn multi_indices_up_to(dim: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; dim];
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, pos: usize, budget: usize) {
        if pos == cur.len() {
            if cur.iter().sum::<usize>() > 0 {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=budget {
            cur[pos] = v;
            rec(out, cur, pos + 1, budget - v);
        }
        cur[pos] = 0;
    }
    rec(&mut out, &mut cur, 0, max_total);
    out
}
