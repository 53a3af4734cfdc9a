//! Gauss–Legendre rules, the Gauss rule for the weight `-ln w` on `[0, 1]`,
//! and the panel rules built from them for log-singular integrands.
//!
//! Nodes and weights are always generated in `f64` and converted, so an `f32`
//! build shares the same rules.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    /// Exact for polynomials of degree `2n - 1`.
    GaussLegendre(usize),
    /// Integrates `f(s) ln|s - t| + g(s)` exactly when `f`, `g` are polynomials
    /// of degree `< order` on each side of the target.
    SingularLogSplit(usize),
    /// Gauss rule for `int_0^1 f(w) (-ln w) dw`, exact to degree `2n - 1`.
    LogWeight(usize),
}

/// Nodes and weights of a quadrature rule.
#[derive(Clone, Debug)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub kind: RuleKind,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<V>(&self, mut f: impl FnMut(T) -> V) -> V
    where
        V: std::ops::Add<Output = V> + std::ops::Mul<T, Output = V> + num_traits::Zero,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(V::zero(), |acc, (&x, &w)| acc + f(x) * w)
    }

    fn convert(nodes: &[f64], weights: &[f64], kind: RuleKind) -> Self {
        Self {
            nodes: nodes.iter().map(|&x| T::lit(x)).collect(),
            weights: weights.iter().map(|&w| T::lit(w)).collect(),
            kind,
        }
    }
}

type RuleCache = Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>;

fn cached(cache: &'static OnceLock<RuleCache>, n: usize, build: fn(usize) -> (Vec<f64>, Vec<f64>)) -> Arc<(Vec<f64>, Vec<f64>)> {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().expect("rule cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(build(n))).clone()
}

/// Legendre `P_n(x)` and `P'_n(x)`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn build_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule with `n` points on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> QuadratureRule<T> {
    assert!(n >= 1, "Gauss rule needs at least one node");
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let r = cached(&CACHE, n, build_gauss_legendre);
    QuadratureRule::convert(&r.0, &r.1, RuleKind::GaussLegendre(n))
}

/// Recurrence coefficients of the monic orthogonal polynomials for `-ln w` on
/// `[0, 1]`, by the modified Chebyshev algorithm on shifted Legendre moments.
fn log_weight_recurrence(n: usize) -> (Vec<f64>, Vec<f64>) {
    let len = 2 * n;
    // monic shifted Legendre: a_k = 1/2, b_k = k^2 / (4 (4k^2 - 1))
    let a = vec![0.5; len];
    let b: Vec<f64> = (0..len)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                1.0
            } else {
                k * k / (4.0 * (4.0 * k * k - 1.0))
            }
        })
        .collect();
    // modified moments int_0^1 -ln(w) p_l(w) dw, p_l monic shifted Legendre
    let mut moments = vec![0.0; len];
    moments[0] = 1.0;
    let mut inv_lead = 1.0; // (l!)^2 / (2l)!
    for (l, m) in moments.iter_mut().enumerate().skip(1) {
        let lf = l as f64;
        inv_lead *= lf * lf / ((2.0 * lf - 1.0) * 2.0 * lf);
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        *m = sign / (lf * (lf + 1.0)) * inv_lead;
    }

    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut sigma_prev = vec![0.0; len + 1];
    let mut sigma = moments.clone();
    sigma.push(0.0);
    alpha[0] = a[0] + moments[1] / moments[0];
    beta[0] = moments[0];
    for k in 1..n {
        let mut next = vec![0.0; len + 1];
        for l in k..(len - k) {
            next[l] = sigma[l + 1] - (alpha[k - 1] - a[l]) * sigma[l] - beta[k - 1] * sigma_prev[l]
                + b[l] * if l >= 1 { sigma[l - 1] } else { 0.0 };
        }
        alpha[k] = a[k] + next[k + 1] / next[k] - sigma[k] / sigma[k - 1];
        beta[k] = next[k] / sigma[k - 1];
        sigma_prev = sigma;
        sigma = next;
    }
    (alpha, beta)
}

fn build_log_weight(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (alpha, beta) = log_weight_recurrence(n);
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = alpha[i];
        if i + 1 < n {
            let off = beta[i + 1].sqrt();
            jacobi[(i, i + 1)] = off;
            jacobi[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], beta[0] * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

/// Gauss rule for `int_0^1 f(w) (-ln w) dw` with `n` points.
pub fn log_weight_gauss<T: Real>(n: usize) -> QuadratureRule<T> {
    assert!(n >= 1, "Gauss rule needs at least one node");
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let r = cached(&CACHE, n, build_log_weight);
    QuadratureRule::convert(&r.0, &r.1, RuleKind::LogWeight(n))
}

/// A rule on `[lo, hi]` for `int f(s) ln|s - t| ds` plus a plain rule for the
/// smooth remainder.
#[derive(Clone, Debug)]
pub struct SingularPanelRule<T> {
    /// `sum w_i f(s_i) ~ int_lo^hi f(s) ln|s - t| ds`. When `t` lies outside
    /// `[lo, hi]` some nodes lie between `t` and the panel, so `f` must extend
    /// smoothly there.
    pub log: QuadratureRule<T>,
    /// Gauss rule for smooth integrands, split at `t` when `t` is inside.
    pub smooth: QuadratureRule<T>,
}

/// Rule for `int_0^len f(t + dir u) ln u du`: pairs `(s, w)`.
fn log_from_target<T: Real>(
    target: T,
    len: T,
    dir: T,
    order: usize,
    out_nodes: &mut Vec<T>,
    out_weights: &mut Vec<T>,
    sign: T,
) {
    if len <= T::zero() {
        return;
    }
    let gl = gauss_legendre::<T>(order);
    let lg = log_weight_gauss::<T>(order);
    let half = T::lit(0.5);
    let ln_len = len.ln();
    // len ln(len) int_0^1 f(len w) dw
    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
        let u = half * (*x + T::one()) * len;
        out_nodes.push(target + dir * u);
        out_weights.push(sign * half * *w * len * ln_len);
    }
    // - len int_0^1 f(len w) (-ln w) dw
    for (x, w) in lg.nodes.iter().zip(&lg.weights) {
        out_nodes.push(target + dir * *x * len);
        out_weights.push(-sign * *w * len);
    }
}

/// Gauss rule on `[lo, hi]`, optionally split at an interior point.
pub fn gauss_on<T: Real>(lo: T, hi: T, split: Option<T>, order: usize) -> QuadratureRule<T> {
    let gl = gauss_legendre::<T>(order);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let half = T::lit(0.5);
    let mut push = |a: T, b: T| {
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            nodes.push(half * (a + b) + half * (b - a) * *x);
            weights.push(half * (b - a) * *w);
        }
    };
    match split {
        Some(t) if t > lo && t < hi => {
            push(lo, t);
            push(t, hi);
        }
        _ => push(lo, hi),
    }
    QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::GaussLegendre(order),
    }
}

/// Rule for log-singular integrals on the panel `[lo, hi]` with the singular
/// point `target` inside or next to it.
pub fn singular_panel_rule<T: Real>(lo: T, hi: T, target: T, order: usize) -> SingularPanelRule<T> {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let one = T::one();
    if target >= lo && target <= hi {
        log_from_target(target, target - lo, -one, order, &mut nodes, &mut weights, one);
        log_from_target(target, hi - target, one, order, &mut nodes, &mut weights, one);
    } else if target < lo {
        log_from_target(target, hi - target, one, order, &mut nodes, &mut weights, one);
        log_from_target(target, lo - target, one, order, &mut nodes, &mut weights, -one);
    } else {
        log_from_target(target, target - lo, -one, order, &mut nodes, &mut weights, one);
        log_from_target(target, target - hi, -one, order, &mut nodes, &mut weights, -one);
    }
    SingularPanelRule {
        log: QuadratureRule {
            nodes,
            weights,
            kind: RuleKind::SingularLogSplit(order),
        },
        smooth: gauss_on(lo, hi, Some(target), order),
    }
}
