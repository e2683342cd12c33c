//! Limited-memory inverse-Hessian model and the safeguarded search direction.

use std::collections::VecDeque;

use serde::Serialize;

use crate::numeric::{axpy, dot, norm};

use super::SolverConfig;

/// Where a search direction came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionSource {
    Lbfgs,
    GradientFallback,
}

impl DirectionSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            DirectionSource::Lbfgs => "lbfgs",
            DirectionSource::GradientFallback => "gradient-fallback",
        }
    }
}

#[derive(Debug, Clone)]
struct CurvaturePair {
    s: Vec<f64>,
    v: Vec<f64>,
    rho: f64,
}

/// Bounded history of curvature pairs `(s, v) = (z+ - z, g+ - g)`.
#[derive(Debug, Clone)]
pub struct LbfgsHistory {
    pairs: VecDeque<CurvaturePair>,
    capacity: usize,
}

impl LbfgsHistory {
    pub fn new(capacity: usize) -> Self {
        Self {
            pairs: VecDeque::with_capacity(capacity),
            capacity: capacity.max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
    }

    /// Stores the pair unless its curvature `s.v` is not safely positive.
    /// Returns whether the pair was kept.
    pub fn push(&mut self, s: Vec<f64>, v: Vec<f64>) -> bool {
        let sv = dot(&s, &v);
        if !(sv > 1e-12 * norm(&s) * norm(&v)) {
            return false;
        }
        if self.pairs.len() == self.capacity {
            self.pairs.pop_front();
        }
        self.pairs.push_back(CurvaturePair { rho: 1.0 / sv, s, v });
        true
    }

    /// Two-loop recursion: returns `H g` for the implicit inverse-Hessian
    /// model with initial scaling `(s.v)/(v.v)` from the newest pair.
    pub fn apply_inverse_hessian(&self, g: &[f64]) -> Vec<f64> {
        let mut q = g.to_vec();
        let mut alphas = Vec::with_capacity(self.pairs.len());
        for pair in self.pairs.iter().rev() {
            let a = pair.rho * dot(&pair.s, &q);
            axpy(-a, &pair.v, &mut q);
            alphas.push(a);
        }
        let gamma = self
            .pairs
            .back()
            .map(|p| 1.0 / (p.rho * dot(&p.v, &p.v)))
            .unwrap_or(1.0);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for (pair, a) in self.pairs.iter().zip(alphas.iter().rev()) {
            let b = pair.rho * dot(&pair.v, &q);
            axpy(a - b, &pair.s, &mut q);
        }
        q
    }
}

/// Search direction `-H g`, replaced by `-g` whenever either block
/// (split at `split`) violates
/// `p_b . g_b <= -c_lower |g_b|^2` or `|p_b| <= c_upper |g_b|`.
pub fn lbfgs_direction(
    history: &LbfgsHistory,
    grad: &[f64],
    split: usize,
    config: &SolverConfig,
) -> (Vec<f64>, DirectionSource) {
    let mut p = history.apply_inverse_hessian(grad);
    for v in p.iter_mut() {
        *v = -*v;
    }
    let block_ok = |pb: &[f64], gb: &[f64]| {
        let gg = dot(gb, gb);
        dot(pb, gb) <= -config.c_lower * gg && norm(pb) <= config.c_upper * gg.sqrt()
    };
    let ok = p.iter().all(|v| v.is_finite())
        && block_ok(&p[..split], &grad[..split])
        && block_ok(&p[split..], &grad[split..]);
    if ok {
        (p, DirectionSource::Lbfgs)
    } else {
        (grad.iter().map(|g| -g).collect(), DirectionSource::GradientFallback)
    }
}
