use serde::{Deserialize, Serialize};

use crate::error::{BiquadError, Result};

/// Parameters of the Riemannian LBFGS solver and its multi-start driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Armijo constant, in (0, 2).
    pub eta: f64,
    /// Backtracking ratio, in (0, 1).
    pub beta: f64,
    pub k_max: usize,
    /// Relative step tolerance.
    pub eps1: f64,
    /// Gradient-norm tolerance.
    pub eps2: f64,
    /// Relative objective-change tolerance.
    pub eps3: f64,
    /// Lower safeguard constant for the LBFGS direction, at most 1.
    pub c_lower: f64,
    /// Upper safeguard constant for the LBFGS direction, at least 1.
    pub c_upper: f64,
    /// Number of curvature pairs kept by the two-loop recursion.
    pub memory: usize,
    pub seed: u64,
    pub n_starts: usize,
    /// Run independent starts on the rayon pool (ignored without the
    /// `parallel` feature).
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eta: 1e-3,
            beta: 0.5,
            k_max: 1000,
            eps1: 1e-6,
            eps2: 1e-6,
            eps3: 1e-16,
            c_lower: 1e-16,
            c_upper: 1e16,
            memory: 5,
            seed: 0,
            n_starts: 20,
            parallel: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BiquadError::InvalidConfig(msg));
        if !(self.eta > 0.0 && self.eta < 2.0) {
            return bad(format!("eta must lie in (0, 2), got {}", self.eta));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if self.k_max == 0 {
            return bad("k_max must be positive".into());
        }
        for (name, v) in [("eps1", self.eps1), ("eps2", self.eps2), ("eps3", self.eps3)] {
            if !(v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.c_lower > 0.0 && self.c_lower <= 1.0) {
            return bad(format!("c_lower must lie in (0, 1], got {}", self.c_lower));
        }
        if !(self.c_upper >= 1.0) {
            return bad(format!("c_upper must be at least 1, got {}", self.c_upper));
        }
        if self.memory == 0 {
            return bad("memory must be positive".into());
        }
        if self.n_starts == 0 {
            return bad("n_starts must be positive".into());
        }
        if self.eta >= 1.0 {
            log::warn!("eta = {} >= 1 demands more decrease than the linear model predicts", self.eta);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!((c.eta, c.k_max, c.eps3, c.c_upper), (1e-3, 1000, 1e-16, 1e16));
    }

    #[test]
    fn rejects_out_of_range_values() {
        let base = SolverConfig::default();
        let cases = [
            SolverConfig { eta: 2.0, ..base.clone() },
            SolverConfig { beta: 1.0, ..base.clone() },
            SolverConfig { k_max: 0, ..base.clone() },
            SolverConfig { eps2: 0.0, ..base.clone() },
            SolverConfig { c_lower: 1.5, ..base.clone() },
            SolverConfig { c_upper: 0.5, ..base.clone() },
            SolverConfig { memory: 0, ..base.clone() },
            SolverConfig { n_starts: 0, ..base.clone() },
        ];
        for c in cases {
            assert!(matches!(c.validate(), Err(BiquadError::InvalidConfig(_))), "{c:?}");
        }
        SolverConfig { eta: 1.5, ..base }.validate().unwrap();
    }
}
