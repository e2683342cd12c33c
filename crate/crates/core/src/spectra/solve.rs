//! Single-start Riemannian LBFGS iteration.

use serde::Serialize;

use crate::error::{BiquadError, Result};
use crate::numeric::{dot, norm};
use crate::tensor::BiquadraticTensor;

use super::lbfgs::{lbfgs_direction, DirectionSource, LbfgsHistory};
use super::line_search::armijo;
use super::{evaluate, normalize_pair, MEigenpair, SolverConfig};

/// State at iterate `k`. `alpha` and `source` describe the step taken from
/// it and are absent on the final record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub k: usize,
    pub f: f64,
    pub grad_norm: f64,
    /// `max(| |x| - 1 |, | |y| - 1 |)` at this iterate.
    pub norm_drift: f64,
    pub alpha: Option<f64>,
    pub source: Option<DirectionSource>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolverTrace {
    pub records: Vec<TraceRecord>,
    pub converged: bool,
    pub iterations: usize,
    /// Why the iteration ended early, if it did.
    pub stop_reason: Option<String>,
}

impl SolverTrace {
    pub fn final_f(&self) -> f64 {
        self.records.last().map(|r| r.f).unwrap_or(f64::NAN)
    }

    /// True when `f` never increases along the trace.
    pub fn is_monotone(&self) -> bool {
        self.records.windows(2).all(|w| w[1].f <= w[0].f)
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.records.iter().map(|r| r.norm_drift).fold(0.0, f64::max)
    }

    pub fn fallback_count(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.source == Some(DirectionSource::GradientFallback))
            .count()
    }
}

fn drift(x: &[f64], y: &[f64]) -> f64 {
    (norm(x) - 1.0).abs().max((norm(y) - 1.0).abs())
}

/// Minimizes `f(x, y)` over the product of unit spheres from `(x0, y0)`.
///
/// Stops when `|dz|/|z| <= eps1`, `|g| <= eps2` and
/// `|df|/(|f|+1) <= eps3` all hold after a step. Hitting `k_max` leaves the
/// run unconverged. A line search that cannot make progress also ends the
/// run, which then counts as converged only if `|g| <= eps2`.
pub fn solve(
    a: &BiquadraticTensor,
    x0: &[f64],
    y0: &[f64],
    config: &SolverConfig,
) -> Result<(MEigenpair, SolverTrace)> {
    config.validate()?;
    let (mut x, mut y) = normalize_pair(a, x0, y0)?;
    let m = a.m();
    let mut cur = evaluate(a, &x, &y);
    let mut history = LbfgsHistory::new(config.memory);
    let mut trace = SolverTrace::default();
    let mut gnorm = norm(&cur.grad);
    trace.records.push(TraceRecord { k: 0, f: cur.f, grad_norm: gnorm, norm_drift: drift(&x, &y), alpha: None, source: None });

    if gnorm == 0.0 {
        trace.converged = true;
        return Ok((MEigenpair { lambda: cur.f, x, y, residual: 0.0 }, trace));
    }

    for k in 0..config.k_max {
        let (p, source) = lbfgs_direction(&history, &cur.grad, m, config);
        let slope = dot(&p, &cur.grad);
        let step = match armijo(a, &x, &y, cur.f, slope, &p, config) {
            Ok(s) => s,
            Err(e @ (BiquadError::NotDescent(_) | BiquadError::StepUnderflow(_) | BiquadError::DegenerateStep(_))) => {
                trace.converged = gnorm <= config.eps2;
                trace.stop_reason = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        {
            let last = trace.records.last_mut().expect("record for iterate k");
            last.alpha = Some(step.alpha);
            last.source = Some(source);
        }

        let next = step.eval;
        let mut s: Vec<f64> = step.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        s.extend(step.y.iter().zip(&y).map(|(a, b)| a - b));
        let v: Vec<f64> = next.grad.iter().zip(&cur.grad).map(|(a, b)| a - b).collect();

        let z_norm = (dot(&x, &x) + dot(&y, &y)).sqrt();
        let step_small = norm(&s) / z_norm <= config.eps1;
        let df_small = (next.f - cur.f).abs() / (cur.f.abs() + 1.0) <= config.eps3;

        history.push(s, v);
        x = step.x;
        y = step.y;
        cur = next;
        gnorm = norm(&cur.grad);
        trace.iterations = k + 1;
        trace.records.push(TraceRecord {
            k: k + 1,
            f: cur.f,
            grad_norm: gnorm,
            norm_drift: drift(&x, &y),
            alpha: None,
            source: None,
        });

        if step_small && gnorm <= config.eps2 && df_small {
            trace.converged = true;
            break;
        }
        if gnorm == 0.0 {
            trace.converged = true;
            break;
        }
    }
    if !trace.converged && trace.stop_reason.is_none() {
        trace.stop_reason = Some(format!("reached k_max = {}", config.k_max));
    }
    Ok((MEigenpair { lambda: cur.f, x, y, residual: gnorm }, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::testing::{random_tensor, random_vec, rng};

    #[test]
    fn identity_converges_immediately() {
        let a = BiquadraticTensor::identity(3, 4).unwrap();
        let (pair, trace) = solve(&a, &[1.0, 2.0, 3.0], &[0.5, 0.0, -1.0, 2.0], &SolverConfig::default()).unwrap();
        assert!((pair.lambda - 1.0).abs() <= 1e-15);
        assert!(trace.converged);
        assert!(trace.iterations <= 1);
    }

    #[test]
    fn elasticity_fixture_reaches_a_table_value() {
        let a = fixtures::tetragonal_symmetric();
        let mut r = rng(10);
        for _ in 0..5 {
            let (pair, trace) = solve(&a, &random_vec(&mut r, 3), &random_vec(&mut r, 3), &SolverConfig::default()).unwrap();
            assert!(trace.converged, "{trace:?}");
            assert!(trace.is_monotone());
            assert!(pair.residual <= 1e-6);
            assert!((pair.lambda - 2.5).abs() < 1e-4 || (pair.lambda - 3.0).abs() < 1e-4, "{}", pair.lambda);
        }
    }

    #[test]
    fn saddle_start_stays_put() {
        let a = fixtures::diagonal_2x2(-1.0, -1.0, 1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (pair, trace) = solve(&a, &[h, h], &[h, h], &SolverConfig::default()).unwrap();
        assert!(trace.converged);
        assert!(pair.lambda.abs() <= 1e-8);
    }

    #[test]
    fn trace_invariants_on_random_tensors() {
        let mut r = rng(11);
        for _ in 0..10 {
            let a = random_tensor(&mut r, 3, 2).symmetrize();
            let (pair, trace) = solve(&a, &random_vec(&mut r, 3), &random_vec(&mut r, 2), &SolverConfig::default()).unwrap();
            assert!(trace.is_monotone());
            assert_eq!(trace.records.len(), trace.iterations + 1);
            assert!(trace.records.last().unwrap().alpha.is_none());
            assert!((norm(&pair.x) - 1.0).abs() <= 1e-10);
            assert!((norm(&pair.y) - 1.0).abs() <= 1e-10);
            assert!((pair.lambda - a.evaluate_form(&pair.x, &pair.y).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn iteration_cap_flags_non_convergence() {
        let a = fixtures::tetragonal_symmetric();
        let cfg = SolverConfig { k_max: 1, ..SolverConfig::default() };
        let (_, trace) = solve(&a, &[1.0, 0.3, -0.2], &[0.1, 1.0, 0.4], &cfg).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iterations, 1);
    }

    #[test]
    fn zero_start_is_an_error() {
        let a = BiquadraticTensor::identity(2, 2).unwrap();
        assert!(matches!(
            solve(&a, &[0.0, 0.0], &[1.0, 0.0], &SolverConfig::default()),
            Err(BiquadError::ZeroVector("x"))
        ));
    }
}
