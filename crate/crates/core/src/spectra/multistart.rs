//! Seeded multi-start driver for extreme M-eigenvalues.

use std::time::Instant;

use serde::Serialize;

use crate::error::{BiquadError, Result};
use crate::numeric::sub;
use crate::par;
use crate::tensor::BiquadraticTensor;
use crate::testing;

use super::{solve, MEigenpair, SolverConfig, SolverTrace};

/// Eigenvalue tolerance for treating two stationary points as one.
pub const DEDUP_LAMBDA_TOL: f64 = 1e-4;
/// Vector tolerance, on `|x -+ x'| + |y -+ y'|` minimized over signs.
pub const DEDUP_VECTOR_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremeMode {
    Min,
    Max,
}

impl std::str::FromStr for ExtremeMode {
    type Err = BiquadError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(ExtremeMode::Min),
            "max" => Ok(ExtremeMode::Max),
            other => Err(BiquadError::Parse(format!("mode must be min or max, got {other:?}"))),
        }
    }
}

/// One start of a multi-start run. `pair.lambda` is an eigenvalue of the
/// input tensor; for [`ExtremeMode::Max`] the trace is that of the
/// minimization of `-f`.
#[derive(Debug, Clone, Serialize)]
pub struct StartRun {
    pub index: usize,
    pub pair: MEigenpair,
    pub trace: SolverTrace,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiStartReport {
    pub mode: ExtremeMode,
    pub best: MEigenpair,
    pub best_index: usize,
    /// Distinct stationary points among converged runs, ordered by
    /// `(lambda, first start index)`.
    pub stationary: Vec<MEigenpair>,
    pub runs: Vec<StartRun>,
    /// Share of all runs that converged to the best eigenvalue.
    pub success_rate: f64,
}

impl MultiStartReport {
    pub fn converged_count(&self) -> usize {
        self.runs.iter().filter(|r| r.trace.converged).count()
    }

    pub fn mean_iterations(&self) -> f64 {
        self.runs.iter().map(|r| r.trace.iterations as f64).sum::<f64>() / self.runs.len() as f64
    }

    pub fn mean_residual(&self) -> f64 {
        self.runs.iter().map(|r| r.pair.residual).sum::<f64>() / self.runs.len() as f64
    }
}

/// `count` start pairs of standard normal vectors, `x` then `y` for each
/// start, drawn from one ChaCha8 stream seeded with `seed`.
pub fn generate_starts(m: usize, n: usize, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = testing::rng(seed);
    (0..count)
        .map(|_| {
            let x = testing::random_vec(&mut rng, m);
            let y = testing::random_vec(&mut rng, n);
            (x, y)
        })
        .collect()
}

/// Whether two pairs describe the same stationary point up to the sign
/// symmetries `(x, y) -> (+-x, +-y)`.
pub fn same_stationary_point(p: &MEigenpair, q: &MEigenpair) -> bool {
    if (p.lambda - q.lambda).abs() > DEDUP_LAMBDA_TOL {
        return false;
    }
    let dist = |a: &[f64], b: &[f64]| {
        let minus = crate::numeric::norm(&sub(a, b));
        let plus = a.iter().zip(b).map(|(u, v)| (u + v) * (u + v)).sum::<f64>().sqrt();
        minus.min(plus)
    };
    dist(&p.x, &q.x) + dist(&p.y, &q.y) <= DEDUP_VECTOR_TOL
}

/// Runs `config.n_starts` solves from [`generate_starts`] with `config.seed`.
pub fn solve_extreme(a: &BiquadraticTensor, mode: ExtremeMode, config: &SolverConfig) -> Result<MultiStartReport> {
    config.validate()?;
    let starts = generate_starts(a.m(), a.n(), config.n_starts, config.seed);
    solve_from_starts(a, mode, &starts, config)
}

/// Runs one solve per given start and merges the results.
pub fn solve_from_starts(
    a: &BiquadraticTensor,
    mode: ExtremeMode,
    starts: &[(Vec<f64>, Vec<f64>)],
    config: &SolverConfig,
) -> Result<MultiStartReport> {
    if starts.is_empty() {
        return Err(BiquadError::InvalidConfig("at least one start is required".into()));
    }
    let target = match mode {
        ExtremeMode::Min => a.clone(),
        ExtremeMode::Max => -a,
    };
    let sign = match mode {
        ExtremeMode::Min => 1.0,
        ExtremeMode::Max => -1.0,
    };
    let results = par::map_indexed(starts.len(), config.parallel, |index| {
        let t0 = Instant::now();
        let (x0, y0) = &starts[index];
        solve(&target, x0, y0, config).map(|(mut pair, trace)| {
            pair.lambda *= sign;
            StartRun { index, pair, trace, seconds: t0.elapsed().as_secs_f64() }
        })
    });
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;

    // Order converged runs so that the extreme eigenvalue comes first.
    let mut order: Vec<&StartRun> = runs.iter().filter(|r| r.trace.converged).collect();
    order.sort_by(|p, q| {
        (sign * p.pair.lambda)
            .total_cmp(&(sign * q.pair.lambda))
            .then(p.index.cmp(&q.index))
    });
    let Some(best_run) = order.first() else {
        let worst = runs
            .iter()
            .min_by(|p, q| p.trace.final_f().total_cmp(&q.trace.final_f()).then(p.index.cmp(&q.index)))
            .expect("non-empty runs");
        return Err(BiquadError::NoConvergence {
            best_lambda: worst.pair.lambda,
            trace: Box::new(worst.trace.clone()),
        });
    };
    let best = best_run.pair.clone();
    let best_index = best_run.index;

    let mut by_lambda = order.clone();
    by_lambda.sort_by(|p, q| p.pair.lambda.total_cmp(&q.pair.lambda).then(p.index.cmp(&q.index)));
    let mut stationary: Vec<MEigenpair> = Vec::new();
    for run in by_lambda {
        if !stationary.iter().any(|s| same_stationary_point(s, &run.pair)) {
            stationary.push(run.pair.clone());
        }
    }

    let hits = order
        .iter()
        .filter(|r| (r.pair.lambda - best.lambda).abs() <= DEDUP_LAMBDA_TOL)
        .count();
    let success_rate = hits as f64 / runs.len() as f64;
    log::debug!(
        "{} of {} starts converged; best lambda {} from start {}",
        order.len(),
        runs.len(),
        best.lambda,
        best_index
    );
    Ok(MultiStartReport { mode, best, best_index, stationary, runs, success_rate })
}
