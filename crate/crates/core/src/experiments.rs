//! Seeded drivers behind the `reproduce` command. Each returns plain,
//! serializable rows; nothing here measures time, so equal seeds give equal
//! reports.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{gershgorin_intervals, Interval};
use crate::error::Result;
use crate::fixtures;
use crate::spectra::{solve_extreme, ExtremeMode, MultiStartReport, SolverConfig};
use crate::stats::{covariance_tensor, simulate, SampleDistribution};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalRow {
    pub label: String,
    pub interval: Interval,
}

/// Global inclusion intervals of the elasticity fixture and its edits.
pub fn elasticity_intervals() -> Vec<IntervalRow> {
    fixtures::tetragonal_interval_cases()
        .into_iter()
        .map(|c| IntervalRow { label: c.label.to_string(), interval: gershgorin_intervals(&c.tensor).global_interval })
        .collect()
}

/// Smallest M-eigenvalue of the symmetrized elasticity fixture.
pub fn elasticity_eigenpairs(config: &SolverConfig) -> Result<MultiStartReport> {
    solve_extreme(&fixtures::tetragonal_symmetric(), ExtremeMode::Min, config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomBoundsRow {
    pub m: usize,
    pub n: usize,
    pub repeats: usize,
    pub mean_lower: f64,
    pub mean_upper: f64,
}

/// Mean inclusion interval over `repeats` shifted random integer symmetric
/// tensors per shape, all drawn from one seeded stream in shape order.
pub fn random_bounds(shapes: &[(usize, usize)], repeats: usize, seed: u64) -> Vec<RandomBoundsRow> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    shapes
        .iter()
        .map(|&(m, n)| {
            let (mut lo, mut hi) = (0.0, 0.0);
            for _ in 0..repeats {
                let a = fixtures::random_integer_symmetric(&mut r, m, n);
                let g = gershgorin_intervals(&a).global_interval;
                lo += g.lo;
                hi += g.hi;
            }
            let k = repeats.max(1) as f64;
            RandomBoundsRow { m, n, repeats, mean_lower: lo / k, mean_upper: hi / k }
        })
        .collect()
}

pub const RANDOM_BOUNDS_SHAPES: [(usize, usize); 8] = [(2, 2), (2, 5), (2, 10), (2, 20), (5, 2), (5, 5), (5, 10), (5, 20)];

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceRow {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub success_rate: f64,
    pub mean_iterations: f64,
    pub mean_residual: f64,
    #[serde(skip)]
    pub report: MultiStartReport,
}

/// Covariance tensors of `t` uniform `[0, 10]` samples per shape, each
/// solved for its smallest M-eigenvalue. Shape `k` uses sample seed
/// `seed + k`.
pub fn covariance_table(shapes: &[(usize, usize)], t: usize, seed: u64, config: &SolverConfig) -> Result<Vec<CovarianceRow>> {
    let dist = SampleDistribution::Uniform { lo: 0.0, hi: 10.0 };
    shapes
        .iter()
        .enumerate()
        .map(|(k, &(m, n))| {
            let batch = simulate(t, m, n, dist, seed.wrapping_add(k as u64))?;
            let cov = covariance_tensor(&batch, config.parallel)?;
            let report = solve_extreme(&cov, ExtremeMode::Min, config)?;
            Ok(CovarianceRow {
                m,
                n,
                lambda: report.best.lambda,
                success_rate: report.success_rate,
                mean_iterations: report.mean_iterations(),
                mean_residual: report.mean_residual(),
                report,
            })
        })
        .collect()
}

pub const COVARIANCE_SHAPES: [(usize, usize); 4] = [(5, 5), (5, 10), (5, 20), (5, 30)];
