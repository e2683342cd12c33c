//! Fourth-order covariance tensors of matrix-valued samples.

use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};
use serde::Serialize;

use crate::error::{BiquadError, Result};
use crate::numeric::KahanSum;
use crate::oracle::{self, GridSpec};
use crate::par;
use crate::spectra::{solve_extreme, ExtremeMode, SolverConfig};
use crate::tensor::BiquadraticTensor;

/// Samples per partial Gram matrix. Fixed so the reduction order does not
/// depend on the thread count.
const CHUNK: usize = 512;

/// Smallest eigenvalue estimate still accepted as PSD.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// `T` observed `m x n` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    m: usize,
    n: usize,
    samples: Vec<DMatrix<f64>>,
}

impl SampleBatch {
    pub fn new(samples: Vec<DMatrix<f64>>) -> Result<Self> {
        let first = samples.first().ok_or(BiquadError::TooFewSamples { needed: 1, got: 0 })?;
        let (m, n) = first.shape();
        for (t, s) in samples.iter().enumerate() {
            if s.shape() != (m, n) {
                return Err(BiquadError::DimensionMismatch { axis: "sample shape", expected: m * n, found: s.len() });
            }
            if let Some(k) = s.iter().position(|v| !v.is_finite()) {
                return Err(BiquadError::NonFinite(t * m * n + k));
            }
        }
        Ok(Self { m, n, samples })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_count(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[DMatrix<f64>] {
        &self.samples
    }
}

/// Entrywise mean, compensated.
pub fn sample_mean(batch: &SampleBatch) -> DMatrix<f64> {
    let t = batch.t_count() as f64;
    DMatrix::from_fn(batch.m, batch.n, |i, j| {
        batch.samples.iter().map(|s| s[(i, j)]).collect::<KahanSum>().value() / t
    })
}

/// `sigma_{ijkl} = (1/T) sum_t (X_ij - mean_ij)(X_kl - mean_kl)`.
///
/// Two passes: the mean first, then per-chunk Gram matrices of the centered,
/// row-major flattened samples, added in chunk order.
pub fn covariance_tensor(batch: &SampleBatch, parallel: bool) -> Result<BiquadraticTensor> {
    let t = batch.t_count();
    if t < 2 {
        return Err(BiquadError::TooFewSamples { needed: 2, got: t });
    }
    let (m, n) = (batch.m, batch.n);
    let mn = m * n;
    let mean = sample_mean(batch);
    let chunks = t.div_ceil(CHUNK);
    let partials = par::map_indexed(chunks, parallel, |c| {
        let range = c * CHUNK..((c + 1) * CHUNK).min(t);
        let mut z = DMatrix::zeros(mn, range.len());
        for (col, s) in batch.samples[range].iter().enumerate() {
            for i in 0..m {
                for j in 0..n {
                    z[(i * n + j, col)] = s[(i, j)] - mean[(i, j)];
                }
            }
        }
        &z * z.transpose()
    });
    let mut gram = DMatrix::zeros(mn, mn);
    for p in partials {
        gram += p;
    }
    gram /= t as f64;
    // the two triangles come from different accumulation orders
    let gram = (&gram + gram.transpose()) * 0.5;
    BiquadraticTensor::from_unfolding(m, n, &gram)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdReport {
    pub psd: bool,
    /// Smaller of the solver and oracle estimates.
    pub min_lambda: f64,
    pub solver_lambda: f64,
    /// `None` when a dimension exceeds [`oracle::MAX_DIM`].
    pub oracle_lambda: Option<f64>,
}

/// Estimates the smallest M-eigenvalue and compares it with
/// `-PSD_TOLERANCE`.
pub fn verify_psd(a: &BiquadraticTensor, config: &SolverConfig) -> Result<PsdReport> {
    let solver_lambda = solve_extreme(a, ExtremeMode::Min, config)?.best.lambda;
    let oracle_lambda = if a.m() <= oracle::MAX_DIM && a.n() <= oracle::MAX_DIM {
        let spec = GridSpec { parallel: config.parallel, ..GridSpec::default() };
        Some(oracle::grid_min(a, &spec)?.lambda)
    } else {
        None
    };
    let min_lambda = oracle_lambda.map_or(solver_lambda, |o| o.min(solver_lambda));
    Ok(PsdReport { psd: min_lambda >= -PSD_TOLERANCE, min_lambda, solver_lambda, oracle_lambda })
}

/// Entry distribution for simulated batches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SampleDistribution {
    Uniform { lo: f64, hi: f64 },
}

impl FromStr for SampleDistribution {
    type Err = BiquadError;

    /// Parses `uniform:a,b` with `a < b`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || BiquadError::Parse(format!("distribution `{s}`: expected uniform:a,b with a < b"));
        let rest = s.strip_prefix("uniform:").ok_or_else(bad)?;
        let (a, b) = rest.split_once(',').ok_or_else(bad)?;
        let lo: f64 = a.trim().parse().map_err(|_| bad())?;
        let hi: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        Ok(Self::Uniform { lo, hi })
    }
}

/// `t` matrices with iid entries, drawn row-major from a ChaCha8 stream.
pub fn simulate(t: usize, m: usize, n: usize, dist: SampleDistribution, seed: u64) -> Result<SampleBatch> {
    if m < 2 || n < 2 {
        return Err(BiquadError::InvalidDimensions { m, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let SampleDistribution::Uniform { lo, hi } = dist;
    let u = Uniform::new(lo, hi).map_err(|e| BiquadError::Parse(e.to_string()))?;
    let samples = (0..t).map(|_| {
        let mut s = DMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                s[(i, j)] = u.sample(&mut rng);
            }
        }
        s
    });
    SampleBatch::new(samples.collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(v: Vec<DMatrix<f64>>) -> SampleBatch {
        SampleBatch::new(v).unwrap()
    }

    #[test]
    fn mean_examples() {
        let mm = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 3.5, 0.0]);
        assert_eq!(sample_mean(&batch(vec![mm.clone(); 3])), mm);
        assert_eq!(sample_mean(&batch(vec![mm.clone(), -&mm])), DMatrix::zeros(2, 2));
    }

    #[test]
    fn constant_batch_has_zero_covariance() {
        let mm = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let c = covariance_tensor(&batch(vec![mm; 5]), true).unwrap();
        assert_eq!(c, BiquadraticTensor::zeros(2, 3).unwrap());
    }

    #[test]
    fn rank_one_batch() {
        let x0 = DMatrix::from_column_slice(2, 1, &[1.0, -2.0]);
        let y0 = DMatrix::from_column_slice(3, 1, &[0.5, 1.0, 3.0]);
        let outer = &x0 * y0.transpose();
        let s = [1.0, 4.0, -2.0, 0.5];
        let mean_s = s.iter().sum::<f64>() / 4.0;
        let var_s = s.iter().map(|v| (v - mean_s).powi(2)).sum::<f64>() / 4.0;
        let c = covariance_tensor(&batch(s.iter().map(|v| &outer * *v).collect()), false).unwrap();
        let expected = crate::structured::build_from_factors(&[&outer * var_s.sqrt()]).unwrap();
        assert!(c.max_abs_diff(&expected) < 1e-12);
        let cert = crate::structured::sos_certificate(&c).unwrap().unwrap();
        assert_eq!(cert.factors.len(), 1);
    }

    #[test]
    fn too_few_samples() {
        let one = batch(vec![DMatrix::zeros(2, 2)]);
        assert!(matches!(covariance_tensor(&one, true), Err(BiquadError::TooFewSamples { .. })));
        assert!(SampleBatch::new(vec![]).is_err());
        assert!(SampleBatch::new(vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 3)]).is_err());
    }

    #[test]
    fn uniform_statistics() {
        let b = simulate(10_000, 2, 2, "uniform:0,10".parse().unwrap(), 7).unwrap();
        let mean = sample_mean(&b);
        assert!(mean.iter().all(|v| (v - 5.0).abs() < 0.12), "{mean}");
        let c = covariance_tensor(&b, true).unwrap();
        for (k, v) in c.entries().iter().enumerate() {
            let target = if k % 5 == 0 { 100.0 / 12.0 } else { 0.0 };
            assert!((v - target).abs() < 0.3, "entry {k}: {v}");
        }
        assert!(c.is_weakly_symmetric());
        let rep = verify_psd(&c, &SolverConfig { n_starts: 10, ..SolverConfig::default() }).unwrap();
        assert!(rep.psd && rep.min_lambda > 0.0, "{rep:?}");
    }

    #[test]
    fn parallel_matches_sequential_and_equivariance() {
        let b = simulate(1500, 2, 3, SampleDistribution::Uniform { lo: -1.0, hi: 2.0 }, 3).unwrap();
        let c = covariance_tensor(&b, true).unwrap();
        assert_eq!(c, covariance_tensor(&b, false).unwrap());

        let shift = DMatrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64);
        let shifted = batch(b.samples().iter().map(|s| s + &shift).collect());
        assert!(covariance_tensor(&shifted, true).unwrap().max_abs_diff(&c) < 1e-12);
        let scaled = batch(b.samples().iter().map(|s| s * 3.0).collect());
        assert!(covariance_tensor(&scaled, true).unwrap().max_abs_diff(&c.scaled(9.0)) < 1e-12);

        let mut rev = b.samples().to_vec();
        rev.reverse();
        assert!(covariance_tensor(&batch(rev), true).unwrap().max_abs_diff(&c) < 1e-13);
    }

    #[test]
    fn psd_examples() {
        let cfg = SolverConfig { n_starts: 5, ..SolverConfig::default() };
        let id = BiquadraticTensor::identity(2, 2).unwrap();
        let rep = verify_psd(&id, &cfg).unwrap();
        assert!(rep.psd && (rep.min_lambda - 1.0).abs() < 1e-12);
        let rep = verify_psd(&id.shift(2.0), &cfg).unwrap();
        assert!(!rep.psd && (rep.min_lambda + 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_parsing() {
        assert_eq!("uniform:0,10".parse::<SampleDistribution>().unwrap(), SampleDistribution::Uniform { lo: 0.0, hi: 10.0 });
        for bad in ["normal:0,1", "uniform:3,1", "uniform:1", "uniform:a,b"] {
            assert!(bad.parse::<SampleDistribution>().is_err(), "{bad}");
        }
    }
}
