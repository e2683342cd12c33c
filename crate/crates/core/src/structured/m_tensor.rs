use serde::Serialize;

use crate::bounds::{gershgorin_intervals, gershgorin_radii};
use crate::error::{BiquadError, Result};
use crate::spectra::{solve_extreme, ExtremeMode, SolverConfig};
use crate::tensor::BiquadraticTensor;

use super::classes::{is_b0_tensor, is_z_tensor, sign_tolerance};

/// Absolute margin required before a strict inequality is called certified.
pub const CERTIFY_MARGIN: f64 = 1e-10;

/// Largest `m * n` for which the diagonal scaling search runs.
pub const SCALING_SEARCH_LIMIT: usize = 64;
const SCALING_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MStatus {
    CertifiedM,
    CertifiedStrongM,
    CertifiedNotM,
    NumericalM,
    NumericalStrongM,
    Indeterminate,
}

impl MStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            MStatus::CertifiedM => "certified-M",
            MStatus::CertifiedStrongM => "certified-strong-M",
            MStatus::CertifiedNotM => "certified-not-M",
            MStatus::NumericalM => "numerical-M",
            MStatus::NumericalStrongM => "numerical-strong-M",
            MStatus::Indeterminate => "indeterminate",
        }
    }
}

/// Quantities behind an M-status for `A = alpha I - B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MEvidence {
    pub alpha: f64,
    /// Upper end of the Gershgorin interval of `B`.
    pub lambda_max_upper: f64,
    /// Largest M-eigenvalue of `B` found by the multi-start solver; a lower
    /// bound on the true value.
    pub lambda_max_estimate: f64,
    /// Positive mode scalings `(d, f)` under which `A` became diagonally
    /// dominated, when the search was needed and succeeded.
    pub scaling: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub is_z: bool,
    pub is_b0: bool,
    pub is_b: bool,
    pub m_status: MStatus,
    pub evidence: Option<MEvidence>,
}

/// Decides whether a Z tensor is an M (or strong M) tensor.
///
/// Certificates come from diagonal dominance of `A` itself or of a positive
/// mode scaling of it (Gershgorin bound on `B = alpha I - A`), and
/// refutations from a feasible point of `B` whose value exceeds `alpha` or
/// from a negative diagonal entry. Anything in between is decided
/// numerically from the solver estimate.
pub fn classify_m_tensor(a: &BiquadraticTensor, config: &SolverConfig) -> Result<ClassificationReport> {
    let is_z = is_z_tensor(a);
    let (is_b0, is_b) = is_b0_tensor(a);
    let mut report = ClassificationReport { is_z, is_b0, is_b, m_status: MStatus::Indeterminate, evidence: None };
    if !is_z {
        return Ok(report);
    }
    let tol = sign_tolerance(a);
    let diag = a.diagonal_matrix();
    let alpha = diag.max() + CERTIFY_MARGIN;
    let b = a.reflect_shift(alpha);
    let upper = gershgorin_intervals(&b).global_interval.hi;
    let estimate = match solve_extreme(&b, ExtremeMode::Max, config) {
        Ok(rep) => rep.best.lambda,
        Err(BiquadError::NoConvergence { best_lambda, .. }) => best_lambda,
        Err(e) => return Err(e),
    };
    let mut evidence = MEvidence { alpha, lambda_max_upper: upper, lambda_max_estimate: estimate, scaling: None };

    let min_diag = diag.min();
    report.m_status = if alpha - upper > CERTIFY_MARGIN {
        MStatus::CertifiedStrongM
    } else if alpha - upper >= -tol && min_diag >= 0.0 {
        MStatus::CertifiedM
    } else if min_diag < -tol || alpha < estimate - CERTIFY_MARGIN {
        MStatus::CertifiedNotM
    } else if let Some((d, f, margin)) = scaling_search(a) {
        evidence.scaling = Some((d, f));
        if margin > CERTIFY_MARGIN && min_diag > 0.0 {
            MStatus::CertifiedStrongM
        } else {
            MStatus::CertifiedM
        }
    } else if alpha - estimate > 1e-8 * (1.0 + alpha.abs()) {
        MStatus::NumericalStrongM
    } else {
        MStatus::NumericalM
    };
    report.evidence = Some(evidence);
    Ok(report)
}

/// `min_ij (1 - r_ij / c_ijij)` for the scaled tensor `c`, or `-inf` if a
/// diagonal entry vanishes.
fn relative_margin(a: &BiquadraticTensor, d: &[f64], f: &[f64]) -> f64 {
    let c = a.scale_modes(d, f).expect("positive scales");
    let radii = gershgorin_radii(&c);
    let mut worst = f64::INFINITY;
    for i in 0..c.m() {
        for j in 0..c.n() {
            let cd = c.get(i, j, i, j);
            if cd <= 0.0 {
                return f64::NEG_INFINITY;
            }
            worst = worst.min(1.0 - radii[(i, j)] / cd);
        }
    }
    worst
}

/// Coordinate search over log-scales for positive `(d, f)` making
/// `A x1 D x2 F x3 D x4 F` diagonally dominated. Returns the scales and the
/// relative margin reached when it is nonnegative.
fn scaling_search(a: &BiquadraticTensor) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let (m, n) = (a.m(), a.n());
    if m * n > SCALING_SEARCH_LIMIT {
        log::info!("skipping scaling search for m*n = {} > {}", m * n, SCALING_SEARCH_LIMIT);
        return None;
    }
    if a.diagonal_matrix().min() <= 0.0 {
        return None;
    }
    let mut logs = vec![0.0; m + n];
    let scales = |logs: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let e: Vec<f64> = logs.iter().map(|v| v.exp()).collect();
        (e[..m].to_vec(), e[m..].to_vec())
    };
    let eval = |logs: &[f64]| {
        let (d, f) = scales(logs);
        relative_margin(a, &d, &f)
    };
    let mut best = eval(&logs);
    let mut step = 0.5;
    for _ in 0..SCALING_SWEEPS {
        if best > CERTIFY_MARGIN || step < 1e-8 {
            break;
        }
        let mut improved = false;
        for k in 0..m + n {
            for dir in [step, -step] {
                let mut trial = logs.clone();
                trial[k] += dir;
                let v = eval(&trial);
                if v > best {
                    best = v;
                    logs = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    if best >= 0.0 {
        let (d, f) = scales(&logs);
        Some((d, f, best))
    } else {
        None
    }
}
