use nalgebra::DMatrix;

use crate::error::{BiquadError, Result};
use crate::tensor::BiquadraticTensor;

/// Factors `A^(k)` with `f(x, y) = sum_k (x^T A^(k) y)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SosCertificate {
    pub factors: Vec<DMatrix<f64>>,
    /// Smallest eigenvalue of the symmetrized unfolding before clamping.
    pub min_eigenvalue: f64,
}

/// Tries to write the form of `a` as a sum of squares of bilinear forms via
/// the eigendecomposition of `(U + U^T) / 2`, `U` the square unfolding.
///
/// Returns `None` when that matrix has an eigenvalue below
/// `-1e-10 (1 + max |U|)`. This is not a proof that the form takes negative
/// values: other symmetric unfoldings with the same form may be PSD.
pub fn sos_certificate(a: &BiquadraticTensor) -> Result<Option<SosCertificate>> {
    let (m, n) = (a.m(), a.n());
    let u = a.unfolding();
    let sym = (&u + u.transpose()) * 0.5;
    let tau = 1e-10 * (1.0 + a.max_abs());
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| BiquadError::Eigen("symmetric unfolding did not converge".into()))?;
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue < -tau {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..m * n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
    let factors = order
        .into_iter()
        .filter(|&k| eig.eigenvalues[k] > tau)
        .map(|k| {
            let s = eig.eigenvalues[k].sqrt();
            let v = eig.eigenvectors.column(k);
            DMatrix::from_fn(m, n, |i, j| s * v[i * n + j])
        })
        .collect();
    Ok(Some(SosCertificate { factors, min_eigenvalue }))
}

/// `a_{i1 j1 i2 j2} = sum_k A^(k)_{i1 j1} A^(k)_{i2 j2}`.
pub fn build_from_factors(factors: &[DMatrix<f64>]) -> Result<BiquadraticTensor> {
    let first = factors
        .first()
        .ok_or_else(|| BiquadError::Precondition("at least one factor is required".into()))?;
    let (m, n) = first.shape();
    for f in factors {
        if f.nrows() != m {
            return Err(BiquadError::DimensionMismatch { axis: "factor rows", expected: m, found: f.nrows() });
        }
        if f.ncols() != n {
            return Err(BiquadError::DimensionMismatch { axis: "factor columns", expected: n, found: f.ncols() });
        }
    }
    let mn = m * n;
    let mut u = DMatrix::zeros(mn, mn);
    for f in factors {
        // row-major vectorization matches the unfolding index i * n + j
        let v = DMatrix::from_row_slice(mn, 1, f.transpose().as_slice());
        u += &v * v.transpose();
    }
    BiquadraticTensor::from_unfolding(m, n, &u)
}
