//! Dense storage for biquadratic tensors of shape m x n x m x n.
//!
//! Entries are stored row-major over (i1, j1, i2, j2), which makes the flat
//! buffer identical to the row-major mn x mn unfolding with row index
//! `i1 * n + j1` and column index `i2 * n + j2`.

use std::collections::BTreeSet;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{BiquadError, Result};

/// Relative tolerance used by the symmetry predicates.
pub const SYMMETRY_RTOL: f64 = 1e-12;

/// An element of [m] x [n], zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexPair {
    pub i: usize,
    pub j: usize,
}

impl IndexPair {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiquadraticTensor {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl BiquadraticTensor {
    /// Builds a tensor from a flat buffer in (i1, j1, i2, j2) lexicographic order.
    pub fn new(m: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(m, n)?;
        let expected = m * n * m * n;
        if data.len() != expected {
            return Err(BiquadError::DimensionMismatch {
                axis: "entries",
                expected,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(BiquadError::NonFinite(pos));
        }
        Ok(Self { m, n, data })
    }

    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        check_dims(m, n)?;
        Ok(Self {
            m,
            n,
            data: vec![0.0; m * n * m * n],
        })
    }

    pub fn from_fn<F>(m: usize, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize, usize) -> f64,
    {
        let mut t = Self::zeros(m, n)?;
        for i1 in 0..m {
            for j1 in 0..n {
                for i2 in 0..m {
                    for j2 in 0..n {
                        let idx = t.offset(i1, j1, i2, j2);
                        t.data[idx] = f(i1, j1, i2, j2);
                    }
                }
            }
        }
        if let Some(pos) = t.data.iter().position(|v| !v.is_finite()) {
            return Err(BiquadError::NonFinite(pos));
        }
        Ok(t)
    }

    /// The M-identity tensor: ones at (i, j, i, j), zeros elsewhere.
    pub fn identity(m: usize, n: usize) -> Result<Self> {
        let mut t = Self::zeros(m, n)?;
        for i in 0..m {
            for j in 0..n {
                t.set(i, j, i, j, 1.0);
            }
        }
        Ok(t)
    }

    /// Diagonal tensor with `a_{ijij} = diag[(i, j)]`.
    pub fn diagonal(diag: &DMatrix<f64>) -> Result<Self> {
        let (m, n) = diag.shape();
        let mut t = Self::zeros(m, n)?;
        for i in 0..m {
            for j in 0..n {
                t.set(i, j, i, j, diag[(i, j)]);
            }
        }
        if let Some(pos) = t.data.iter().position(|v| !v.is_finite()) {
            return Err(BiquadError::NonFinite(pos));
        }
        Ok(t)
    }

    /// The indicator tensor `I^J`: one where both (i1, j1) and (i2, j2) lie in
    /// `support`, zero elsewhere. Its form is `(sum_{(i,j) in J} x_i y_j)^2`.
    pub fn pattern<'a, I>(m: usize, n: usize, support: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a IndexPair>,
    {
        let mut t = Self::zeros(m, n)?;
        let pairs: BTreeSet<IndexPair> = support.into_iter().copied().collect();
        for p in &pairs {
            if p.i >= m || p.j >= n {
                return Err(BiquadError::IndexOutOfRange { i: p.i, j: p.j, m, n });
            }
        }
        for p in &pairs {
            for q in &pairs {
                t.set(p.i, p.j, q.i, q.j, 1.0);
            }
        }
        Ok(t)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Flat entries in (i1, j1, i2, j2) lexicographic order.
    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn offset(&self, i1: usize, j1: usize, i2: usize, j2: usize) -> usize {
        ((i1 * self.n + j1) * self.m + i2) * self.n + j2
    }

    #[inline]
    pub fn get(&self, i1: usize, j1: usize, i2: usize, j2: usize) -> f64 {
        self.data[self.offset(i1, j1, i2, j2)]
    }

    #[inline]
    pub fn set(&mut self, i1: usize, j1: usize, i2: usize, j2: usize, value: f64) {
        let idx = self.offset(i1, j1, i2, j2);
        self.data[idx] = value;
    }

    /// Whether `(i1, j1, i2, j2)` addresses a diagonal entry `a_{ijij}`.
    #[inline]
    pub fn is_diagonal_position(i1: usize, j1: usize, i2: usize, j2: usize) -> bool {
        i1 == i2 && j1 == j2
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.m, self.n), (other.m, other.n), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn symmetry_tolerance(&self) -> f64 {
        SYMMETRY_RTOL * (1.0 + self.max_abs())
    }

    fn check_vectors(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.m {
            return Err(BiquadError::DimensionMismatch {
                axis: "x (mode 1/3)",
                expected: self.m,
                found: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(BiquadError::DimensionMismatch {
                axis: "y (mode 2/4)",
                expected: self.n,
                found: y.len(),
            });
        }
        Ok(())
    }

    /// `f(x, y) = sum a_{i1 j1 i2 j2} x_{i1} y_{j1} x_{i2} y_{j2}`, unnormalized.
    pub fn evaluate_form(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_vectors(x, y)?;
        Ok(self.form_unchecked(x, y))
    }

    pub(crate) fn form_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let (m, n) = (self.m, self.n);
        let mut total = 0.0;
        for i1 in 0..m {
            for j1 in 0..n {
                let row = &self.data[(i1 * n + j1) * m * n..(i1 * n + j1 + 1) * m * n];
                let mut inner = 0.0;
                for i2 in 0..m {
                    let block = &row[i2 * n..(i2 + 1) * n];
                    let s: f64 = block.iter().zip(y).map(|(a, yj)| a * yj).sum();
                    inner += s * x[i2];
                }
                total += inner * x[i1] * y[j1];
            }
        }
        total
    }

    /// One pass over the entries producing the form value together with the
    /// x- and y-contractions of the M-eigenvalue system.
    pub(crate) fn form_and_contractions(&self, x: &[f64], y: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let mut cx = vec![0.0; m];
        let mut cy = vec![0.0; n];
        let mut total = 0.0;
        for i1 in 0..m {
            for j1 in 0..n {
                let base = (i1 * n + j1) * m * n;
                for i2 in 0..m {
                    for j2 in 0..n {
                        let a = self.data[base + i2 * n + j2];
                        if a == 0.0 {
                            continue;
                        }
                        let w = a * y[j1] * y[j2];
                        cx[i2] += w * x[i1];
                        cx[i1] += w * x[i2];
                        let v = a * x[i1] * x[i2];
                        cy[j2] += v * y[j1];
                        cy[j1] += v * y[j2];
                        total += w * x[i1] * x[i2];
                    }
                }
            }
        }
        (total, cx, cy)
    }

    /// Left-hand side of the x-equations of the M-eigenvalue system.
    /// Satisfies `x . contract_x(x, y) = 2 f(x, y)`.
    pub fn contract_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_vectors(x, y)?;
        Ok(self.form_and_contractions(x, y).1)
    }

    /// Left-hand side of the y-equations of the M-eigenvalue system.
    pub fn contract_y(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_vectors(x, y)?;
        Ok(self.form_and_contractions(x, y).2)
    }

    /// `a_{i1j1i2j2} = a_{i2j2i1j1}` for every index tuple, within tolerance.
    pub fn is_weakly_symmetric(&self) -> bool {
        let tol = self.symmetry_tolerance();
        self.all_indices(|t, i1, j1, i2, j2| {
            (t.get(i1, j1, i2, j2) - t.get(i2, j2, i1, j1)).abs() <= tol
        })
    }

    /// Invariance under exchanging i1 and i2 alone and j1 and j2 alone.
    pub fn is_symmetric(&self) -> bool {
        let tol = self.symmetry_tolerance();
        self.all_indices(|t, i1, j1, i2, j2| {
            let a = t.get(i1, j1, i2, j2);
            (a - t.get(i2, j1, i1, j2)).abs() <= tol && (a - t.get(i1, j2, i2, j1)).abs() <= tol
        })
    }

    fn all_indices<F>(&self, pred: F) -> bool
    where
        F: Fn(&Self, usize, usize, usize, usize) -> bool,
    {
        for i1 in 0..self.m {
            for j1 in 0..self.n {
                for i2 in 0..self.m {
                    for j2 in 0..self.n {
                        if !pred(self, i1, j1, i2, j2) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Averages each entry over its orbit under the two partial exchanges.
    /// The form `f(x, y)` is unchanged.
    pub fn symmetrize(&self) -> Self {
        let mut out = self.clone();
        for i1 in 0..self.m {
            for j1 in 0..self.n {
                for i2 in 0..self.m {
                    for j2 in 0..self.n {
                        let v = (self.get(i1, j1, i2, j2)
                            + self.get(i2, j1, i1, j2)
                            + self.get(i1, j2, i2, j1)
                            + self.get(i2, j2, i1, j1))
                            / 4.0;
                        out.set(i1, j1, i2, j2, v);
                    }
                }
            }
        }
        out
    }

    /// `A - lambda * I`. Every M-eigenvalue moves by `-lambda`, eigenvectors stay.
    pub fn shift(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.m {
            for j in 0..self.n {
                let v = out.get(i, j, i, j) - lambda;
                out.set(i, j, i, j, v);
            }
        }
        out
    }

    /// `lambda * I - A`.
    pub fn reflect_shift(&self, lambda: f64) -> Self {
        -&self.shift(lambda)
    }

    /// The m x n matrix of diagonal entries `a_{ijij}`.
    pub fn diagonal_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.n, |i, j| self.get(i, j, i, j))
    }

    /// `c = a_{i1j1i2j2} d_{i1} f_{j1} d_{i2} f_{j2}`, i.e. `A x1 D x2 F x3 D x4 F`.
    pub fn scale_modes(&self, d: &[f64], f: &[f64]) -> Result<Self> {
        if d.len() != self.m {
            return Err(BiquadError::DimensionMismatch {
                axis: "D (mode 1/3 scaling)",
                expected: self.m,
                found: d.len(),
            });
        }
        if f.len() != self.n {
            return Err(BiquadError::DimensionMismatch {
                axis: "F (mode 2/4 scaling)",
                expected: self.n,
                found: f.len(),
            });
        }
        for (axis, vals) in [("D", d), ("F", f)] {
            if let Some((index, &value)) = vals.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return Err(BiquadError::NonPositiveScale { axis, index, value });
            }
        }
        let mut out = self.clone();
        for i1 in 0..self.m {
            for j1 in 0..self.n {
                for i2 in 0..self.m {
                    for j2 in 0..self.n {
                        let s = d[i1] * f[j1] * d[i2] * f[j2];
                        out.set(i1, j1, i2, j2, s * self.get(i1, j1, i2, j2));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The mn x mn unfolding with rows (i1, j1) and columns (i2, j2).
    pub fn unfolding(&self) -> DMatrix<f64> {
        let mn = self.m * self.n;
        DMatrix::from_row_slice(mn, mn, &self.data)
    }

    /// Inverse of [`unfolding`](Self::unfolding).
    pub fn from_unfolding(m: usize, n: usize, u: &DMatrix<f64>) -> Result<Self> {
        let mn = m * n;
        if u.shape() != (mn, mn) {
            return Err(BiquadError::DimensionMismatch {
                axis: "unfolding",
                expected: mn,
                found: u.nrows(),
            });
        }
        let mut data = Vec::with_capacity(mn * mn);
        for r in 0..mn {
            for c in 0..mn {
                data.push(u[(r, c)]);
            }
        }
        Self::new(m, n, data)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            m: self.m,
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Self {
        assert_eq!((self.m, self.n), (other.m, other.n), "shape mismatch");
        Self {
            m: self.m,
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(BiquadError::InvalidDimensions { m, n });
    }
    Ok(())
}

impl Add for &BiquadraticTensor {
    type Output = BiquadraticTensor;
    fn add(self, rhs: Self) -> BiquadraticTensor {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &BiquadraticTensor {
    type Output = BiquadraticTensor;
    fn sub(self, rhs: Self) -> BiquadraticTensor {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &BiquadraticTensor {
    type Output = BiquadraticTensor;
    fn neg(self) -> BiquadraticTensor {
        self.scaled(-1.0)
    }
}

impl Mul<&BiquadraticTensor> for f64 {
    type Output = BiquadraticTensor;
    fn mul(self, rhs: &BiquadraticTensor) -> BiquadraticTensor {
        rhs.scaled(self)
    }
}
