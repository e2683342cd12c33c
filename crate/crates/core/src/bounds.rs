//! Gershgorin-type inclusion intervals for M-eigenvalues and diagonal
//! dominance.
//!
//! For each (i, j) the radius `r_ij` collects a quarter of the absolute
//! off-diagonal mass in the four index families that meet `a_{ijij}`:
//! `a_{. j i .}`, `a_{. . i j}`, `a_{i j . .}` and `a_{i . . j}`.
//! Every M-eigenvalue lies in the union of the row intervals
//! `[min_j (a_ijij - r_ij), max_j (a_ijij + r_ij)]` and in the union of the
//! analogous column intervals.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::numeric::KahanSum;
use crate::tensor::BiquadraticTensor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lo - slack && value <= self.hi + slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GershgorinReport {
    pub radii: DMatrix<f64>,
    pub row_intervals: Vec<Interval>,
    pub col_intervals: Vec<Interval>,
    pub global_interval: Interval,
    pub diagonally_dominated: bool,
    pub strictly_dominated: bool,
}

/// Sums `g(a)` over the four families feeding `r_ij`, skipping the diagonal
/// position when `skip_diagonal` is set. Returns the four partial sums in the
/// order `a_{i1 j i j2}`, `a_{i1 j1 i j}`, `a_{i j i2 j2}`, `a_{i j1 i2 j}`.
pub(crate) fn family_sums<G>(a: &BiquadraticTensor, i: usize, j: usize, skip_diagonal: bool, g: G) -> [f64; 4]
where
    G: Fn(f64) -> f64,
{
    let (m, n) = (a.m(), a.n());
    let keep = |i1, j1, i2, j2| !(skip_diagonal && BiquadraticTensor::is_diagonal_position(i1, j1, i2, j2));
    let mut sums = [KahanSum::new(); 4];
    for k in 0..m {
        for l in 0..n {
            if keep(k, j, i, l) {
                sums[0].add(g(a.get(k, j, i, l)));
            }
            if keep(k, l, i, j) {
                sums[1].add(g(a.get(k, l, i, j)));
            }
            if keep(i, j, k, l) {
                sums[2].add(g(a.get(i, j, k, l)));
            }
            if keep(i, l, k, j) {
                sums[3].add(g(a.get(i, l, k, j)));
            }
        }
    }
    sums.map(|s| s.value())
}

/// The matrix of radii `r_ij`.
pub fn gershgorin_radii(a: &BiquadraticTensor) -> DMatrix<f64> {
    DMatrix::from_fn(a.m(), a.n(), |i, j| {
        let s = family_sums(a, i, j, true, f64::abs);
        let mut acc = KahanSum::new();
        for v in s {
            acc.add(v);
        }
        acc.value() / 4.0
    })
}

/// Radii via the reduced formula valid for symmetric tensors,
/// `r_ij = sum_{(i2,j2) != (i,j)} |a_{i j i2 j2}|`.
pub fn gershgorin_radii_symmetric(a: &BiquadraticTensor) -> DMatrix<f64> {
    DMatrix::from_fn(a.m(), a.n(), |i, j| {
        let mut acc = KahanSum::new();
        for i2 in 0..a.m() {
            for j2 in 0..a.n() {
                if (i2, j2) != (i, j) {
                    acc.add(a.get(i, j, i2, j2).abs());
                }
            }
        }
        acc.value()
    })
}

pub fn gershgorin_intervals(a: &BiquadraticTensor) -> GershgorinReport {
    let (m, n) = (a.m(), a.n());
    let radii = gershgorin_radii(a);
    let diag = a.diagonal_matrix();

    let row_intervals = (0..m)
        .map(|i| Interval {
            lo: (0..n).map(|j| diag[(i, j)] - radii[(i, j)]).fold(f64::INFINITY, f64::min),
            hi: (0..n).map(|j| diag[(i, j)] + radii[(i, j)]).fold(f64::NEG_INFINITY, f64::max),
        })
        .collect::<Vec<_>>();
    let col_intervals = (0..n)
        .map(|j| Interval {
            lo: (0..m).map(|i| diag[(i, j)] - radii[(i, j)]).fold(f64::INFINITY, f64::min),
            hi: (0..m).map(|i| diag[(i, j)] + radii[(i, j)]).fold(f64::NEG_INFINITY, f64::max),
        })
        .collect::<Vec<_>>();
    let global_interval = Interval {
        lo: row_intervals.iter().map(|r| r.lo).fold(f64::INFINITY, f64::min),
        hi: row_intervals.iter().map(|r| r.hi).fold(f64::NEG_INFINITY, f64::max),
    };
    let (diagonally_dominated, strictly_dominated) = dominance(&diag, &radii);
    GershgorinReport {
        radii,
        row_intervals,
        col_intervals,
        global_interval,
        diagonally_dominated,
        strictly_dominated,
    }
}

fn dominance(diag: &DMatrix<f64>, radii: &DMatrix<f64>) -> (bool, bool) {
    let dominated = diag.iter().zip(radii.iter()).all(|(d, r)| d >= r);
    let strict = diag.iter().zip(radii.iter()).all(|(d, r)| d > r);
    (dominated, strict)
}

/// `(a_ijij >= r_ij for all (i, j), a_ijij > r_ij for all (i, j))`.
pub fn is_diagonally_dominated(a: &BiquadraticTensor) -> (bool, bool) {
    dominance(&a.diagonal_matrix(), &gershgorin_radii(a))
}

/// Smallest slack `min_ij (a_ijij - r_ij)`.
pub fn dominance_margin(a: &BiquadraticTensor) -> f64 {
    let diag = a.diagonal_matrix();
    let radii = gershgorin_radii(a);
    diag.iter().zip(radii.iter()).map(|(d, r)| d - r).fold(f64::INFINITY, f64::min)
}
