use nalgebra::DMatrix;

use crate::bounds::family_sums;
use crate::numeric::KahanSum;
use crate::tensor::BiquadraticTensor;

/// `1e-12 (1 + max |a|)`, the slack allowed when testing signs of floating
/// data.
pub fn sign_tolerance(a: &BiquadraticTensor) -> f64 {
    1e-12 * (1.0 + a.max_abs())
}

/// All off-diagonal entries are nonpositive (up to [`sign_tolerance`]).
pub fn is_z_tensor(a: &BiquadraticTensor) -> bool {
    let tol = sign_tolerance(a);
    let (m, n) = (a.m(), a.n());
    let mn = m * n;
    a.entries().iter().enumerate().all(|(k, v)| {
        let (row, col) = (k / mn, k % mn);
        row == col || *v <= tol
    })
}

/// The matrix of signed sums `S_ij` over the four index families meeting
/// `a_ijij`, diagonal included.
pub fn b0_sums(a: &BiquadraticTensor) -> DMatrix<f64> {
    DMatrix::from_fn(a.m(), a.n(), |i, j| {
        family_sums(a, i, j, false, |v| v).into_iter().collect::<KahanSum>().value()
    })
}

/// Largest off-diagonal entry over the four families meeting `a_ijij`, with
/// diagonal positions counted as 0.
fn family_max(a: &BiquadraticTensor, i: usize, j: usize) -> f64 {
    let (m, n) = (a.m(), a.n());
    let bar = |i1, j1, i2, j2| {
        if BiquadraticTensor::is_diagonal_position(i1, j1, i2, j2) {
            0.0
        } else {
            a.get(i1, j1, i2, j2)
        }
    };
    let mut best = f64::NEG_INFINITY;
    for k in 0..m {
        for l in 0..n {
            best = best
                .max(bar(i, j, k, l))
                .max(bar(k, j, i, l))
                .max(bar(i, l, k, j))
                .max(bar(k, l, i, j));
        }
    }
    best
}

/// `(B0, B)` membership: `S_ij >= 0` and `S_ij / (4mn) >= max abar` over the
/// four families, for every `(i, j)`; `B` requires both strictly.
///
/// Comparisons are exact, matching
/// [`is_diagonally_dominated`](crate::bounds::is_diagonally_dominated).
pub fn is_b0_tensor(a: &BiquadraticTensor) -> (bool, bool) {
    let s = b0_sums(a);
    let scale = 4.0 * (a.m() * a.n()) as f64;
    let mut b0 = true;
    let mut b = true;
    for i in 0..a.m() {
        for j in 0..a.n() {
            let sij = s[(i, j)];
            let mx = family_max(a, i, j);
            b0 &= sij >= 0.0 && sij / scale >= mx;
            b &= sij > 0.0 && sij / scale > mx;
        }
    }
    (b0, b && b0)
}

/// First inequality of the symmetric B0 condition that fails.
#[derive(Debug, Clone, PartialEq)]
pub struct B0Violation {
    pub i: usize,
    pub j: usize,
    pub i2: usize,
    pub j2: usize,
    /// Left minus right side of the violated inequality (negative).
    pub gap: f64,
}

impl std::fmt::Display for B0Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (i, j, i2, j2) = (self.i + 1, self.j + 1, self.i2 + 1, self.j2 + 1);
        if (self.i, self.j) == (self.i2, self.j2) {
            write!(f, "row sum of b_{{{i}{j}..}} is negative (gap {:e})", self.gap)
        } else {
            write!(f, "row mean of b_{{{i}{j}..}} is below b_{{{i}{j}{i2}{j2}}} (gap {:e})", self.gap)
        }
    }
}

/// Row-wise form of the B0 condition used for symmetric tensors:
/// `sum_{i2,j2} b_{i j i2 j2} >= 0` and the row mean is at least every
/// off-diagonal entry of the row. A failing row sum is reported at the
/// diagonal position.
pub fn check_symmetric_b0(a: &BiquadraticTensor) -> std::result::Result<(), B0Violation> {
    let (m, n) = (a.m(), a.n());
    for i in 0..m {
        for j in 0..n {
            let sum: f64 = (0..m)
                .flat_map(|i2| (0..n).map(move |j2| (i2, j2)))
                .map(|(i2, j2)| a.get(i, j, i2, j2))
                .collect::<KahanSum>()
                .value();
            if sum < 0.0 {
                return Err(B0Violation { i, j, i2: i, j2: j, gap: sum });
            }
            let mean = sum / (m * n) as f64;
            for i2 in 0..m {
                for j2 in 0..n {
                    if (i2, j2) != (i, j) && mean < a.get(i, j, i2, j2) {
                        return Err(B0Violation { i, j, i2, j2, gap: mean - a.get(i, j, i2, j2) });
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn is_b0_symmetric_form(a: &BiquadraticTensor) -> bool {
    check_symmetric_b0(a).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::is_diagonally_dominated;
    use crate::testing::rng;
    use rand::Rng;

    #[test]
    fn identity_and_zero() {
        let id = BiquadraticTensor::identity(2, 3).unwrap();
        assert!(is_z_tensor(&id));
        // each of the four families holds the single diagonal 1
        assert!(b0_sums(&id).iter().all(|s| *s == 4.0));
        assert_eq!(is_b0_tensor(&id), (true, true));
        let z = BiquadraticTensor::zeros(2, 2).unwrap();
        assert_eq!(is_b0_tensor(&z), (true, false));
    }

    #[test]
    fn positive_off_diagonal_breaks_z() {
        let mut a = BiquadraticTensor::identity(2, 2).unwrap();
        a.set(0, 1, 1, 0, 0.5);
        assert!(!is_z_tensor(&a));
        a.set(0, 1, 1, 0, -0.5);
        assert!(is_z_tensor(&a));
        // a negative diagonal does not matter for Z
        a.set(1, 1, 1, 1, -3.0);
        assert!(is_z_tensor(&a));
    }

    #[test]
    fn z_tensor_sums_equal_dominance_margin() {
        let mut r = rng(50);
        for _ in 0..10 {
            let a = crate::testing::random_z_tensor(&mut r, 3, 2);
            let s = b0_sums(&a);
            let radii = crate::bounds::gershgorin_radii(&a);
            for i in 0..3 {
                for j in 0..2 {
                    let margin = a.get(i, j, i, j) - radii[(i, j)];
                    assert!((s[(i, j)] / 4.0 - margin).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn integer_z_tensors_agree_with_dominance() {
        let mut r = rng(51);
        for _ in 0..30 {
            let mut a = BiquadraticTensor::from_fn(2, 3, |i1, j1, i2, j2| {
                if BiquadraticTensor::is_diagonal_position(i1, j1, i2, j2) {
                    0.0
                } else {
                    -(r.random_range(0..3) as f64)
                }
            })
            .unwrap();
            let radii = crate::bounds::gershgorin_radii(&a);
            for i in 0..2 {
                for j in 0..3 {
                    let delta = r.random_range(-1..=1) as f64;
                    a.set(i, j, i, j, radii[(i, j)] + delta);
                }
            }
            assert_eq!(is_b0_tensor(&a), is_diagonally_dominated(&a));
        }
    }

    #[test]
    fn symmetric_form_agrees_with_general_check() {
        let mut r = rng(52);
        let mut hits = (0, 0);
        for _ in 0..20 {
            // dyadic entries keep the sums exact
            let base = BiquadraticTensor::from_fn(2, 2, |_, _, _, _| r.random_range(-4..=8) as f64 / 8.0).unwrap();
            let mut a = base.symmetrize();
            let bump = r.random_range(0..12) as f64;
            for i in 0..2 {
                for j in 0..2 {
                    a.set(i, j, i, j, a.get(i, j, i, j) + bump);
                }
            }
            let general = is_b0_tensor(&a).0;
            assert_eq!(general, is_b0_symmetric_form(&a), "{a:?}");
            if general {
                hits.0 += 1;
            } else {
                hits.1 += 1;
            }
        }
        assert!(hits.0 > 0 && hits.1 > 0, "{hits:?}");
    }

    #[test]
    fn violation_names_indices() {
        let mut a = BiquadraticTensor::identity(2, 2).unwrap();
        a.set(0, 0, 1, 1, 2.0);
        a.set(1, 1, 0, 0, 2.0);
        let v = check_symmetric_b0(&a).unwrap_err();
        assert_eq!((v.i, v.j, v.i2, v.j2), (0, 0, 1, 1));
        assert!(v.to_string().contains("b_{1122}"));
    }
}
