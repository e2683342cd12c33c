//! Reference tensors used by the reproduction commands and the test suites.

use nalgebra::DMatrix;
use rand::Rng;

use crate::tensor::BiquadraticTensor;

/// The seven independent moduli of the tetragonal elasticity fixture, keyed
/// by their 1-based (i, j, k, l) index.
pub const TETRAGONAL_MODULI: [((usize, usize, usize, usize), f64); 7] = [
    ((1, 1, 1, 1), 4.0),
    ((1, 1, 2, 2), -4.0),
    ((1, 1, 3, 3), -2.0),
    ((1, 1, 1, 2), 1.0),
    ((3, 3, 3, 3), 3.0),
    ((2, 3, 2, 3), 4.0),
    ((1, 2, 1, 2), 4.0),
];

/// Nonzero entries of the symmetrized tetragonal fixture (1-based indices).
/// Used to check [`tetragonal_symmetric`] against the published listing.
pub const TETRAGONAL_SYMMETRIC_LISTING: [((usize, usize, usize, usize), f64); 25] = [
    ((1, 1, 1, 1), 4.0),
    ((1, 1, 1, 2), 1.0),
    ((1, 2, 1, 1), 1.0),
    ((1, 1, 2, 1), 1.0),
    ((2, 1, 1, 1), 1.0),
    ((1, 2, 1, 2), 4.0),
    ((1, 2, 2, 2), -1.0),
    ((2, 2, 1, 2), -1.0),
    ((1, 1, 3, 3), 1.0),
    ((1, 3, 3, 1), 1.0),
    ((3, 1, 1, 3), 1.0),
    ((3, 3, 1, 1), 1.0),
    ((1, 3, 1, 3), 4.0),
    ((2, 1, 2, 1), 4.0),
    ((2, 1, 2, 2), -1.0),
    ((2, 2, 2, 1), -1.0),
    ((2, 2, 2, 2), 4.0),
    ((2, 2, 3, 3), 1.0),
    ((2, 3, 3, 2), 1.0),
    ((3, 2, 2, 3), 1.0),
    ((3, 3, 2, 2), 1.0),
    ((2, 3, 2, 3), 4.0),
    ((3, 1, 3, 1), 4.0),
    ((3, 2, 3, 2), 4.0),
    ((3, 3, 3, 3), 3.0),
];

fn voigt(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (1, 1) => 0,
        (2, 2) => 1,
        (3, 3) => 2,
        (2, 3) => 3,
        (1, 3) => 4,
        (1, 2) => 5,
        _ => unreachable!("indices are 1..=3"),
    }
}

/// Tetragonal elastic moduli tensor in BQ(3, 3). It carries the minor
/// symmetries `c_ijkl = c_jikl = c_ijlk` and the major symmetry
/// `c_ijkl = c_klij`, so it is weakly symmetric but not symmetric.
pub fn tetragonal_elasticity() -> BiquadraticTensor {
    let mut stiffness = DMatrix::<f64>::zeros(6, 6);
    let mut put = |a: (usize, usize), b: (usize, usize), v: f64| {
        let (p, q) = (voigt(a.0, a.1), voigt(b.0, b.1));
        stiffness[(p, q)] = v;
        stiffness[(q, p)] = v;
    };
    for ((i, j, k, l), v) in TETRAGONAL_MODULI {
        put((i, j), (k, l), v);
    }
    // tied moduli: c2222 = c1111, c2233 = c1133, c3131 = c2323, c2212 = -c1112
    put((2, 2), (2, 2), 4.0);
    put((2, 2), (3, 3), -2.0);
    put((3, 1), (3, 1), 4.0);
    put((2, 2), (1, 2), -1.0);

    BiquadraticTensor::from_fn(3, 3, |i1, j1, i2, j2| {
        stiffness[(voigt(i1 + 1, j1 + 1), voigt(i2 + 1, j2 + 1))]
    })
    .expect("3x3 fixture")
}

/// Symmetrized tetragonal fixture.
pub fn tetragonal_symmetric() -> BiquadraticTensor {
    tetragonal_elasticity().symmetrize()
}

/// The symmetric fixture built directly from [`TETRAGONAL_SYMMETRIC_LISTING`].
pub fn tetragonal_symmetric_from_listing() -> BiquadraticTensor {
    let mut t = BiquadraticTensor::zeros(3, 3).expect("3x3");
    for ((i1, j1, i2, j2), v) in TETRAGONAL_SYMMETRIC_LISTING {
        t.set(i1 - 1, j1 - 1, i2 - 1, j2 - 1, v);
    }
    t
}

/// A labelled tensor for interval reproduction.
#[derive(Debug, Clone)]
pub struct LabelledTensor {
    pub label: &'static str,
    pub tensor: BiquadraticTensor,
}

/// The raw and symmetrized fixtures followed by three single-entry edits of
/// the symmetrized one, in reporting order.
pub fn tetragonal_interval_cases() -> Vec<LabelledTensor> {
    let a = tetragonal_symmetric();
    let mut soft_shear = a.clone();
    soft_shear.set(0, 1, 0, 1, 2.0);
    let mut coupled = a.clone();
    coupled.set(0, 2, 0, 1, 2.0);
    coupled.set(0, 1, 0, 2, 2.0);
    let mut soft_1313 = a.clone();
    soft_1313.set(0, 2, 0, 2, 2.0);
    vec![
        LabelledTensor { label: "C (raw)", tensor: tetragonal_elasticity() },
        LabelledTensor { label: "A (symmetrized)", tensor: a },
        LabelledTensor { label: "A, a1212=2", tensor: soft_shear },
        LabelledTensor { label: "A, a1312=a1213=2", tensor: coupled },
        LabelledTensor { label: "A, a1313=2", tensor: soft_1313 },
    ]
}

/// Diagonal BQ(2, 2) tensor with diagonal matrix `[[1, alpha], [beta, gamma]]`.
pub fn diagonal_2x2(alpha: f64, beta: f64, gamma: f64) -> BiquadraticTensor {
    BiquadraticTensor::diagonal(&DMatrix::from_row_slice(2, 2, &[1.0, alpha, beta, gamma]))
        .expect("2x2")
}

/// Interior (all-components-nonzero) M-eigenpair of [`diagonal_2x2`], when it
/// exists: `lambda = (gamma - alpha beta) / (gamma + 1 - alpha - beta)`.
/// Returns `(lambda, x, y)` with nonnegative components.
pub fn diagonal_2x2_interior_pair(alpha: f64, beta: f64, gamma: f64) -> Option<(f64, [f64; 2], [f64; 2])> {
    let s = gamma + 1.0 - alpha - beta;
    if s <= 0.0 {
        return None;
    }
    let x1 = (gamma - beta) / s;
    let x2 = (1.0 - alpha) / s;
    let y1 = (gamma - alpha) / s;
    let y2 = (1.0 - beta) / s;
    if [x1, x2, y1, y2].iter().any(|v| *v <= 0.0) {
        return None;
    }
    Some(((gamma - alpha * beta) / s, [x1.sqrt(), x2.sqrt()], [y1.sqrt(), y2.sqrt()]))
}

/// `B + (m + n) I` where `B` has iid integer entries uniform in `[1, m + n]`
/// and is then symmetrized.
pub fn random_integer_symmetric<R: Rng>(rng: &mut R, m: usize, n: usize) -> BiquadraticTensor {
    let hi = (m + n) as i64;
    let b = BiquadraticTensor::from_fn(m, n, |_, _, _, _| rng.random_range(1..=hi) as f64)
        .expect("valid dims")
        .symmetrize();
    let id = BiquadraticTensor::identity(m, n).expect("valid dims");
    &b + &id.scaled((m + n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrized_elasticity_matches_listing_exactly() {
        let built = tetragonal_symmetric();
        let listed = tetragonal_symmetric_from_listing();
        assert_eq!(built, listed);
    }

    #[test]
    fn raw_elasticity_has_tensor_symmetries() {
        let c = tetragonal_elasticity();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let v = c.get(i, j, k, l);
                        assert_eq!(v, c.get(j, i, k, l));
                        assert_eq!(v, c.get(i, j, l, k));
                        assert_eq!(v, c.get(k, l, i, j));
                    }
                }
            }
        }
        assert_eq!(c.get(1, 1, 0, 1), -1.0);
        assert_eq!(c.get(2, 2, 2, 2), 3.0);
    }

    #[test]
    fn interior_pair_of_saddle_example() {
        let (lambda, x, y) = diagonal_2x2_interior_pair(-1.0, -1.0, 1.0).unwrap();
        assert_eq!(lambda, 0.0);
        for v in x.iter().chain(&y) {
            assert!((v * v - 0.5).abs() < 1e-15);
        }
        assert!(diagonal_2x2_interior_pair(2.0, 0.0, 3.0).is_none());
    }

    #[test]
    fn integer_generator_is_symmetric_with_large_diagonal() {
        let mut r = crate::testing::rng(2);
        let t = random_integer_symmetric(&mut r, 2, 5);
        assert!(t.is_symmetric());
        for i in 0..2 {
            for j in 0..5 {
                assert!(t.get(i, j, i, j) >= 8.0);
            }
        }
    }
}
