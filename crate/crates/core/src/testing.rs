//! Seeded generators shared by unit tests, integration tests and benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::BiquadraticTensor;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn random_unit<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        if let Some(u) = crate::numeric::normalized(&random_vec(rng, len)) {
            return u;
        }
    }
}

/// Entries iid standard normal; no symmetry.
pub fn random_tensor<R: Rng>(rng: &mut R, m: usize, n: usize) -> BiquadraticTensor {
    BiquadraticTensor::new(m, n, random_vec(rng, m * n * m * n)).expect("valid dims")
}

/// Off-diagonal entries uniform in (-1, 0], diagonal standard normal.
pub fn random_z_tensor<R: Rng>(rng: &mut R, m: usize, n: usize) -> BiquadraticTensor {
    BiquadraticTensor::from_fn(m, n, |i1, j1, i2, j2| {
        if BiquadraticTensor::is_diagonal_position(i1, j1, i2, j2) {
            rng.sample::<f64, _>(StandardNormal)
        } else {
            -rng.random::<f64>()
        }
    })
    .expect("valid dims")
}

/// Nonnegative entries uniform in [0, 1).
pub fn random_nonnegative<R: Rng>(rng: &mut R, m: usize, n: usize) -> BiquadraticTensor {
    BiquadraticTensor::from_fn(m, n, |_, _, _, _| rng.random::<f64>()).expect("valid dims")
}
