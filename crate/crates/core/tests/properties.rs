use biquad::bounds::is_diagonally_dominated;
use biquad::io::{tensor_from_json, tensor_to_json, TensorFormat};
use biquad::spectra::objective;
use biquad::structured::{is_b0_tensor, is_z_tensor};
use biquad::testing::{random_tensor, random_unit, random_z_tensor, rng};
use biquad::{gershgorin_intervals, BiquadraticTensor};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=4, 2usize..=4, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_exact((m, n, seed) in shape(), dense in any::<bool>()) {
        let a = random_tensor(&mut rng(seed), m, n);
        let format = if dense { TensorFormat::Dense } else { TensorFormat::Coo };
        prop_assert_eq!(tensor_from_json(&tensor_to_json(&a, format)).unwrap(), a);
    }

    #[test]
    fn dominated_z_tensor_is_b0((m, n, seed) in shape()) {
        let a = random_z_tensor(&mut rng(seed), m, n);
        prop_assume!(is_z_tensor(&a));
        prop_assert_eq!(is_diagonally_dominated(&a).0, is_b0_tensor(&a).0);
    }

    #[test]
    fn objective_lies_in_inclusion_interval((m, n, seed) in shape()) {
        let mut r = rng(seed);
        let a = random_tensor(&mut r, m, n).symmetrize();
        let (x, y) = (random_unit(&mut r, m), random_unit(&mut r, n));
        let f = objective(&a, &x, &y).unwrap();
        prop_assert!(gershgorin_intervals(&a).global_interval.contains(f, 1e-9));
    }

    #[test]
    fn interval_scales_with_tensor((m, n, seed) in shape(), s in 0.1f64..10.0) {
        let a: BiquadraticTensor = random_tensor(&mut rng(seed), m, n);
        let g = gershgorin_intervals(&a).global_interval;
        let h = gershgorin_intervals(&a.scaled(s)).global_interval;
        prop_assert!((h.lo - s * g.lo).abs() <= 1e-9 * (1.0 + h.lo.abs()));
        prop_assert!((h.hi - s * g.hi).abs() <= 1e-9 * (1.0 + h.hi.abs()));
    }
}
