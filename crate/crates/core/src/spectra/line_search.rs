//! Armijo backtracking along Cayley curves.

use crate::error::{BiquadError, Result};
use crate::numeric::dot;
use crate::tensor::BiquadraticTensor;

use super::{cayley_step, check_unit, evaluate, Evaluation, SolverConfig};

/// Smallest step tried before the search gives up.
pub const MIN_STEP: f64 = 1e-16;

pub(crate) struct Accepted {
    pub alpha: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub eval: Evaluation,
}

/// Moves both blocks along their Cayley curves and renormalizes.
pub(crate) fn retract(x: &[f64], y: &[f64], p: &[f64], alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (px, py) = p.split_at(x.len());
    let xn = renormalize(cayley_step(x, px, alpha)?);
    let yn = renormalize(cayley_step(y, py, alpha)?);
    Ok((xn, yn))
}

fn renormalize(mut v: Vec<f64>) -> Vec<f64> {
    let nv = dot(&v, &v).sqrt();
    for c in v.iter_mut() {
        *c /= nv;
    }
    v
}

/// First `alpha` in `1, beta, beta^2, ...` with
/// `f(z(alpha)) <= f(z) + eta alpha p.g`. `slope` is `p.g` and must be negative.
pub(crate) fn armijo(
    a: &BiquadraticTensor,
    x: &[f64],
    y: &[f64],
    f0: f64,
    slope: f64,
    p: &[f64],
    config: &SolverConfig,
) -> Result<Accepted> {
    if !(slope < 0.0) {
        return Err(BiquadError::NotDescent(slope));
    }
    let mut alpha = 1.0;
    while alpha >= MIN_STEP {
        let (xn, yn) = retract(x, y, p, alpha)?;
        let eval = evaluate(a, &xn, &yn);
        if eval.f <= f0 + config.eta * alpha * slope {
            return Ok(Accepted { alpha, x: xn, y: yn, eval });
        }
        alpha *= config.beta;
    }
    Err(BiquadError::StepUnderflow(MIN_STEP))
}

/// Armijo step size for direction `p = (p_x, p_y)` from the unit point `(x, y)`.
pub fn line_search(
    a: &BiquadraticTensor,
    x: &[f64],
    y: &[f64],
    p: &[f64],
    config: &SolverConfig,
) -> Result<f64> {
    a.evaluate_form(x, y)?;
    check_unit("x", x)?;
    check_unit("y", y)?;
    if p.len() != x.len() + y.len() {
        return Err(BiquadError::DimensionMismatch {
            axis: "direction",
            expected: x.len() + y.len(),
            found: p.len(),
        });
    }
    let e = evaluate(a, x, y);
    Ok(armijo(a, x, y, e.f, dot(p, &e.grad), p, config)?.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::testing::{random_tensor, random_unit, rng};

    #[test]
    fn accepted_step_satisfies_armijo() {
        let mut r = rng(4);
        let cfg = SolverConfig::default();
        for _ in 0..30 {
            let a = random_tensor(&mut r, 3, 3);
            let x = random_unit(&mut r, 3);
            let y = random_unit(&mut r, 3);
            let e = evaluate(&a, &x, &y);
            let p: Vec<f64> = e.grad.iter().map(|g| -g).collect();
            let alpha = line_search(&a, &x, &y, &p, &cfg).unwrap();
            let (xn, yn) = retract(&x, &y, &p, alpha).unwrap();
            let fnew = a.evaluate_form(&xn, &yn).unwrap();
            assert!(fnew <= e.f + cfg.eta * alpha * dot(&p, &e.grad));
            assert!(alpha == 1.0 || alpha <= 0.5);
        }
    }

    #[test]
    fn identity_tensor_has_no_descent_direction() {
        let a = crate::tensor::BiquadraticTensor::identity(2, 2).unwrap();
        let err = line_search(&a, &[1.0, 0.0], &[0.0, 1.0], &[0.0, 1.0, 1.0, 0.0], &SolverConfig::default());
        assert!(matches!(err, Err(BiquadError::NotDescent(_))));
    }

    #[test]
    fn ascent_direction_is_rejected() {
        let a = fixtures::tetragonal_symmetric();
        let x = random_unit(&mut rng(5), 3);
        let y = random_unit(&mut rng(6), 3);
        let g = evaluate(&a, &x, &y).grad;
        assert!(matches!(
            line_search(&a, &x, &y, &g, &SolverConfig::default()),
            Err(BiquadError::NotDescent(_))
        ));
    }

    #[test]
    fn replay_is_exact() {
        let a = fixtures::tetragonal_symmetric();
        let starts = super::super::generate_starts(3, 3, 1, 42);
        let x = &crate::numeric::normalized(&starts[0].0).unwrap();
        let y = &crate::numeric::normalized(&starts[0].1).unwrap();
        let p: Vec<f64> = evaluate(&a, x, y).grad.iter().map(|g| -g).collect();
        let cfg = SolverConfig::default();
        let first = line_search(&a, x, y, &p, &cfg).unwrap();
        for _ in 0..5 {
            assert_eq!(line_search(&a, x, y, &p, &cfg).unwrap(), first);
        }
    }

    #[test]
    fn retraction_keeps_unit_norm() {
        let mut r = rng(8);
        let x = random_unit(&mut r, 4);
        let y = random_unit(&mut r, 2);
        let p = crate::testing::random_vec(&mut r, 6);
        let (xn, yn) = retract(&x, &y, &p, 0.3).unwrap();
        assert!((dot(&xn, &xn).sqrt() - 1.0).abs() <= 1e-15);
        assert!((dot(&yn, &yn).sqrt() - 1.0).abs() <= 1e-15);
    }
}
