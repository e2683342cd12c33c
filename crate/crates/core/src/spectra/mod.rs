//! M-eigenvalues of biquadratic tensors.
//!
//! The smallest M-eigenvalue is the minimum of `f(x, y) / (|x|^2 |y|^2)` and
//! every M-eigenpair is a stationary point of it on the product of unit
//! spheres. [`solve`] runs a Riemannian LBFGS iteration with Cayley updates
//! and Armijo backtracking from one start; [`solve_extreme`] drives it from
//! many seeded starts.

mod cayley;
mod config;
mod lbfgs;
mod line_search;
mod multistart;
mod solve;

use serde::Serialize;

use crate::error::{BiquadError, Result};
use crate::numeric::{dot, norm};
use crate::tensor::BiquadraticTensor;

pub use cayley::cayley_step;
pub use config::SolverConfig;
pub use lbfgs::{lbfgs_direction, DirectionSource, LbfgsHistory};
pub use line_search::line_search;
pub use multistart::{
    generate_starts, same_stationary_point, solve_extreme, solve_from_starts, ExtremeMode, MultiStartReport,
    StartRun, DEDUP_LAMBDA_TOL, DEDUP_VECTOR_TOL,
};
pub use solve::{solve, SolverTrace, TraceRecord};

/// Inputs to [`gradient`] must be unit vectors to this tolerance.
pub const GRADIENT_UNIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MEigenpair {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Norm of the Riemannian gradient at `(x, y)`.
    pub residual: f64,
}

impl MEigenpair {
    /// Builds a pair at the normalized `(x, y)` with `lambda = f(x, y)`.
    pub fn at(a: &BiquadraticTensor, x: &[f64], y: &[f64]) -> Result<Self> {
        let (x, y) = normalize_pair(a, x, y)?;
        let e = evaluate(a, &x, &y);
        Ok(Self { lambda: e.f, residual: norm(&e.grad), x, y })
    }
}

/// `f(x, y) / (|x|^2 |y|^2)`.
pub fn objective(a: &BiquadraticTensor, x: &[f64], y: &[f64]) -> Result<f64> {
    let f = a.evaluate_form(x, y)?;
    let (xx, yy) = (dot(x, x), dot(y, y));
    if xx == 0.0 {
        return Err(BiquadError::ZeroVector("x"));
    }
    if yy == 0.0 {
        return Err(BiquadError::ZeroVector("y"));
    }
    Ok(f / (xx * yy))
}

/// Riemannian gradient `(cx - 2 f x, cy - 2 f y)` at unit `(x, y)`, where
/// `cx`, `cy` are the contractions of the M-eigenvalue system.
pub fn gradient(a: &BiquadraticTensor, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    a.evaluate_form(x, y)?;
    check_unit("x", x)?;
    check_unit("y", y)?;
    Ok(evaluate(a, x, y).grad)
}

/// Norm of the gradient at the pair's vectors.
pub fn residual(a: &BiquadraticTensor, pair: &MEigenpair) -> Result<f64> {
    Ok(norm(&gradient(a, &pair.x, &pair.y)?))
}

fn check_unit(axis: &'static str, v: &[f64]) -> Result<()> {
    let nv = norm(v);
    if (nv - 1.0).abs() > GRADIENT_UNIT_TOL {
        return Err(BiquadError::NotUnit { axis, norm: nv });
    }
    Ok(())
}

pub(crate) fn normalize_pair(a: &BiquadraticTensor, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    a.evaluate_form(x, y)?;
    let x = crate::numeric::normalized(x).ok_or(BiquadError::ZeroVector("x"))?;
    let y = crate::numeric::normalized(y).ok_or(BiquadError::ZeroVector("y"))?;
    Ok((x, y))
}

/// Objective value and gradient at a unit point.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub f: f64,
    pub grad: Vec<f64>,
}

pub(crate) fn evaluate(a: &BiquadraticTensor, x: &[f64], y: &[f64]) -> Evaluation {
    let (f, mut cx, mut cy) = a.form_and_contractions(x, y);
    for (c, xi) in cx.iter_mut().zip(x) {
        *c -= 2.0 * f * xi;
    }
    for (c, yj) in cy.iter_mut().zip(y) {
        *c -= 2.0 * f * yj;
    }
    cx.extend_from_slice(&cy);
    Evaluation { f, grad: cx }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::testing::{random_tensor, random_unit, random_vec, rng};

    const TABLE4_X: [f64; 3] = [0.6533, -0.2706, 0.7071];
    const TABLE4_Y: [f64; 3] = [-0.6533, 0.2706, 0.7071];

    #[test]
    fn identity_objective_is_one_and_gradient_vanishes() {
        let id = BiquadraticTensor::identity(3, 2).unwrap();
        let mut r = rng(1);
        for _ in 0..10 {
            let (x, y) = (random_vec(&mut r, 3), random_vec(&mut r, 2));
            assert!((objective(&id, &x, &y).unwrap() - 1.0).abs() < 1e-14);
            let (ux, uy) = (random_unit(&mut r, 3), random_unit(&mut r, 2));
            assert!(norm(&gradient(&id, &ux, &uy).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn objective_is_scale_invariant() {
        let a = random_tensor(&mut rng(2), 2, 3);
        let x = [0.3, -1.2];
        let y = [1.0, 0.5, -0.25];
        let f = objective(&a, &x, &y).unwrap();
        let g = objective(&a, &[0.9, -3.6], &[-2.0, -1.0, 0.5]).unwrap();
        assert!((f - g).abs() <= 1e-12 * (1.0 + f.abs()));
        assert!(matches!(objective(&a, &[0.0, 0.0], &y), Err(BiquadError::ZeroVector("x"))));
    }

    #[test]
    fn table_pair_on_elasticity_fixture() {
        let a = fixtures::tetragonal_symmetric();
        let lambda = objective(&a, &TABLE4_X, &TABLE4_Y).unwrap();
        assert!((lambda - 2.5).abs() < 1e-3);
        let pair = MEigenpair::at(&a, &TABLE4_X, &TABLE4_Y).unwrap();
        assert!((pair.lambda - 2.5).abs() < 1e-4);
        assert!(pair.residual <= 1e-4, "{}", pair.residual);
        // the 3.0 row is printed with 4 decimals and two entries of 3e-4
        let other = MEigenpair::at(&a, &[0.6088, -0.7933, 0.0003], &[-0.9915, -0.1304, 0.0003]).unwrap();
        assert!((other.lambda - 3.0).abs() < 1e-4);
        assert!(other.residual <= 1e-3, "{}", other.residual);
    }

    #[test]
    fn closed_form_saddle_has_tiny_residual() {
        let a = fixtures::diagonal_2x2(-1.0, -1.0, 1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pair = MEigenpair::at(&a, &[h, h], &[h, -h]).unwrap();
        assert!(pair.lambda.abs() <= 1e-15);
        assert!(pair.residual <= 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences_and_is_tangent() {
        let mut r = rng(3);
        for _ in 0..20 {
            let a = random_tensor(&mut r, 3, 2);
            let x = random_unit(&mut r, 3);
            let y = random_unit(&mut r, 2);
            let g = gradient(&a, &x, &y).unwrap();
            let (gx, gy) = g.split_at(3);
            assert!(dot(gx, &x).abs() <= 1e-10 * norm(&g));
            assert!(dot(gy, &y).abs() <= 1e-10 * norm(&g));
            let h = 1e-5;
            let mut fd = Vec::new();
            for k in 0..5 {
                let (mut xp, mut yp, mut xm, mut ym) = (x.clone(), y.clone(), x.clone(), y.clone());
                if k < 3 {
                    xp[k] += h;
                    xm[k] -= h;
                } else {
                    yp[k - 3] += h;
                    ym[k - 3] -= h;
                }
                let d = objective(&a, &xp, &yp).unwrap() - objective(&a, &xm, &ym).unwrap();
                fd.push(d / (2.0 * h));
            }
            let err = norm(&crate::numeric::sub(&g, &fd));
            assert!(err <= 1e-6 * norm(&g).max(1.0), "fd error {err}");
        }
    }

    #[test]
    fn gradient_rejects_non_unit_input() {
        let a = BiquadraticTensor::identity(2, 2).unwrap();
        assert!(matches!(gradient(&a, &[1.0, 1.0], &[1.0, 0.0]), Err(BiquadError::NotUnit { axis: "x", .. })));
        assert!(matches!(
            gradient(&a, &[1.0, 0.0, 0.0], &[1.0, 0.0]),
            Err(BiquadError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sign_variants_share_residual() {
        let a = fixtures::tetragonal_symmetric();
        let pair = MEigenpair::at(&a, &TABLE4_X, &TABLE4_Y).unwrap();
        let neg = |v: &[f64]| v.iter().map(|c| -c).collect::<Vec<_>>();
        for (x, y) in [
            (neg(&pair.x), pair.y.clone()),
            (pair.x.clone(), neg(&pair.y)),
            (neg(&pair.x), neg(&pair.y)),
        ] {
            let variant = MEigenpair { x, y, ..pair.clone() };
            assert!((residual(&a, &variant).unwrap() - pair.residual).abs() < 1e-14);
        }
    }
}
