//! Brute-force estimates of the extreme M-eigenvalues of small tensors.
//!
//! One sphere (the lower-dimensional one) is sampled deterministically: an
//! angle grid on the circle, an R_d low-discrepancy sequence mapped to S^2 or
//! S^3. For each sample `x` the form is a quadratic form in `y`, so the inner
//! minimum is the smallest eigenvalue of a small symmetric matrix and is
//! computed exactly. The best sample is then polished by projected gradient
//! descent. Everything here uses plain index loops and shares no code with
//! the LBFGS solver.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{BiquadError, Result};
use crate::par;
use crate::tensor::BiquadraticTensor;

/// Largest supported `m` and `n`.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Samples per angular dimension; at least 8.
    pub resolution: usize,
    pub polish_steps: usize,
    pub polish_rate: f64,
    pub parallel: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { resolution: 200, polish_steps: 50, polish_rate: 1e-2, parallel: true }
    }
}

impl GridSpec {
    pub fn new(resolution: usize) -> Self {
        Self { resolution, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.resolution < 8 {
            return Err(BiquadError::InvalidConfig(format!("grid resolution must be at least 8, got {}", self.resolution)));
        }
        if !(self.polish_rate > 0.0) {
            return Err(BiquadError::InvalidConfig("polish rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEstimate {
    /// Best value found, after polishing.
    pub lambda: f64,
    /// Best grid value before polishing.
    pub grid_value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub samples: usize,
}

/// Estimate of the smallest M-eigenvalue (an upper bound on it).
pub fn grid_min(a: &BiquadraticTensor, spec: &GridSpec) -> Result<GridEstimate> {
    spec.validate()?;
    let (m, n) = (a.m(), a.n());
    if m > MAX_DIM || n > MAX_DIM {
        return Err(BiquadError::OracleTooLarge { m, n, limit: MAX_DIM });
    }
    // sample the smaller sphere; swap roles through a transposed view
    let sample_y = n < m;
    let view = |u: &[f64], v: &[f64]| if sample_y { (v.to_vec(), u.to_vec()) } else { (u.to_vec(), v.to_vec()) };
    let dim = if sample_y { n } else { m };
    let points = sphere_points(dim, spec.resolution);

    let values = par::map_indexed(points.len(), spec.parallel, |k| {
        inner_minimum(a, &points[k], sample_y)
    });
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if v.0 < values[best].0 {
            best = k;
        }
    }
    let (grid_value, other) = values[best].clone();
    let (x, y) = view(&points[best], &other);
    let (lambda, x, y) = polish(a, x, y, spec);
    Ok(GridEstimate { lambda, grid_value, x, y, samples: points.len() })
}

/// Estimate of the largest M-eigenvalue (a lower bound on it).
pub fn grid_max(a: &BiquadraticTensor, spec: &GridSpec) -> Result<GridEstimate> {
    let mut est = grid_min(&-a, spec)?;
    est.lambda = -est.lambda;
    est.grid_value = -est.grid_value;
    Ok(est)
}

fn form(a: &BiquadraticTensor, x: &[f64], y: &[f64]) -> f64 {
    let mut total = 0.0;
    for i1 in 0..a.m() {
        for j1 in 0..a.n() {
            for i2 in 0..a.m() {
                for j2 in 0..a.n() {
                    total += a.get(i1, j1, i2, j2) * x[i1] * y[j1] * x[i2] * y[j2];
                }
            }
        }
    }
    total
}

/// Minimum over the other unit sphere with the sampled vector `u` fixed,
/// returned with its minimizer.
fn inner_minimum(a: &BiquadraticTensor, u: &[f64], u_is_y: bool) -> (f64, Vec<f64>) {
    let k = if u_is_y { a.m() } else { a.n() };
    let mut q = DMatrix::<f64>::zeros(k, k);
    for i1 in 0..a.m() {
        for j1 in 0..a.n() {
            for i2 in 0..a.m() {
                for j2 in 0..a.n() {
                    let v = a.get(i1, j1, i2, j2);
                    if u_is_y {
                        q[(i1, i2)] += v * u[j1] * u[j2];
                    } else {
                        q[(j1, j2)] += v * u[i1] * u[i2];
                    }
                }
            }
        }
    }
    let sym = (&q + q.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let idx = eig.eigenvalues.imin();
    (eig.eigenvalues[idx], eig.eigenvectors.column(idx).iter().copied().collect())
}

fn polish(a: &BiquadraticTensor, mut x: Vec<f64>, mut y: Vec<f64>, spec: &GridSpec) -> (f64, Vec<f64>, Vec<f64>) {
    let (m, n) = (a.m(), a.n());
    let mut best = (form(a, &x, &y), x.clone(), y.clone());
    for _ in 0..spec.polish_steps {
        let mut gx = vec![0.0; m];
        let mut gy = vec![0.0; n];
        for i1 in 0..m {
            for j1 in 0..n {
                for i2 in 0..m {
                    for j2 in 0..n {
                        let v = a.get(i1, j1, i2, j2);
                        gx[i1] += v * y[j1] * x[i2] * y[j2];
                        gx[i2] += v * x[i1] * y[j1] * y[j2];
                        gy[j1] += v * x[i1] * x[i2] * y[j2];
                        gy[j2] += v * x[i1] * y[j1] * x[i2];
                    }
                }
            }
        }
        project_step(&mut x, &gx, spec.polish_rate);
        project_step(&mut y, &gy, spec.polish_rate);
        let f = form(a, &x, &y);
        if f < best.0 {
            best = (f, x.clone(), y.clone());
        }
    }
    best
}

fn project_step(v: &mut [f64], g: &[f64], rate: f64) {
    let c: f64 = v.iter().zip(g).map(|(a, b)| a * b).sum();
    for (vi, gi) in v.iter_mut().zip(g) {
        *vi -= rate * (gi - c * *vi);
    }
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    for vi in v.iter_mut() {
        *vi /= nv;
    }
}

/// Deterministic sample of the unit sphere in R^dim.
///
/// For `dim = 2` these are the `resolution` angles `pi k / resolution`
/// (antipodal points give the same form value). For `dim = 3, 4` they are
/// the first `resolution^2` terms of an R_d sequence mapped to the sphere;
/// the set for resolution `r` is a prefix of the set for any larger one.
pub fn sphere_points(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..resolution)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / resolution as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 | 4 => {
            let count = resolution * resolution;
            let d = dim - 1;
            let alpha = r_sequence_steps(d);
            (0..count)
                .map(|i| {
                    let u: Vec<f64> = alpha.iter().map(|a| (0.5 + a * (i + 1) as f64).fract()).collect();
                    map_to_sphere(&u)
                })
                .collect()
        }
        _ => unreachable!("dimension checked against MAX_DIM"),
    }
}

fn r_sequence_steps(d: usize) -> Vec<f64> {
    // phi_d is the positive root of x^(d+1) = x + 1
    let mut phi: f64 = 2.0;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|k| phi.powi(-(k as i32))).collect()
}

fn map_to_sphere(u: &[f64]) -> Vec<f64> {
    use std::f64::consts::TAU;
    match u.len() {
        2 => {
            let z = 1.0 - 2.0 * u[0];
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = TAU * u[1];
            vec![r * phi.cos(), r * phi.sin(), z]
        }
        3 => {
            let (a, b) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
            let (t1, t2) = (TAU * u[1], TAU * u[2]);
            vec![a * t1.sin(), a * t1.cos(), b * t2.sin(), b * t2.cos()]
        }
        _ => unreachable!(),
    }
}
