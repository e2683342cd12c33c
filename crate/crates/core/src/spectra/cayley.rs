//! Cayley retraction on the unit sphere.

use crate::error::{BiquadError, Result};
use crate::numeric::{dot, norm};

const UNIT_TOL: f64 = 1e-10;
const MIN_DENOMINATOR: f64 = 1e-14;

/// Moves the unit vector `x` along `p` by step `alpha`:
///
/// ```text
/// x(a) = ([(1 - a x.p)^2 - a^2 |p|^2] x + 2 a p) / (1 + a^2 |p|^2 - (a x.p)^2)
/// ```
///
/// Only the tangent component of `p` matters; the result has unit norm up to
/// rounding and `alpha = 0` returns `x`.
pub fn cayley_step(x: &[f64], p: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let nx = norm(x);
    if (nx - 1.0).abs() > UNIT_TOL {
        return Err(BiquadError::NotUnit { axis: "x", norm: nx });
    }
    if p.len() != x.len() {
        return Err(BiquadError::DimensionMismatch {
            axis: "direction",
            expected: x.len(),
            found: p.len(),
        });
    }
    let xp = alpha * dot(x, p);
    let pp = alpha * alpha * dot(p, p);
    let denom = 1.0 + pp - xp * xp;
    if denom <= MIN_DENOMINATOR {
        return Err(BiquadError::DegenerateStep(denom));
    }
    let coef = (1.0 - xp) * (1.0 - xp) - pp;
    Ok(x.iter()
        .zip(p)
        .map(|(xi, pi)| (coef * xi + 2.0 * alpha * pi) / denom)
        .collect())
}
