use std::collections::BTreeSet;

use serde::Serialize;

use crate::bounds::is_diagonally_dominated;
use crate::error::{BiquadError, Result};
use crate::tensor::{BiquadraticTensor, IndexPair};

use super::classes::{check_symmetric_b0, is_z_tensor, sign_tolerance};

/// One term `h I^J` of the decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correction {
    pub h: f64,
    pub support: BTreeSet<IndexPair>,
}

/// `B = m_part + sum_k h_k I^{J_k}` with `J_1 ⊋ J_2 ⊋ ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct B0Decomposition {
    pub m_part: BiquadraticTensor,
    pub corrections: Vec<Correction>,
}

impl B0Decomposition {
    pub fn reconstruct(&self) -> Result<BiquadraticTensor> {
        let mut out = self.m_part.clone();
        for c in &self.corrections {
            let p = BiquadraticTensor::pattern(out.m(), out.n(), &c.support)?;
            out = &out + &p.scaled(c.h);
        }
        Ok(out)
    }

    pub fn is_strictly_nested(&self) -> bool {
        self.corrections
            .windows(2)
            .all(|w| w[1].support.len() < w[0].support.len() && w[1].support.is_subset(&w[0].support))
    }
}

/// Peels pattern tensors off a symmetric B0 tensor until the remainder has
/// no positive off-diagonal entry.
///
/// Each round takes `J` as the pairs whose row `b_{ij..}` has a positive
/// off-diagonal entry, `h` as the smallest row maximum over `J`, and
/// subtracts `h I^J`. Rows attaining `h` leave `J`, so there are at most
/// `mn` rounds.
pub fn decompose_b0(b: &BiquadraticTensor) -> Result<B0Decomposition> {
    if !b.is_symmetric() {
        return Err(BiquadError::Precondition("decomposition requires a symmetric tensor".into()));
    }
    if let Err(v) = check_symmetric_b0(b) {
        return Err(BiquadError::Precondition(format!("not a B0 tensor: {v}")));
    }
    let (m, n) = (b.m(), b.n());
    let tol = sign_tolerance(b);
    let mut cur = b.clone();
    let mut corrections: Vec<Correction> = Vec::new();

    loop {
        let mut support = BTreeSet::new();
        let mut h = f64::INFINITY;
        for i in 0..m {
            for j in 0..n {
                let d = row_off_diagonal_max(&cur, i, j);
                if d > tol {
                    support.insert(IndexPair::new(i, j));
                    h = h.min(d);
                }
            }
        }
        if support.is_empty() {
            break;
        }
        if let Some(prev) = corrections.last() {
            if !(support.len() < prev.support.len() && support.is_subset(&prev.support)) {
                return Err(BiquadError::Precondition(format!(
                    "support sets stopped nesting at round {}",
                    corrections.len() + 1
                )));
            }
        }
        debug_assert!(h > 0.0);
        let p = BiquadraticTensor::pattern(m, n, &support)?;
        cur = &cur - &p.scaled(h);
        log::debug!("round {}: h = {h}, |J| = {}", corrections.len() + 1, support.len());
        corrections.push(Correction { h, support });
    }

    debug_assert!(is_z_tensor(&cur));
    if !is_diagonally_dominated(&cur).0 {
        log::warn!("remainder of the decomposition is not diagonally dominated");
    }
    Ok(B0Decomposition { m_part: cur, corrections })
}

fn row_off_diagonal_max(a: &BiquadraticTensor, i: usize, j: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i2 in 0..a.m() {
        for j2 in 0..a.n() {
            if (i2, j2) != (i, j) {
                best = best.max(a.get(i, j, i2, j2));
            }
        }
    }
    best
}
