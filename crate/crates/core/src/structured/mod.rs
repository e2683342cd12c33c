//! Structured classes of biquadratic tensors: Z, B0/B, M/strong M, the
//! nested decomposition of symmetric B0 tensors, and sum-of-squares
//! certificates from the square unfolding.

mod classes;
mod decompose;
mod m_tensor;
mod sos;

pub use classes::{
    b0_sums, check_symmetric_b0, is_b0_symmetric_form, is_b0_tensor, is_z_tensor, sign_tolerance, B0Violation,
};
pub use decompose::{decompose_b0, B0Decomposition, Correction};
pub use m_tensor::{classify_m_tensor, ClassificationReport, MEvidence, MStatus, CERTIFY_MARGIN};
pub use sos::{build_from_factors, sos_certificate, SosCertificate};
