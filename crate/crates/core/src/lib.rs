//! Biquadratic tensors: M-eigenvalues, inclusion bounds, structured classes
//! and covariance estimation.
//!
//! A biquadratic tensor `A` of shape `m x n x m x n` defines the form
//! `f(x, y) = sum a_{i1 j1 i2 j2} x_{i1} y_{j1} x_{i2} y_{j2}`. Its
//! M-eigenvalues are the stationary values of `f` on the product of unit
//! spheres; the smallest one decides positive semi-definiteness.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod io;
pub mod numeric;
pub mod oracle;
pub mod par;
pub mod spectra;
pub mod stats;
pub mod structured;
pub mod tensor;

#[doc(hidden)]
pub mod testing;

pub use bounds::{gershgorin_intervals, gershgorin_radii, GershgorinReport, Interval};
pub use error::{BiquadError, Result};
pub use spectra::{solve, solve_extreme, ExtremeMode, MEigenpair, MultiStartReport, SolverConfig, SolverTrace};
pub use tensor::{BiquadraticTensor, IndexPair};
