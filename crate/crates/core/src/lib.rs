//! Dense simulation of mixed-radix qudit registers, synthesis of the
//! generalized quantum Fourier transform, and the phase-sensing studies built
//! on it: phase digitization, QFT-based phase estimation, Fisher information
//! and Cramér-Rao bounds, two-target correlation spectroscopy, and purity
//! under dephasing.

// `!(x > 0.0)` range checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod gates;
pub mod metrology;
pub mod noise;
pub mod par;
pub mod register;
pub mod report;
pub mod sensing;
pub mod state;

pub use circuit::{circuit_unitary, synthesize_inverse_qft, synthesize_qft, Circuit};
pub use error::{Error, Result};
pub use gates::{chrestenson_matrix, dft_matrix, GateKind, GateOp};
pub use register::{digits_to_index, index_to_digits, DigitReversal, DimensionVector, Limits, RegisterIndex};
pub use state::{measure_distribution, purity, sample_outcomes, MixedState, PureState};

/// Double-precision complex amplitude.
pub type Complex = num_complex::Complex64;
