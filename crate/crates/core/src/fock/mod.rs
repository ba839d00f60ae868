//! Truncated harmonic-oscillator Hilbert space.
//!
//! States and operators are dense `dim × dim` complex matrices in the Fock
//! basis `{|0⟩, …, |dim−1⟩}`. The truncation is never silent: every
//! construction either meets [`required_dim`] or reports how large the space
//! has to be.

mod dim;
mod linalg;
mod operator;
mod state;

pub use dim::{required_dim, FockDim};
pub use linalg::{adjoint_mul, gram, mul};
pub use operator::{
    displacement_operator, displacement_unchecked, ladder_matrix, number_matrix, parity_matrix, OperatorKind,
    OperatorMatrix,
};
pub(crate) use state::distribution_moments;
pub use state::{expectation, fidelity, number_moments, prepare_state, DensityMatrix, NumberMoments, StateKind};
