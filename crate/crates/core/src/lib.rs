//! Heralded nonclassical states of a highly displaced mechanical oscillator.
//!
//! A cavity-optomechanical protocol prepares the mechanical mode in a
//! (displaced, thermal) coherent state, then detects a single Raman sideband
//! photon whose Stokes/anti-Stokes origin is ambiguous. The detection applies
//! `P = k_R b + k_B b†` to the mechanical state and can leave it with
//! sub-Poissonian phonon statistics (Mandel `Q < 0`) even when the coherent
//! amplitude is arbitrarily large.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`]: dense linear algebra on a truncated oscillator Hilbert space.
//! * [`herald`]: the herald projection, conditional states and drive mapping.
//! * [`mandel`]: Mandel `Q` from density matrices and in closed form, plus
//!   Wigner-function point evaluation.
//! * [`pulse`]: pulsed write/read coefficients and photon-click statistics.
//! * [`steady`]: multi-tone linearized steady state (cooling, displacement,
//!   optical heating, filter leakage).
//! * [`run`]: configuration, parameter sweeps and tabular output used by the
//!   `phonon-herald` binary.
//!
//! Every tolerance lives in [`NumericPolicy`].

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod herald;
pub mod mandel;
pub mod policy;
pub mod pulse;
pub mod regime;
pub mod run;
pub mod steady;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use policy::NumericPolicy;
pub use regime::RegimeWarning;
