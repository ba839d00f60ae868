//! Centralized numeric tolerances.
//!
//! Every threshold that decides whether a computation is accepted is read from
//! a [`NumericPolicy`]. The defaults are the values the test suite is pinned
//! against; a run configuration may override any subset of them.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericPolicy {
    /// max |ρ_mn − ρ*_nm| for a density matrix.
    pub hermitian_tol: f64,
    /// smallest eigenvalue accepted for a density matrix.
    pub positivity_tol: f64,
    /// largest truncation deficit (1 − trace before renormalization).
    pub max_trace_deficit: f64,
    /// max |U†U − I| for a displacement operator.
    pub unitarity_tol: f64,
    /// Tr[P†Pρ] below this is treated as an impossible herald.
    pub min_herald_weight: f64,
    /// <n> below this makes Mandel Q undefined.
    pub min_mean_number: f64,
    /// Denominator D of the conditioned correlators below this is degenerate.
    pub min_correlator_denominator: f64,
    /// Tail exponent of the truncation rule (population beyond the cutoff
    /// scales like exp(-tail)).
    pub truncation_tail: f64,
    /// Flat number of extra levels added by the truncation rule.
    pub truncation_margin: f64,
    /// Boundary population above which an a-posteriori truncation check fails.
    pub boundary_population_tol: f64,
    pub fixed_point_rel_tol: f64,
    pub fixed_point_max_iter: usize,
    pub fixed_point_damping: f64,
    /// Relative tolerance on ω_j − ω_k = ω̃_m for a beat note to count as resonant.
    pub beat_resonance_rel_tol: f64,
    /// Relative modulus tolerance for the ideal projective measurement time.
    pub measurement_modulus_tol: f64,
    /// Soft limit on |Δλ|, |Δθ| for the second-order sensitivity expansion.
    pub sensitivity_soft_limit: f64,
    /// Amplitudes below this are treated as zero (r = 0, k = 0 ...).
    pub zero_amplitude: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-12,
            positivity_tol: 1e-10,
            max_trace_deficit: 1e-8,
            unitarity_tol: 1e-10,
            min_herald_weight: 1e-14,
            min_mean_number: 1e-14,
            min_correlator_denominator: 1e-14,
            truncation_tail: 20.0,
            truncation_margin: 10.0,
            boundary_population_tol: 1e-10,
            fixed_point_rel_tol: 1e-12,
            fixed_point_max_iter: 50,
            fixed_point_damping: 0.5,
            beat_resonance_rel_tol: 1e-3,
            measurement_modulus_tol: 1e-9,
            sensitivity_soft_limit: 0.2,
            zero_amplitude: 1e-300,
        }
    }
}
