//! Heralds `r|β⟩ + |β,1⟩` from a coherent state and checks it against the
//! ideal superposition, for drive ratios on both branches.

use phonon_herald::fock::{fidelity, prepare_state, required_dim, FockDim, StateKind};
use phonon_herald::herald::{conditional_state, ideal_superposition, optimal_drive_settings, r_from_drives, Branch};
use phonon_herald::mandel::mandel_q;
use phonon_herald::{NumericPolicy, C64};

fn main() -> phonon_herald::Result<()> {
    let policy = NumericPolicy::default();
    let beta = C64::from_polar(6.0, 0.3);
    let dim = FockDim::new(required_dim(beta.norm(), 0.0, 1, &policy))?;
    let rho = prepare_state(StateKind::Coherent { beta }, dim, &policy)?;

    for branch in [Branch::Lower, Branch::Upper] {
        let ratio = optimal_drive_settings(None, 0.0, beta, branch)?;
        let sup = r_from_drives(ratio, beta);
        let spec = ratio.herald(beta)?;
        let (rho_c, weight) = conditional_state(&rho, &spec, &policy)?;
        let ideal = ideal_superposition(sup.r, beta, dim, &policy)?;
        println!(
            "{branch:?}: λ = {:.6}, θ = {:.4}, r = {:.6}, φ = {:.4}, weight = {:.4}, F = {:.12}, Q = {:.6}",
            ratio.lambda,
            ratio.theta,
            sup.r,
            sup.phi,
            weight,
            fidelity(&rho_c, &ideal)?,
            mandel_q(&rho_c, &policy)?.q,
        );
    }
    Ok(())
}
