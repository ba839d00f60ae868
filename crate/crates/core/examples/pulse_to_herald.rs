//! From write-pulse couplings to the herald coefficients, the superposition
//! parameter and the readout conversion.

use phonon_herald::herald::{drive_ratio_from_couplings, optimal_drive_settings, r_from_drives, Branch};
use phonon_herald::pulse::{pulse_coefficients, readout_conversion, PulsePlan};
use phonon_herald::C64;

fn main() -> phonon_herald::Result<()> {
    let kappa = 1.0;
    let beta = C64::new(10.0, 0.0);
    let g_b = C64::new(0.01, 0.0);
    let ratio = optimal_drive_settings(None, 0.0, beta, Branch::Lower)?;
    let g_r = g_b * C64::from_polar(ratio.lambda, ratio.theta);

    for tau_w in [1.0, 10.0, 100.0] {
        let plan = PulsePlan::new(g_r, g_b, tau_w, kappa)?;
        let (k_r, k_b) = pulse_coefficients(&plan);
        let back = drive_ratio_from_couplings(plan.g_r, plan.g_b, beta)?;
        let sup = r_from_drives(back, beta);
        println!(
            "τ_w = {tau_w:>5}: k_R = {k_r:.6}, k_B = {k_b:.6}, r = {:.6}, warnings = {}",
            sup.r,
            plan.check(None).len()
        );
    }
    for tau_r in [1.0, 100.0, 1000.0] {
        println!("τ_r = {tau_r:>6}: ε = {:.6}", readout_conversion(C64::new(0.05, 0.0), kappa, tau_r)?);
    }
    Ok(())
}
