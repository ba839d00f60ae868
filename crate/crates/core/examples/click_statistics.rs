//! Two-detector click statistics of the optimal heralded state and the click
//! estimator of Q as the detection efficiency shrinks.

use phonon_herald::fock::{prepare_state, required_dim, FockDim, StateKind};
use phonon_herald::herald::{conditional_state, HeraldSpec};
use phonon_herald::mandel::mandel_q;
use phonon_herald::pulse::{click_probabilities, q_from_clicks, DetectionModel};
use phonon_herald::{NumericPolicy, C64};

fn main() -> phonon_herald::Result<()> {
    let policy = NumericPolicy::default();
    let beta = C64::new(10.0, 0.0);
    let dim = FockDim::new(required_dim(beta.norm(), 0.0, 1, &policy))?;
    let rho = prepare_state(StateKind::Coherent { beta }, dim, &policy)?;
    let (rho_c, _) = conditional_state(&rho, &HeraldSpec::from_r(C64::new(3f64.sqrt(), 0.0), beta)?, &policy)?;
    let q = mandel_q(&rho_c, &policy)?;
    println!("source Q = {:.6}, <n> = {:.3}", q.q, q.mean_n);
    println!("{:>10} {:>12} {:>12} {:>12} {:>12}", "εη", "p1", "p2", "Q_est", "εη<n>²");
    for eps_eta in [5e-3, 1e-3, 1e-4, 1e-5, 1e-6] {
        let det = DetectionModel::new(1.0, eps_eta, 0.5)?;
        let c = click_probabilities(&rho_c, &det);
        let est = q_from_clicks(c.p1, c.p2, eps_eta)?;
        println!(
            "{eps_eta:>10.0e} {:>12.4e} {:>12.4e} {est:>12.5} {:>12.4}",
            c.p1,
            c.p2,
            eps_eta * q.mean_n * q.mean_n
        );
    }
    Ok(())
}
