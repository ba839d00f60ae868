//! Builds the state families on their automatically sized Fock spaces and
//! prints moments, purity and the change in the moments when the space is
//! doubled.

use phonon_herald::fock::{number_moments, prepare_state, FockDim, StateKind};
use phonon_herald::{NumericPolicy, C64};

fn main() -> phonon_herald::Result<()> {
    let policy = NumericPolicy::default();
    let beta = C64::new(4.0, 1.0);
    let kinds = [
        ("coherent", StateKind::Coherent { beta }),
        ("thermal n=0.5", StateKind::Thermal { n_m: 0.5 }),
        ("displaced thermal", StateKind::DisplacedThermal { beta, n_m: 0.5 }),
        ("displaced Fock n=1", StateKind::DisplacedFock { beta, n: 1 }),
    ];
    println!("{:<20} {:>5} {:>12} {:>12} {:>10} {:>12}", "state", "dim", "<n>", "var n", "purity", "Δ<n> @ 2dim");
    for (name, kind) in kinds {
        let dim = kind.required_dim(&policy);
        let rho = prepare_state(kind, FockDim::new(dim)?, &policy)?;
        let m = number_moments(&rho);
        let doubled = number_moments(&prepare_state(kind, FockDim::new(2 * dim)?, &policy)?);
        let change = (doubled.mean - m.mean).abs();
        println!("{name:<20} {dim:>5} {:>12.6} {:>12.6} {:>10.6} {change:>12.2e}", m.mean, m.variance, rho.purity());
    }
    Ok(())
}
