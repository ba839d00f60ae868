//! Wigner function along the real axis through a heralded superposition,
//! showing the negative region around the displacement.

use phonon_herald::fock::{required_dim, FockDim};
use phonon_herald::herald::ideal_superposition;
use phonon_herald::mandel::wigner_at;
use phonon_herald::{NumericPolicy, C64};

fn main() -> phonon_herald::Result<()> {
    let policy = NumericPolicy::default();
    let beta = C64::new(3.0, 0.0);
    let dim = FockDim::new(required_dim(beta.norm(), 0.0, 1, &policy))?;
    for r in [0.0, 3f64.sqrt()] {
        let rho = ideal_superposition(C64::new(r, 0.0), beta, dim, &policy)?;
        println!("r = {r:.4}");
        for i in 0..=16 {
            let x = beta.re - 2.0 + 0.25 * i as f64;
            let w = wigner_at(&rho, C64::new(x, 0.0), &policy)?;
            let bar = if w < 0.0 { "-".repeat((-w * 60.0) as usize) } else { "+".repeat((w * 60.0) as usize) };
            println!("  Re α = {x:5.2}  W = {w:+.5}  {bar}");
        }
    }
    Ok(())
}
