//! Extremes of the conditioned Q: the high-displacement limits, the thermal
//! threshold and the finite-β minimum over a signed `r` axis.

use phonon_herald::mandel::{q_conditioned_analytic, q_highdisp, thermal_threshold};
use phonon_herald::{NumericPolicy, C64};

fn main() -> phonon_herald::Result<()> {
    let policy = NumericPolicy::default();
    println!("Q(|r|=√3, cos2φ=1) = {}", q_highdisp(3f64.sqrt(), 0.0, 0.0));
    println!("Q(r=0)             = {}", q_highdisp(0.0, 0.0, 0.0));
    println!("thermal threshold  = {:.12} ((√2−1)/4 = {:.12})", thermal_threshold(), (2f64.sqrt() - 1.0) / 4.0);

    for b in [5.0, 10.0, 20.0, 100.0] {
        let beta = C64::new(b, 0.0);
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=12000 {
            let s = -6.0 + 12.0 * i as f64 / 12000.0;
            let q = q_conditioned_analytic(C64::new(s, 0.0), beta, 0.0, &policy)?.q;
            if q < best.0 {
                best = (q, s);
            }
        }
        println!("|β| = {b:>5}: min Q = {:.5} at r = {:.4}", best.0, best.1);
    }
    Ok(())
}
