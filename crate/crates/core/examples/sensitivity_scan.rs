//! Quadratic Q loss around the optimal drive settings against centred
//! differences of the finite-β Q, for growing |β|.

use phonon_herald::run::{run_sensitivity, Cell, RunConfig};

fn main() -> phonon_herald::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.sensitivity.betas = vec![20.0, 50.0, 200.0, 1000.0];
    cfg.sensitivity.n_ms = vec![0.0];
    // |β|h must stay well below |r| ≈ √3 for the quadratic expansion.
    cfg.sensitivity.deltas = vec![1e-5];
    let table = run_sensitivity(&cfg)?;
    let col = |n: &str| table.column(n).unwrap();
    let text = |c: &Cell| match c {
        Cell::Text(s) => s.clone(),
        other => format!("{:?}", other.as_f64()),
    };
    for row in &table.rows {
        println!(
            "|β| = {:>6} {:>5} {:>6}: formula {:.4e}, finite difference {:.4e}, rel err {:.4}",
            row[col("beta")].as_f64().unwrap(),
            text(&row[col("branch")]),
            text(&row[col("direction")]),
            row[col("dq_formula")].as_f64().unwrap(),
            row[col("dq_finite_difference")].as_f64().unwrap_or(f64::NAN),
            row[col("rel_err")].as_f64().unwrap_or(f64::NAN),
        );
    }
    Ok(())
}
