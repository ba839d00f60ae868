//! Signed-r sweep at finite β, written as CSV together with its Q = 0
//! contour.
//!
//! `cargo run --example parameter_sweep -- [config.json] [out_dir]`

use std::fs::File;
use std::path::PathBuf;

use phonon_herald::run::{run_sweep_q, zero_contour, RunConfig};

const DEFAULT: &str = include_str!("../configs/sweep_signed_r.json");

fn main() -> phonon_herald::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(path) => RunConfig::from_path(path.as_ref())?,
        None => RunConfig::from_json(DEFAULT)?,
    };
    let out = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().display().to_string()));
    let table = run_sweep_q(&cfg)?;
    let axes: Vec<&str> = cfg.sweep.axes.iter().map(|a| a.name.as_str()).collect();
    let contour = zero_contour(&table, &axes, "q_analytic")?;
    table.write_csv(File::create(out.join("sweep_q.csv"))?)?;
    contour.write_csv(File::create(out.join("sweep_q_contour.csv"))?)?;
    println!(
        "{} rows, {} contour points, max |analytic − numeric| = {:e}",
        table.rows.len(),
        contour.rows.len(),
        table.values("abs_diff").into_iter().fold(0.0, f64::max)
    );
    for row in &contour.rows {
        println!("  {:?}", row.iter().map(|c| c.as_f64().unwrap()).collect::<Vec<_>>());
    }
    println!("written to {}", out.display());
    Ok(())
}
