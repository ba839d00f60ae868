//! Steady state of a five-tone continuous drive: renormalized mechanics,
//! coherent amplitude, heating budget and the measurement timing.
//!
//! Pass a run configuration to override the built-in plan:
//! `cargo run --example steady_state_budget -- configs/steady_five_tone.json`

use phonon_herald::run::{run_steady, RunConfig};

const DEFAULT: &str = include_str!("../configs/steady_five_tone.json");

fn main() -> phonon_herald::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::from_path(path.as_ref())?,
        None => RunConfig::from_json(DEFAULT)?,
    };
    let table = run_steady(&cfg)?;
    for (name, cell) in table.columns.iter().zip(&table.rows[0]) {
        println!("{name:>36}  {cell:?}");
    }
    Ok(())
}
