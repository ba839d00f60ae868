//! Orchestration of whole runs: configuration, parameter grids and tabular
//! output. Each `run_*` function evaluates independent points, possibly on a
//! thread pool, and assembles the rows in grid order.
//!
//! Numeric failures at a single point do not abort a run. They are recorded
//! in the row's `status` column; [`ResultTable::failed_rows`] counts them.

mod config;
mod protocol;
mod sensitivity;
mod steady;
mod sweep;
mod table;
mod validate;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use config::{
    Axis, Format, ProtocolConfig, Readout, RunConfig, Scale, SensitivityConfig, SteadyConfig, SweepConfig, Units,
};
pub use protocol::run_protocol;
pub use sensitivity::run_sensitivity;
pub use steady::run_steady;
pub use sweep::{run_sweep_q, zero_contour};
pub use table::{format_f64, Cell, ResultTable};
pub use validate::run_validate;

use crate::regime::escalate;
use crate::{Error, RegimeWarning, Result};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Grid points over `axes` with every name checked against `known`.
///
/// The first axis varies slowest. Each point maps parameter names to values;
/// `fixed` supplies the parameters that are not swept.
fn expand_grid(axes: &[Axis], fixed: &BTreeMap<String, f64>, known: &[&str]) -> Result<Vec<BTreeMap<String, f64>>> {
    for name in axes.iter().map(|a| &a.name).chain(fixed.keys()) {
        if !known.contains(&name.as_str()) {
            return Err(Error::Config(format!("unknown parameter `{name}`; expected one of {known:?}")));
        }
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::Config(format!("axis `{}` given twice", a.name)));
        }
    }
    let grids = axes.iter().map(Axis::grid).collect::<Result<Vec<_>>>()?;
    let mut points = vec![fixed.clone()];
    for (axis, values) in axes.iter().zip(&grids) {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.insert(axis.name.clone(), v);
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

/// Order-preserving map, on `jobs` threads when `jobs > 1`.
fn par_map<P, T, F>(items: &[P], jobs: usize, f: F) -> Result<Vec<T>>
where
    P: Sync,
    T: Send,
    F: Fn(&P) -> T + Sync + Send,
{
    if jobs <= 1 {
        return Ok(items.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

fn header(command: &str, cfg: &RunConfig, columns: &[&str]) -> ResultTable {
    let mut t = ResultTable::new(columns);
    t.push_meta("tool", TOOL);
    t.push_meta("version", VERSION);
    t.push_meta("command", command);
    t.push_meta("config_hash", cfg.hash());
    t
}

fn status_cell(r: &Result<()>) -> Cell {
    match r {
        Ok(()) => Cell::from("ok"),
        Err(e) => Cell::from(format!("error: {e}")),
    }
}

fn warnings_cell(w: &[RegimeWarning]) -> Cell {
    if w.is_empty() {
        return Cell::Absent;
    }
    Cell::from(w.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("; "))
}

/// Under `strict`, any warning aborts the run.
fn enforce(cfg: &RunConfig, warnings: &[RegimeWarning]) -> Result<()> {
    if cfg.strict {
        escalate(warnings)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_lexicographic_first_axis_slowest() {
        let axes = vec![Axis::list("a", &[1.0, 2.0]), Axis::list("b", &[10.0, 20.0, 30.0])];
        let mut fixed = BTreeMap::new();
        fixed.insert("c".to_string(), 5.0);
        let pts = expand_grid(&axes, &fixed, &["a", "b", "c"]).unwrap();
        let ab: Vec<(f64, f64)> = pts.iter().map(|p| (p["a"], p["b"])).collect();
        assert_eq!(ab, vec![(1.0, 10.0), (1.0, 20.0), (1.0, 30.0), (2.0, 10.0), (2.0, 20.0), (2.0, 30.0)]);
        assert!(pts.iter().all(|p| p["c"] == 5.0));
    }

    #[test]
    fn grid_rejects_unknown_and_duplicate_names() {
        let none = BTreeMap::new();
        assert!(matches!(expand_grid(&[Axis::list("zeta", &[1.0])], &none, &["a"]), Err(Error::Config(_))));
        let dup = vec![Axis::list("a", &[1.0]), Axis::list("a", &[2.0])];
        assert!(matches!(expand_grid(&dup, &none, &["a"]), Err(Error::Config(_))));
        let mut fixed = BTreeMap::new();
        fixed.insert("zeta".to_string(), 1.0);
        assert!(matches!(expand_grid(&[], &fixed, &["a"]), Err(Error::Config(_))));
    }

    #[test]
    fn par_map_preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let serial = par_map(&xs, 1, |x| x * x).unwrap();
        let parallel = par_map(&xs, 8, |x| x * x).unwrap();
        assert_eq!(serial, parallel);
    }
}
