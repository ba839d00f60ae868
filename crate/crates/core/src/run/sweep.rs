//! `sweep-q`: conditioned Q over a grid of `(r, φ, n_m, β)`.

use std::collections::BTreeMap;

use super::{expand_grid, header, par_map, status_cell, Cell, ResultTable, RunConfig};
use crate::fock::{prepare_state, required_dim, FockDim, StateKind};
use crate::herald::{conditional_state, HeraldSpec};
use crate::mandel::{mandel_q, q_conditioned_analytic, q_highdisp_complex};
use crate::{Error, Result, C64};

const AXES: [&str; 4] = ["r", "phi", "n_m", "beta"];
const RESULTS: [&str; 5] = ["q_analytic", "q_numeric", "q_highdisp", "abs_diff", "status"];

/// Evaluates the conditioned Q at every grid point.
///
/// `r` is signed and combined with `phi` as `r e^{iφ}`; `β` is real. Without a
/// `beta` parameter the high-displacement limit is reported as `q_analytic`
/// and no dense state is built. `q_numeric` is absent where the required Fock
/// dimension exceeds `dim_cap`.
pub fn run_sweep_q(cfg: &RunConfig) -> Result<ResultTable> {
    let points = expand_grid(&cfg.sweep.axes, &cfg.sweep.fixed, &AXES)?;
    let axis_names: Vec<&str> = cfg.sweep.axes.iter().map(|a| a.name.as_str()).collect();
    let columns: Vec<&str> = axis_names.iter().copied().chain(RESULTS).collect();

    let rows = par_map(&points, cfg.parallelism, |p| evaluate(p, cfg))?;

    let mut table = header("sweep-q", cfg, &columns);
    table.push_meta("dim_cap", cfg.dim_cap.to_string());
    let dim_max = rows.iter().filter_map(|r| r.dim).max();
    table.push_meta("dim_max", dim_max.map_or_else(|| "none".to_string(), |d| d.to_string()));
    for (p, row) in points.iter().zip(rows) {
        let mut cells: Vec<Cell> = axis_names.iter().map(|n| Cell::num(p[*n])).collect();
        cells.extend(row.cells);
        table.push_row(cells)?;
    }
    Ok(table)
}

struct Row {
    cells: Vec<Cell>,
    dim: Option<usize>,
}

fn evaluate(p: &BTreeMap<String, f64>, cfg: &RunConfig) -> Row {
    let s = p.get("r").copied().unwrap_or(0.0);
    let phi = p.get("phi").copied().unwrap_or(0.0);
    let n_m = p.get("n_m").copied().unwrap_or(0.0);
    let beta = p.get("beta").copied();
    let r = C64::from_polar(s, phi);

    let mut analytic = None;
    let mut numeric = None;
    let mut highdisp = None;
    let mut dim = None;
    let status = (|| -> Result<()> {
        if !(n_m >= 0.0) || !n_m.is_finite() || !s.is_finite() || !phi.is_finite() {
            return Err(Error::Domain(format!("r = {s}, φ = {phi}, n_m = {n_m}")));
        }
        highdisp = Some(q_highdisp_complex(r, C64::new(1.0, 0.0), n_m));
        let Some(b) = beta else {
            analytic = highdisp;
            return Ok(());
        };
        let beta = C64::new(b, 0.0);
        analytic = Some(q_conditioned_analytic(r, beta, n_m, &cfg.policy)?.q);
        let d = required_dim(b.abs(), n_m, 1, &cfg.policy);
        if d <= cfg.dim_cap {
            dim = Some(d);
            let rho = prepare_state(StateKind::DisplacedThermal { beta, n_m }, FockDim::new(d)?, &cfg.policy)?;
            let (rho_c, _) = conditional_state(&rho, &HeraldSpec::from_r(r, beta)?, &cfg.policy)?;
            numeric = Some(mandel_q(&rho_c, &cfg.policy)?.q);
        }
        Ok(())
    })();

    let diff = match (analytic, numeric) {
        (Some(a), Some(n)) => Some((a - n).abs()),
        _ => None,
    };
    Row {
        cells: vec![
            Cell::opt(analytic),
            Cell::opt(numeric),
            Cell::opt(highdisp),
            Cell::opt(diff),
            status_cell(&status),
        ],
        dim,
    }
}

/// Crossings of `column` through zero along the last of `axes`, by linear
/// interpolation between neighbouring grid points.
///
/// Rows must be in grid order, so that runs sharing every other axis value
/// are contiguous. The result has the leading axes plus the interpolated
/// value of the last axis.
pub fn zero_contour(table: &ResultTable, axes: &[&str], column: &str) -> Result<ResultTable> {
    let Some((last, lead)) = axes.split_last() else {
        return Err(Error::Config("zero contour needs at least one axis".into()));
    };
    let idx = |name: &str| table.column(name).ok_or_else(|| Error::Config(format!("no column `{name}`")));
    let lead_idx = lead.iter().map(|n| idx(n)).collect::<Result<Vec<_>>>()?;
    let (xi, vi) = (idx(last)?, idx(column)?);

    let mut out = ResultTable::new(axes);
    out.metadata = table.metadata.clone();
    out.push_meta("contour_of", column);
    let key = |row: &[Cell]| -> Vec<Option<f64>> { lead_idx.iter().map(|&i| row[i].as_f64()).collect() };

    let mut start = 0;
    while start < table.rows.len() {
        let k = key(&table.rows[start]);
        let mut end = start + 1;
        while end < table.rows.len() && key(&table.rows[end]) == k {
            end += 1;
        }
        let run = &table.rows[start..end];
        let mut emit = |x: f64| -> Result<()> {
            let mut cells: Vec<Cell> = lead_idx.iter().map(|&i| table.rows[start][i].clone()).collect();
            cells.push(Cell::num(x));
            out.push_row(cells)
        };
        for (j, row) in run.iter().enumerate() {
            let (Some(x1), Some(v1)) = (row[xi].as_f64(), row[vi].as_f64()) else { continue };
            if v1 == 0.0 {
                emit(x1)?;
                continue;
            }
            if j == 0 {
                continue;
            }
            let prev = &run[j - 1];
            if let (Some(x0), Some(v0)) = (prev[xi].as_f64(), prev[vi].as_f64()) {
                if v0 != 0.0 && (v0 < 0.0) != (v1 < 0.0) {
                    emit(x0 + (x1 - x0) * v0 / (v0 - v1))?;
                }
            }
        }
        start = end;
    }
    Ok(out)
}
