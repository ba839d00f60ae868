//! `sensitivity`: the quadratic loss of Q around the optimal drive settings
//! against centred second differences of the finite-β Q.

use super::{enforce, header, par_map, status_cell, warnings_cell, Cell, ResultTable, RunConfig};
use crate::herald::{optimal_drive_settings, r_from_drives, Branch, DriveRatio};
use crate::mandel::{delta_q_sensitivity, q_conditioned_analytic, SensitivityInput};
use crate::{NumericPolicy, RegimeWarning, Result, C64};

const COLUMNS: [&str; 12] = [
    "beta",
    "n_m",
    "branch",
    "direction",
    "delta",
    "lambda_bar",
    "q_optimal",
    "dq_formula",
    "dq_finite_difference",
    "rel_err",
    "status",
    "warnings",
];

#[derive(Clone, Copy)]
enum Direction {
    Lambda,
    Theta,
}

struct Point {
    beta: f64,
    n_m: f64,
    branch: Branch,
    direction: Direction,
    delta: f64,
}

/// Rows over `betas × n_ms × branches × {λ, θ} × deltas`.
///
/// The finite difference is `[Q(x̄+h) + Q(x̄−h) − 2Q(x̄)]/2`, the second-order
/// change for a deviation `h`, compared to the closed form with the same `h`
/// in one direction and zero in the other.
pub fn run_sensitivity(cfg: &RunConfig) -> Result<ResultTable> {
    let s = &cfg.sensitivity;
    let mut points = Vec::new();
    for &beta in &s.betas {
        for &n_m in &s.n_ms {
            for &branch in &s.branches {
                for direction in [Direction::Lambda, Direction::Theta] {
                    for &delta in &s.deltas {
                        points.push(Point { beta, n_m, branch, direction, delta });
                    }
                }
            }
        }
    }
    let rows = par_map(&points, cfg.parallelism, |p| evaluate(p, &cfg.policy))?;
    let mut table = header("sensitivity", cfg, &COLUMNS);
    let mut warnings = Vec::new();
    for (p, (cells, w)) in points.iter().zip(rows) {
        let mut row = vec![
            Cell::num(p.beta),
            Cell::num(p.n_m),
            Cell::from(match p.branch {
                Branch::Lower => "lower",
                Branch::Upper => "upper",
            }),
            Cell::from(match p.direction {
                Direction::Lambda => "lambda",
                Direction::Theta => "theta",
            }),
            Cell::num(p.delta),
        ];
        row.extend(cells);
        table.push_row(row)?;
        warnings.extend(w);
    }
    enforce(cfg, &warnings)?;
    Ok(table)
}

fn evaluate(p: &Point, policy: &NumericPolicy) -> (Vec<Cell>, Vec<RegimeWarning>) {
    let beta = C64::new(p.beta, 0.0);
    let (dl, dt) = match p.direction {
        Direction::Lambda => (p.delta, 0.0),
        Direction::Theta => (0.0, p.delta),
    };
    let input = SensitivityInput { delta_lambda: dl, delta_theta: dt, beta, n_m: p.n_m };
    let warnings = input.check(policy);
    let formula = delta_q_sensitivity(&input);

    let mut bar = None;
    let mut q0 = None;
    let mut fd = None;
    let status = (|| -> Result<()> {
        let opt = optimal_drive_settings(None, p.n_m, beta, p.branch)?;
        bar = Some(opt.lambda);
        let q = |l: f64, t: f64| -> Result<f64> {
            let r = r_from_drives(DriveRatio::new(l, t)?, beta).r;
            Ok(q_conditioned_analytic(r, beta, p.n_m, policy)?.q)
        };
        let base = q(opt.lambda, opt.theta)?;
        q0 = Some(base);
        let plus = q(opt.lambda + dl, opt.theta + dt)?;
        let minus = q(opt.lambda - dl, opt.theta - dt)?;
        fd = Some((plus + minus - 2.0 * base) / 2.0);
        Ok(())
    })();
    let rel = fd.map(|fd| (formula - fd).abs() / fd.abs());
    let cells = vec![
        Cell::opt(bar),
        Cell::opt(q0),
        Cell::num(formula),
        Cell::opt(fd),
        Cell::opt(rel),
        status_cell(&status),
        warnings_cell(&warnings),
    ];
    (cells, warnings)
}
