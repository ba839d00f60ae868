//! `protocol`: write pulse, herald, read pulse and click counting end to end.

use std::collections::BTreeMap;

use super::{enforce, expand_grid, header, par_map, status_cell, warnings_cell, Cell, ResultTable, RunConfig};
use crate::fock::{prepare_state, required_dim, FockDim, StateKind};
use crate::herald::{conditional_state, optimal_drive_settings, DriveRatio, HeraldSpec};
use crate::mandel::{mandel_q, q_conditioned_analytic, q_highdisp_complex};
use crate::pulse::{
    click_probabilities, pulse_coefficients, q_from_clicks, readout_conversion, DetectionModel, PulsePlan, SystemParams,
};
use crate::{Error, RegimeWarning, Result, C64};

const PARAMS: [&str; 9] = ["beta", "n_m", "r", "lambda", "theta", "g_b", "tau_w", "eta", "epsilon"];
const RESULTS: [&str; 22] = [
    "lambda_used",
    "theta_used",
    "k_r_re",
    "k_r_im",
    "k_b_re",
    "k_b_im",
    "r_re",
    "r_im",
    "herald_prob_weight",
    "q_conditional_numeric",
    "epsilon_used",
    "p0",
    "p1",
    "p2",
    "q_from_clicks",
    "q_predicted_analytic",
    "q_highdisp",
    "dim",
    "click_eps_eta",
    "mean_n",
    "status",
    "warnings",
];

/// One row per grid point of the `protocol` section, with any of its scalar
/// fields swept.
///
/// The write pulse uses `G_B = g_b` and `G_R = λe^{iθ}G_B` with `β` real, so
/// `θ` is the drive phase directly. Unless both `lambda` and `theta` are
/// given, the optimal settings for the target `|r|` and branch are used.
pub fn run_protocol(cfg: &RunConfig) -> Result<ResultTable> {
    let base = cfg.protocol.as_ref().ok_or_else(|| Error::Config("missing `protocol` section".into()))?;
    let system = cfg.system_rad()?;
    if base.epsilon.is_none() && base.readout.is_none() {
        return Err(Error::Config("protocol needs `epsilon` or a `readout` pulse".into()));
    }
    let points = expand_grid(&cfg.sweep.axes, &cfg.sweep.fixed, &PARAMS)?;
    let axis_names: Vec<&str> = cfg.sweep.axes.iter().map(|a| a.name.as_str()).collect();
    let columns: Vec<&str> = axis_names.iter().copied().chain(RESULTS).collect();

    let rows = par_map(&points, cfg.parallelism, |p| evaluate(p, cfg, &system))?;

    let mut table = header("protocol", cfg, &columns);
    let dim_max = rows.iter().filter_map(|r| r.dim).max();
    table.push_meta("dim_cap", cfg.dim_cap.to_string());
    table.push_meta("dim_max", dim_max.map_or_else(|| "none".to_string(), |d| d.to_string()));
    let mut warnings = system.check();
    for (p, row) in points.iter().zip(rows) {
        let mut cells: Vec<Cell> = axis_names.iter().map(|n| Cell::num(p[*n])).collect();
        cells.extend(row.cells);
        table.push_row(cells)?;
        warnings.extend(row.warnings);
    }
    enforce(cfg, &warnings)?;
    Ok(table)
}

struct Row {
    cells: Vec<Cell>,
    dim: Option<usize>,
    warnings: Vec<RegimeWarning>,
}

#[derive(Default)]
struct Outputs {
    ratio: Option<DriveRatio>,
    k: Option<(C64, C64)>,
    r: Option<C64>,
    weight: Option<f64>,
    q_numeric: Option<f64>,
    epsilon: Option<f64>,
    clicks: Option<(f64, f64, f64)>,
    q_clicks: Option<f64>,
    q_analytic: Option<f64>,
    q_highdisp: Option<f64>,
    dim: Option<usize>,
    eps_eta: Option<f64>,
    mean_n: Option<f64>,
}

fn evaluate(p: &BTreeMap<String, f64>, cfg: &RunConfig, system: &SystemParams) -> Row {
    let mut out = Outputs::default();
    let mut warnings = Vec::new();
    let status = run_point(p, cfg, system, &mut out, &mut warnings);

    let split = |z: Option<C64>| (Cell::opt(z.map(|z| z.re)), Cell::opt(z.map(|z| z.im)));
    let (kr_re, kr_im) = split(out.k.map(|k| k.0));
    let (kb_re, kb_im) = split(out.k.map(|k| k.1));
    let (r_re, r_im) = split(out.r);
    let cells = vec![
        Cell::opt(out.ratio.map(|d| d.lambda)),
        Cell::opt(out.ratio.map(|d| d.theta)),
        kr_re,
        kr_im,
        kb_re,
        kb_im,
        r_re,
        r_im,
        Cell::opt(out.weight),
        Cell::opt(out.q_numeric),
        Cell::opt(out.epsilon),
        Cell::opt(out.clicks.map(|c| c.0)),
        Cell::opt(out.clicks.map(|c| c.1)),
        Cell::opt(out.clicks.map(|c| c.2)),
        Cell::opt(out.q_clicks),
        Cell::opt(out.q_analytic),
        Cell::opt(out.q_highdisp),
        Cell::opt(out.dim.map(|d| d as f64)),
        Cell::opt(out.eps_eta),
        Cell::opt(out.mean_n),
        status_cell(&status),
        warnings_cell(&warnings),
    ];
    Row { cells, dim: out.dim, warnings }
}

fn run_point(
    p: &BTreeMap<String, f64>,
    cfg: &RunConfig,
    system: &SystemParams,
    out: &mut Outputs,
    warnings: &mut Vec<RegimeWarning>,
) -> Result<()> {
    let base = cfg.protocol.as_ref().expect("checked by caller");
    let scale = cfg.freq_scale();
    let get = |name: &str, default: Option<f64>| p.get(name).copied().or(default);

    let b = get("beta", Some(base.beta)).unwrap();
    let n_m = get("n_m", Some(base.n_m)).unwrap();
    if !(b > 0.0) || !b.is_finite() || !(n_m >= 0.0) || !n_m.is_finite() {
        return Err(Error::Domain(format!("β = {b}, n_m = {n_m}")));
    }
    let beta = C64::new(b, 0.0);
    let ratio = match (get("lambda", base.lambda), get("theta", base.theta)) {
        (Some(l), Some(t)) => DriveRatio::new(l, t)?,
        _ => optimal_drive_settings(get("r", base.r), n_m, beta, base.branch)?,
    };
    out.ratio = Some(ratio);

    let g_b = C64::new(get("g_b", Some(base.g_b)).unwrap() * scale, 0.0);
    let g_r = g_b * C64::from_polar(ratio.lambda, ratio.theta);
    let tau_w = get("tau_w", Some(base.tau_w)).unwrap();
    let plan = PulsePlan::new(g_r, g_b, tau_w, system.kappa)?;
    warnings.extend(plan.check(Some(system)));
    let (k_r, k_b) = pulse_coefficients(&plan);
    out.k = Some((k_r, k_b));
    if k_r.norm() == 0.0 && k_b.norm() == 0.0 {
        return Err(Error::ZeroLikelihood { weight: 0.0 });
    }
    let spec = HeraldSpec::new(k_r, k_b, beta)?;
    let r = spec.r();
    out.r = r;

    let dim = required_dim(b, n_m, 1, &cfg.policy);
    if dim > cfg.dim_cap {
        return Err(Error::Truncation { required: dim, actual: cfg.dim_cap });
    }
    out.dim = Some(dim);
    let rho = prepare_state(StateKind::DisplacedThermal { beta, n_m }, FockDim::new(dim)?, &cfg.policy)?;
    let (rho_c, weight) = conditional_state(&rho, &spec, &cfg.policy)?;
    out.weight = Some(weight);
    let q = mandel_q(&rho_c, &cfg.policy)?;
    out.q_numeric = Some(q.q);
    out.mean_n = Some(q.mean_n);
    if let Some(r) = r {
        out.q_highdisp = Some(q_highdisp_complex(r, beta, n_m));
        out.q_analytic = Some(q_conditioned_analytic(r, beta, n_m, &cfg.policy)?.q);
    }

    let epsilon = match get("epsilon", base.epsilon) {
        Some(e) => e,
        None => {
            let ro = base.readout.as_ref().expect("checked by caller");
            readout_conversion(C64::new(ro.g_r * scale, 0.0), system.kappa, ro.tau_r)?
        }
    };
    out.epsilon = Some(epsilon);
    let det = DetectionModel::new(get("eta", Some(base.eta)).unwrap(), epsilon, base.split)?;
    out.eps_eta = Some(det.eps_eta());
    if det.eps_eta() * q.mean_n > 0.1 {
        warnings.push(RegimeWarning::new(
            "click-estimator",
            format!("εη⟨n⟩ = {} not ≪ 1; the click estimator is biased", det.eps_eta() * q.mean_n),
        ));
    }
    let c = click_probabilities(&rho_c, &det);
    out.clicks = Some((c.p0, c.p1, c.p2));
    out.q_clicks = Some(q_from_clicks(c.p1, c.p2, det.eps_eta())?);
    Ok(())
}
