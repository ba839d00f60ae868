//! `validate`: the invariant suite as a table, one row per check.

use std::f64::consts::{FRAC_2_PI, PI};

use super::{header, par_map, Cell, ResultTable, RunConfig};
use crate::fock::{
    displacement_operator, fidelity, number_moments, prepare_state, required_dim, DensityMatrix, FockDim, StateKind,
};
use crate::herald::{conditional_state, ideal_superposition, HeraldSpec};
use crate::mandel::{mandel_q, q_conditioned_analytic, q_highdisp, thermal_threshold, wigner_at};
use crate::pulse::{click_probabilities, distribution_q, thinned_distribution, DetectionModel, SystemParams};
use crate::steady::{amplitude_bound, single_tone_self_energy, DriveTone, ToneTag};
use crate::{NumericPolicy, Result, C64};

type Check = fn(&NumericPolicy) -> Result<f64>;

/// Each check returns a non-negative deviation that must not exceed its
/// tolerance.
const CHECKS: [(&str, Check, f64); 14] = [
    ("q_highdisp_minimum", q_min, 1e-12),
    ("q_highdisp_maximum", q_max, 1e-12),
    ("thermal_threshold", threshold, 1e-9),
    ("displacement_unitarity", unitarity, 1e-10),
    ("state_hermiticity", hermiticity, 1e-12),
    ("state_positivity", positivity, 1e-10),
    ("truncation_convergence", convergence, 1e-8),
    ("conditional_state_vs_ideal", conditional_vs_ideal, 1e-8),
    ("q_analytic_vs_numeric", analytic_vs_numeric, 1e-6),
    ("thinning_identity", thinning, 1e-10),
    ("click_normalization", click_norm, 1e-12),
    ("wigner_anchors", wigner, 1e-10),
    ("sigma_symmetric_cancellation", sigma_cancel, 1e-12),
    ("amplitude_bound_resolved_limit", bound_limit, 1e-3),
];

pub fn run_validate(cfg: &RunConfig) -> Result<ResultTable> {
    let results = par_map(&CHECKS, cfg.parallelism, |(_, f, _)| f(&cfg.policy))?;
    let mut table = header("validate", cfg, &["check", "deviation", "tolerance", "status"]);
    for ((name, _, tol), res) in CHECKS.iter().zip(results) {
        let (dev, status) = match res {
            Ok(d) if d <= *tol => (Cell::num(d), Cell::from("ok")),
            Ok(d) => (Cell::num(d), Cell::from("fail: deviation above tolerance")),
            Err(e) => (Cell::Absent, Cell::from(format!("error: {e}"))),
        };
        table.push_row(vec![Cell::from(*name), dev, Cell::num(*tol), status])?;
    }
    Ok(table)
}

fn build(kind: StateKind, policy: &NumericPolicy) -> Result<DensityMatrix> {
    prepare_state(kind, FockDim::new(kind.required_dim(policy))?, policy)
}

fn families() -> [StateKind; 5] {
    let b = C64::new(2.0, -1.0);
    [
        StateKind::Thermal { n_m: 1.0 },
        StateKind::Coherent { beta: b },
        StateKind::DisplacedThermal { beta: b, n_m: 0.5 },
        StateKind::Fock { n: 3 },
        StateKind::DisplacedFock { beta: b, n: 1 },
    ]
}

fn q_min(_: &NumericPolicy) -> Result<f64> {
    Ok((q_highdisp(3f64.sqrt(), 0.0, 0.0) + 0.25).abs())
}

fn q_max(_: &NumericPolicy) -> Result<f64> {
    Ok((q_highdisp(0.0, 0.0, 0.0) - 2.0).abs())
}

fn threshold(_: &NumericPolicy) -> Result<f64> {
    Ok((thermal_threshold() - (2f64.sqrt() - 1.0) / 4.0).abs())
}

fn unitarity(policy: &NumericPolicy) -> Result<f64> {
    let beta = C64::new(3.0, 1.5);
    let d = displacement_operator(beta, FockDim::new(required_dim(beta.norm(), 0.0, 0, policy))?, policy)?;
    Ok(d.unitarity_error())
}

fn hermiticity(policy: &NumericPolicy) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in families() {
        worst = worst.max(build(k, policy)?.hermiticity_error());
    }
    Ok(worst)
}

fn positivity(policy: &NumericPolicy) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in families() {
        let rho = build(k, policy)?;
        rho.validate(policy)?;
        worst = worst.max((-rho.min_eigenvalue()).max(0.0)).max(rho.trace_deficit());
    }
    Ok(worst)
}

fn convergence(policy: &NumericPolicy) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in families() {
        let d = k.required_dim(policy);
        let a = number_moments(&prepare_state(k, FockDim::new(d)?, policy)?);
        let b = number_moments(&prepare_state(k, FockDim::new(2 * d)?, policy)?);
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
        worst = worst.max(rel(a.mean, b.mean)).max(rel(a.variance, b.variance));
    }
    Ok(worst)
}

fn conditional_vs_ideal(policy: &NumericPolicy) -> Result<f64> {
    let beta = C64::new(2.5, 0.7);
    let r = C64::new(-1.2, 0.4);
    let dim = FockDim::new(required_dim(beta.norm(), 0.0, 1, policy))?;
    let rho = prepare_state(StateKind::Coherent { beta }, dim, policy)?;
    let (rho_c, _) = conditional_state(&rho, &HeraldSpec::from_r(r, beta)?, policy)?;
    Ok((1.0 - fidelity(&rho_c, &ideal_superposition(r, beta, dim, policy)?)?).abs())
}

fn analytic_vs_numeric(policy: &NumericPolicy) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for b in [0.5, 2.0, 5.0] {
        for n_m in [0.0, 0.1, 1.0] {
            for s in [-2.0, 0.5, 3f64.sqrt()] {
                for phi in [0.0, PI / 4.0] {
                    let beta = C64::new(b, 0.0);
                    let r = C64::from_polar(s, phi);
                    let kind = StateKind::DisplacedThermal { beta, n_m };
                    let dim = FockDim::new(required_dim(b, n_m, 1, policy))?;
                    let (rho_c, _) =
                        conditional_state(&prepare_state(kind, dim, policy)?, &HeraldSpec::from_r(r, beta)?, policy)?;
                    let num = mandel_q(&rho_c, policy)?.q;
                    let ana = q_conditioned_analytic(r, beta, n_m, policy)?.q;
                    worst = worst.max((num - ana).abs() / ana.abs().max(1.0));
                }
            }
        }
    }
    Ok(worst)
}

fn thinning(policy: &NumericPolicy) -> Result<f64> {
    let q = 0.005;
    let mut worst: f64 = 0.0;
    for k in
        [StateKind::Thermal { n_m: 1.0 }, StateKind::Coherent { beta: C64::new(2.0, 0.0) }, StateKind::Fock { n: 3 }]
    {
        let p = build(k, policy)?.populations();
        let source = distribution_q(&p, policy)?;
        let detected = distribution_q(&thinned_distribution(&p, q)?, policy)?;
        worst = worst.max((detected - q * source).abs());
    }
    Ok(worst)
}

fn click_norm(policy: &NumericPolicy) -> Result<f64> {
    let det = DetectionModel::new(0.6, 0.3, 0.5)?;
    let mut worst: f64 = 0.0;
    for k in families() {
        let c = click_probabilities(&build(k, policy)?, &det);
        worst = worst.max((c.p0 + c.p1 + c.p2 - 1.0).abs());
    }
    Ok(worst)
}

fn wigner(policy: &NumericPolicy) -> Result<f64> {
    let zero = C64::new(0.0, 0.0);
    let beta = C64::new(1.5, -0.5);
    let vac = build(StateKind::Fock { n: 0 }, policy)?;
    let one = build(StateKind::DisplacedFock { beta, n: 1 }, policy)?;
    Ok((wigner_at(&vac, zero, policy)? - FRAC_2_PI).abs().max((wigner_at(&one, beta, policy)? + FRAC_2_PI).abs()))
}

fn sigma_cancel(_: &NumericPolicy) -> Result<f64> {
    let p = SystemParams { kappa: 1.0, gamma: 1e-6, omega_m: 50.0, g0: 1e-3, n_th: 0.0, delta_c: 0.0 };
    let amp = C64::new(4.0, 2.0);
    let plus = DriveTone::new(25.0, amp, ToneTag::DisplacePlus);
    let minus = DriveTone::new(-25.0, amp, ToneTag::DisplaceMinus);
    Ok((single_tone_self_energy(&plus, &p, 50.0) + single_tone_self_energy(&minus, &p, 50.0)).norm())
}

fn bound_limit(_: &NumericPolicy) -> Result<f64> {
    let p = SystemParams { kappa: 1.0, gamma: 1e-6, omega_m: 100.0, g0: 1e-3, n_th: 0.0, delta_c: 0.0 };
    let exact = amplitude_bound(0.1, &p, 100.0, false)?;
    let resolved = amplitude_bound(0.1, &p, 100.0, true)?;
    Ok((exact - resolved).abs() / resolved)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        let t = run_validate(&RunConfig::default()).unwrap();
        assert_eq!(t.rows.len(), CHECKS.len());
        assert_eq!(t.failed_rows(), 0, "{:#?}", t.rows);
    }
}
