//! `steady`: continuous multi-tone drive, flattened into a single row.

use super::{enforce, header, status_cell, warnings_cell, Cell, ResultTable, RunConfig};
use crate::pulse::SystemParams;
use crate::steady::{
    amplitude_bound, effective_mechanics, filter_leakage, ideal_measurement_time, sideband_coefficients, steady_state,
    DriveTone, FilterSpec, SteadyStateReport, ToneTag,
};
use crate::{Error, Result, C64};

const COLUMNS: [&str; 34] = [
    "sigma_re",
    "sigma_im",
    "gamma_eff",
    "omega_m_eff",
    "n_o",
    "n_m",
    "beta_re",
    "beta_im",
    "beta_abs",
    "beta_residual",
    "b_c_re",
    "b_c_im",
    "fixed_point_iters",
    "sigma_cooling_contribution_re",
    "sigma_cooling_contribution_im",
    "sigma_displacement_contribution_re",
    "sigma_displacement_contribution_im",
    "sigma_measurement_contribution_re",
    "sigma_measurement_contribution_im",
    "sigma_custom_contribution_re",
    "sigma_custom_contribution_im",
    "amplitude_bound",
    "amplitude_bound_resolved",
    "filter_eta_re",
    "filter_eta_im",
    "k_r_re",
    "k_r_im",
    "k_b_re",
    "k_b_im",
    "t_c",
    "t_c_period",
    "t_c_modulus_mismatch",
    "status",
    "warnings",
];

/// Tones of the `steady` section in rad/s. Five-tone plans are placed
/// relative to `ω̃_m`, which itself depends on the tones, so the placement is
/// iterated to self-consistency.
fn resolve_tones(cfg: &RunConfig, p: &SystemParams) -> Result<Vec<DriveTone>> {
    let scale = cfg.freq_scale();
    let custom: Vec<DriveTone> = cfg.steady.tones.iter().map(|t| DriveTone { omega: t.omega * scale, ..*t }).collect();
    let Some(mut plan) = cfg.steady.five_tone else {
        return Ok(custom);
    };
    plan.delta_proj *= scale;
    let build = |w: f64| custom.iter().copied().chain(plan.tones(w)).collect::<Vec<_>>();
    let policy = &cfg.policy;
    let mut w = p.omega_m;
    let mut residual = f64::INFINITY;
    for _ in 0..policy.fixed_point_max_iter {
        let next = effective_mechanics(&build(w), p, policy)?.omega_m_eff;
        residual = (next - w).abs() / w.abs();
        w = next;
        if residual <= policy.fixed_point_rel_tol {
            return Ok(build(w));
        }
    }
    Err(Error::Convergence { iterations: policy.fixed_point_max_iter, residual })
}

pub fn run_steady(cfg: &RunConfig) -> Result<ResultTable> {
    let p = cfg.system_rad()?;
    let scale = cfg.freq_scale();
    let filter = cfg.steady.filter.map(|f| FilterSpec { center: f.center * scale, width: f.width * scale });

    let mut report: Option<SteadyStateReport> = None;
    let mut bounds = (None, None);
    let mut eta = None;
    let mut k = None;
    let mut timing = None;
    let mut warnings = Vec::new();
    let status = (|| -> Result<()> {
        let tones = resolve_tones(cfg, &p)?;
        let r = steady_state(&tones, &p, &cfg.policy)?;
        warnings.extend(r.warnings.iter().cloned());
        let w = r.omega_m_eff;
        let beta = r.beta;
        report = Some(r);
        if let Some(f) = &filter {
            warnings.extend(f.check(&p));
        }
        if let Some(e) = cfg.steady.epsilon {
            bounds = (Some(amplitude_bound(e, &p, w, false)?), Some(amplitude_bound(e, &p, w, true)?));
        }
        let (Some(plan), Some(f)) = (cfg.steady.five_tone, filter) else {
            return Ok(());
        };
        let delta_proj = plan.delta_proj * scale;
        let leak = filter_leakage(delta_proj, f.width)?;
        eta = Some(leak);
        let ks = sideband_coefficients(&tones, &p, w);
        let zero = C64::new(0.0, 0.0);
        let (mut k_r, mut k_b, mut k_cool) = (zero, zero, zero);
        for (t, s) in tones.iter().zip(&ks) {
            match t.tag {
                ToneTag::MeasRed | ToneTag::MeasBlue => {
                    k_r += s.k_r;
                    k_b += s.k_b;
                }
                ToneTag::Cool => k_cool += s.k_r,
                _ => {}
            }
        }
        k = Some((k_r, k_b));
        if let Some(r_target) = cfg.steady.r_target {
            timing = Some(ideal_measurement_time(k_r, k_b, k_cool, leak, delta_proj, r_target, beta, &cfg.policy)?);
        }
        Ok(())
    })();

    let c = |z: Option<C64>| [Cell::opt(z.map(|z| z.re)), Cell::opt(z.map(|z| z.im))];
    let r = report.as_ref();
    let mut cells = Vec::with_capacity(COLUMNS.len());
    cells.extend(c(r.map(|r| r.sigma)));
    cells.push(Cell::opt(r.map(|r| r.gamma_eff)));
    cells.push(Cell::opt(r.map(|r| r.omega_m_eff)));
    cells.push(Cell::opt(r.map(|r| r.n_o)));
    cells.push(Cell::opt(r.map(|r| r.n_m)));
    cells.extend(c(r.map(|r| r.beta)));
    cells.push(Cell::opt(r.map(|r| r.beta.norm())));
    cells.push(Cell::opt(r.map(|r| r.beta_residual)));
    cells.extend(c(r.map(|r| r.b_c)));
    cells.push(Cell::opt(r.map(|r| r.fixed_point_iters as f64)));
    cells.extend(c(r.map(|r| r.contributions.cooling)));
    cells.extend(c(r.map(|r| r.contributions.displacement)));
    cells.extend(c(r.map(|r| r.contributions.measurement)));
    cells.extend(c(r.map(|r| r.contributions.custom)));
    cells.push(Cell::opt(bounds.0));
    cells.push(Cell::opt(bounds.1));
    cells.extend(c(eta));
    cells.extend(c(k.map(|k| k.0)));
    cells.extend(c(k.map(|k| k.1)));
    cells.push(Cell::opt(timing.map(|t| t.t_c)));
    cells.push(Cell::opt(timing.map(|t| t.period)));
    cells.push(Cell::opt(timing.map(|t| t.modulus_mismatch)));
    cells.push(status_cell(&status));
    cells.push(warnings_cell(&warnings));

    let mut table = header("steady", cfg, &COLUMNS);
    table.push_row(cells)?;
    enforce(cfg, &warnings)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::FiveTonePlan;

    fn cfg(omega_m: f64) -> RunConfig {
        RunConfig {
            system: Some(SystemParams { kappa: 1.0, gamma: 1e-6, omega_m, g0: 1e-3, n_th: 10.0, delta_c: 0.0 }),
            ..RunConfig::default()
        }
    }

    fn get(t: &ResultTable, name: &str) -> f64 {
        t.rows[0][t.column(name).unwrap()].as_f64().unwrap()
    }

    #[test]
    fn empty_tone_list_leaves_thermal_occupation() {
        let t = run_steady(&cfg(50.0)).unwrap();
        assert_eq!(t.failed_rows(), 0);
        assert_eq!(get(&t, "n_m"), 10.0);
        assert_eq!(get(&t, "n_o"), 0.0);
    }

    #[test]
    fn resolved_sideband_cooling_bound() {
        let mut c = cfg(50.0);
        // γ̃ = γ + 4g₀²|ā|²/κ ≈ 10³γ for |ā|² = 250 (κ = 1, g₀ = 10⁻³).
        let omega = -50.0;
        let a = (250.0f64).sqrt() * C64::new(0.5, -omega);
        c.steady.tones = vec![DriveTone::new(omega, a, ToneTag::Cool)];
        let t = run_steady(&c).unwrap();
        let w = get(&t, "omega_m_eff");
        let ratio = get(&t, "gamma_eff") / 1e-6;
        assert!((ratio - 1e3).abs() / 1e3 < 0.05, "{ratio}");
        let bound = (1.0 / (4.0 * w)).powi(2);
        assert!((get(&t, "n_o") / bound - 1.0).abs() < 0.01, "{} vs {bound}", get(&t, "n_o"));
    }

    #[test]
    fn symmetric_displacement_pair_cancels() {
        let mut c = cfg(50.0);
        let amp = C64::new(3.0, 1.0);
        c.steady.five_tone = Some(FiveTonePlan {
            displace_plus: amp,
            displace_minus: amp,
            cool: C64::new(0.0, 0.0),
            meas_red: C64::new(0.0, 0.0),
            meas_blue: C64::new(0.0, 0.0),
            delta_proj: 0.0,
        });
        let t = run_steady(&c).unwrap();
        assert_eq!(t.failed_rows(), 0, "{:?}", t.rows);
        assert!(get(&t, "sigma_displacement_contribution_re").abs() < 1e-12);
        assert!(get(&t, "sigma_displacement_contribution_im").abs() < 1e-12);
        assert!(get(&t, "beta_abs") > 0.0);
    }

    #[test]
    fn hz_units_scale_frequencies() {
        let mut c = cfg(50.0);
        c.units = super::super::Units::Hz;
        let t = run_steady(&c).unwrap();
        assert!((get(&t, "omega_m_eff") - 100.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn missing_system_is_config_error() {
        assert!(matches!(run_steady(&RunConfig::default()), Err(Error::Config(_))));
    }
}
