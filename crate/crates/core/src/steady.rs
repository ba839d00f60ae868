//! Continuous multi-tone driving in the linearized, adiabatic steady state.
//!
//! Tones `Ω_j e^{−iω_j t}` (frequencies relative to the cavity resonance)
//! renormalize the mechanics through the self-energy `Σ`, displace it
//! coherently through beat notes at the mechanical frequency and heat it
//! through Stokes scattering.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::pulse::SystemParams;
use crate::{Error, NumericPolicy, RegimeWarning, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToneTag {
    Cool,
    DisplacePlus,
    DisplaceMinus,
    MeasRed,
    MeasBlue,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveTone {
    /// Detuning from the cavity resonance, rad/s.
    pub omega: f64,
    /// Drive amplitude `Ω_j`, √(photon flux).
    pub amplitude: C64,
    #[serde(default = "custom")]
    pub tag: ToneTag,
}

fn custom() -> ToneTag {
    ToneTag::Custom
}

impl DriveTone {
    pub fn new(omega: f64, amplitude: C64, tag: ToneTag) -> Self {
        Self { omega, amplitude, tag }
    }

    /// `ā_j = Ω_j/(κ/2 − iω_j)`
    pub fn cavity_amplitude(&self, kappa: f64) -> C64 {
        self.amplitude / C64::new(kappa / 2.0, -self.omega)
    }
}

fn check_tones(tones: &[DriveTone]) -> Result<()> {
    for t in tones {
        if !t.omega.is_finite() || !t.amplitude.re.is_finite() || !t.amplitude.im.is_finite() {
            return Err(Error::Domain(format!("non-finite drive tone {t:?}")));
        }
    }
    Ok(())
}

/// Anti-Stokes and Stokes coefficients contributed by one tone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SidebandPair {
    pub k_r: C64,
    pub k_b: C64,
}

/// `k_R,j = −ig₀ā_j/(κ/2 − i(ω_j + ω̃_m))`, `k_B,j = −ig₀ā_j/(κ/2 − i(ω_j − ω̃_m))`.
pub fn sideband_coefficients(tones: &[DriveTone], p: &SystemParams, omega_m_eff: f64) -> Vec<SidebandPair> {
    let half = p.kappa / 2.0;
    tones
        .iter()
        .map(|t| {
            let a = t.cavity_amplitude(p.kappa) * C64::new(0.0, -p.g0);
            SidebandPair {
                k_r: a / C64::new(half, -(t.omega + omega_m_eff)),
                k_b: a / C64::new(half, -(t.omega - omega_m_eff)),
            }
        })
        .collect()
}

/// Self-energy of one tone,
/// `−ig₀²|ā_j|²[1/(κ/2 − i(ω̃+ω_j)) − 1/(κ/2 − i(ω̃−ω_j))]`.
pub fn single_tone_self_energy(tone: &DriveTone, p: &SystemParams, omega_m_eff: f64) -> C64 {
    let a2 = tone.cavity_amplitude(p.kappa).norm_sqr();
    let half = p.kappa / 2.0;
    let bracket = C64::new(half, -(omega_m_eff + tone.omega)).inv() - C64::new(half, -(omega_m_eff - tone.omega)).inv();
    C64::new(0.0, -p.g0 * p.g0 * a2) * bracket
}

/// Renormalized mechanics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveMechanics {
    pub sigma: C64,
    pub gamma_eff: f64,
    pub omega_m_eff: f64,
    pub iterations: usize,
}

/// `γ̃ = γ − 2Im Σ`, `ω̃_m = ω_m + Re Σ(ω̃_m)`, the latter by damped fixed-point
/// iteration.
pub fn effective_mechanics(
    tones: &[DriveTone],
    p: &SystemParams,
    policy: &NumericPolicy,
) -> Result<EffectiveMechanics> {
    check_tones(tones)?;
    let sigma_at = |w: f64| tones.iter().map(|t| single_tone_self_energy(t, p, w)).sum::<C64>();
    let d = policy.fixed_point_damping;
    let mut w = p.omega_m;
    let mut residual = f64::INFINITY;
    for it in 1..=policy.fixed_point_max_iter {
        let target = p.omega_m + sigma_at(w).re;
        let next = (1.0 - d) * w + d * target;
        residual = (target - w).abs() / w.abs().max(f64::MIN_POSITIVE);
        w = next;
        if !w.is_finite() {
            break;
        }
        if residual <= policy.fixed_point_rel_tol {
            let sigma = sigma_at(w);
            return Ok(EffectiveMechanics {
                sigma,
                gamma_eff: p.gamma - 2.0 * sigma.im,
                omega_m_eff: w,
                iterations: it,
            });
        }
    }
    Err(Error::Convergence { iterations: policy.fixed_point_max_iter, residual })
}

/// Coherent mechanical motion `b̄(t) ≈ β e^{−iω̃_m t}` and the static shift `b̄_c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Displacement {
    pub beta: C64,
    /// Sum of the moduli of the off-resonant beat-note amplitudes.
    pub residual: f64,
    pub b_c: C64,
}

/// `b̄(t) = −ig₀Σ_{j≠k} ā_j ā_k*/(γ̃/2 + iω̃_m − i(ω_j − ω_k))`. Pairs with
/// `ω_j − ω_k = ω̃_m` (to the policy's relative tolerance) make up `β`.
pub fn coherent_displacement(
    tones: &[DriveTone],
    p: &SystemParams,
    mech: &EffectiveMechanics,
    policy: &NumericPolicy,
) -> Displacement {
    let amps: Vec<C64> = tones.iter().map(|t| t.cavity_amplitude(p.kappa)).collect();
    let w = mech.omega_m_eff;
    let mut beta = C64::new(0.0, 0.0);
    let mut residual = 0.0;
    for (j, tj) in tones.iter().enumerate() {
        for (k, tk) in tones.iter().enumerate() {
            if j == k {
                continue;
            }
            let beat = tj.omega - tk.omega;
            let term = C64::new(0.0, -p.g0) * amps[j] * amps[k].conj() / C64::new(mech.gamma_eff / 2.0, w - beat);
            if (beat - w).abs() <= policy.beat_resonance_rel_tol * w.abs() {
                beta += term;
            } else {
                residual += term.norm();
            }
        }
    }
    let static_sum: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let b_c = C64::new(0.0, -p.g0 * static_sum) / C64::new(mech.gamma_eff / 2.0, w);
    Displacement { beta, residual, b_c }
}

/// Optical occupation and total effective occupation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalBudget {
    pub n_o: f64,
    pub n_m: f64,
}

/// `n_o = Σ_j g₀²κ|ā_j|²/(γ̃(κ²/4 + (ω̃_m − ω_j)²))` (Stokes scattering of each
/// tone) and `n_m = (γ/γ̃)n_th + n_o`. Cross terms between tones average out
/// and are not included.
pub fn thermal_budget(tones: &[DriveTone], p: &SystemParams, mech: &EffectiveMechanics) -> ThermalBudget {
    let k2 = p.kappa * p.kappa / 4.0;
    let n_o: f64 = tones
        .iter()
        .map(|t| {
            let a2 = t.cavity_amplitude(p.kappa).norm_sqr();
            let det = mech.omega_m_eff - t.omega;
            p.g0 * p.g0 * p.kappa * a2 / (mech.gamma_eff * (k2 + det * det))
        })
        .sum();
    ThermalBudget { n_o, n_m: p.gamma / mech.gamma_eff * p.n_th + n_o }
}

/// Bound on `|β|` from two displacement drives at `±ω̃_m/2` keeping `n_o < ε`.
///
/// Exact: `(κ²+ω̃²)(κ²+9ω̃²)/(4g₀κ(κ²+5ω̃²))·ε`; resolved sideband:
/// `9ω̃²/(20κg₀)·ε`.
pub fn amplitude_bound(epsilon: f64, p: &SystemParams, omega_m_eff: f64, resolved_sideband: bool) -> Result<f64> {
    if !(epsilon > 0.0) || !(p.g0 > 0.0) {
        return Err(Error::Domain(format!("amplitude bound needs ε > 0 and g₀ > 0 (ε={epsilon}, g₀={})", p.g0)));
    }
    let (k, w2) = (p.kappa, omega_m_eff * omega_m_eff);
    let k2 = k * k;
    if resolved_sideband {
        return Ok(9.0 * w2 / (20.0 * k * p.g0) * epsilon);
    }
    Ok((k2 + w2) * (k2 + 9.0 * w2) / (4.0 * p.g0 * k * (k2 + 5.0 * w2)) * epsilon)
}

/// Self-energy split by tone role.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SigmaContributions {
    pub cooling: C64,
    pub displacement: C64,
    pub measurement: C64,
    pub custom: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateReport {
    pub sigma: C64,
    pub gamma_eff: f64,
    pub omega_m_eff: f64,
    pub n_o: f64,
    pub n_m: f64,
    pub beta: C64,
    pub beta_residual: f64,
    pub b_c: C64,
    pub fixed_point_iters: usize,
    pub contributions: SigmaContributions,
    pub warnings: Vec<RegimeWarning>,
}

pub fn steady_state(tones: &[DriveTone], p: &SystemParams, policy: &NumericPolicy) -> Result<SteadyStateReport> {
    p.validate()?;
    let mech = effective_mechanics(tones, p, policy)?;
    if !(mech.gamma_eff > 0.0) {
        return Err(Error::Domain(format!("no steady state: effective damping γ̃ = {:e}", mech.gamma_eff)));
    }
    let disp = coherent_displacement(tones, p, &mech, policy);
    let budget = thermal_budget(tones, p, &mech);

    let mut contributions = SigmaContributions::default();
    for t in tones {
        let s = single_tone_self_energy(t, p, mech.omega_m_eff);
        match t.tag {
            ToneTag::Cool => contributions.cooling += s,
            ToneTag::DisplacePlus | ToneTag::DisplaceMinus => contributions.displacement += s,
            ToneTag::MeasRed | ToneTag::MeasBlue => contributions.measurement += s,
            ToneTag::Custom => contributions.custom += s,
        }
    }

    let mut warnings = p.check();
    if p.gamma >= p.kappa / 10.0 || p.g0 >= p.kappa / 10.0 {
        warnings.push(RegimeWarning::new("adiabatic", format!("γ = {}, g₀ = {} not ≪ κ = {}", p.gamma, p.g0, p.kappa)));
    }
    if mech.gamma_eff < p.gamma {
        warnings.push(RegimeWarning::new("anti-damping", format!("γ̃ = {:e} below γ = {:e}", mech.gamma_eff, p.gamma)));
    }
    if mech.gamma_eff >= p.kappa / 10.0 {
        warnings.push(RegimeWarning::new("weak-coupling", format!("γ̃ = {:e} not ≪ κ", mech.gamma_eff)));
    }

    Ok(SteadyStateReport {
        sigma: mech.sigma,
        gamma_eff: mech.gamma_eff,
        omega_m_eff: mech.omega_m_eff,
        n_o: budget.n_o,
        n_m: budget.n_m,
        beta: disp.beta,
        beta_residual: disp.residual,
        b_c: disp.b_c,
        fixed_point_iters: mech.iterations,
        contributions,
        warnings,
    })
}

/// Amplitudes of the five-tone continuous-wave plan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiveTonePlan {
    pub displace_plus: C64,
    pub displace_minus: C64,
    pub cool: C64,
    pub meas_red: C64,
    pub meas_blue: C64,
    /// Shift of the measurement tones, rad/s.
    pub delta_proj: f64,
}

impl FiveTonePlan {
    /// Displacement at `±ω̃_m/2`, cooling at `−ω̃_m`, measurement at `∓ω̃_m + Δ_proj`.
    pub fn tones(&self, omega_m_eff: f64) -> Vec<DriveTone> {
        let w = omega_m_eff;
        vec![
            DriveTone::new(w / 2.0, self.displace_plus, ToneTag::DisplacePlus),
            DriveTone::new(-w / 2.0, self.displace_minus, ToneTag::DisplaceMinus),
            DriveTone::new(-w, self.cool, ToneTag::Cool),
            DriveTone::new(-w + self.delta_proj, self.meas_red, ToneTag::MeasRed),
            DriveTone::new(w + self.delta_proj, self.meas_blue, ToneTag::MeasBlue),
        ]
    }
}

/// Lorentzian filter of full width `width` centred at `center` (rad/s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub center: f64,
    pub width: f64,
}

impl FilterSpec {
    pub fn check(&self, p: &SystemParams) -> Vec<RegimeWarning> {
        let mut w = Vec::new();
        if self.width > p.omega_m / 10.0 {
            w.push(RegimeWarning::new("filter-width", format!("W = {} not ≪ ω_m", self.width)));
        }
        if p.delta_c.abs() > self.width / 10.0 {
            w.push(RegimeWarning::new("filter-detuning", format!("|Δ_c| = {} not ≪ W", p.delta_c.abs())));
        }
        w
    }
}

/// `η = 1/(1 − 2iΔ_proj/W)`.
pub fn filter_leakage(delta_proj: f64, width: f64) -> Result<C64> {
    if !(width > 0.0) {
        return Err(Error::Domain(format!("filter width {width}")));
    }
    if delta_proj.is_infinite() {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(C64::new(1.0, -2.0 * delta_proj / width).inv())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementTime {
    pub t_c: f64,
    pub period: f64,
    /// `||ηk_cool| − |T||/|T|` with `T = k_B(r−β*)/β − k_R` (absolute if `T = 0`).
    pub modulus_mismatch: f64,
}

/// Smallest `t_c ≥ 0` with `(k_R + ηk_cool e^{iΔ_proj t_c})/k_B = (r − β*)/β`.
///
/// Only the phase can be matched by timing. When `|ηk_cool|` falls short of
/// the required modulus by more than the tolerance there is no solution;
/// otherwise the phase-matching time is returned with the residual modulus
/// mismatch.
#[allow(clippy::too_many_arguments)]
pub fn ideal_measurement_time(
    k_r: C64,
    k_b: C64,
    k_cool: C64,
    eta: C64,
    delta_proj: f64,
    r_target: C64,
    beta: C64,
    policy: &NumericPolicy,
) -> Result<MeasurementTime> {
    if beta.norm() == 0.0 {
        return Err(Error::Degenerate("measurement time needs β ≠ 0".into()));
    }
    let target = k_b * (r_target - beta.conj()) / beta - k_r;
    let source = eta * k_cool;
    let tol = policy.measurement_modulus_tol;
    let scale = target.norm().max(k_r.norm()).max(f64::MIN_POSITIVE);
    let period = if delta_proj != 0.0 { 2.0 * PI / delta_proj.abs() } else { f64::INFINITY };

    if target.norm() <= tol * scale && source.norm() <= tol * scale {
        return Ok(MeasurementTime { t_c: 0.0, period, modulus_mismatch: 0.0 });
    }
    let gap = (source.norm() - target.norm()).abs();
    let mismatch = if target.norm() > 0.0 { gap / target.norm() } else { gap };
    if source.norm() < target.norm() * (1.0 - tol) {
        return Err(Error::NoSolution { mismatch });
    }
    if target.norm() == 0.0 {
        // Only a vanishing leakage term can match a zero target.
        return Err(Error::NoSolution { mismatch });
    }
    let phase = (target / source).arg();
    if delta_proj == 0.0 {
        if phase.abs() <= tol {
            return Ok(MeasurementTime { t_c: 0.0, period, modulus_mismatch: mismatch });
        }
        return Err(Error::NoSolution { mismatch: (target - source).norm() / target.norm() });
    }
    let t_c = (phase / delta_proj).rem_euclid(period);
    Ok(MeasurementTime { t_c, period, modulus_mismatch: mismatch })
}
