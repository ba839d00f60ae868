//! Pulsed write/read and photon counting.
//!
//! A write pulse with blue and red sidebands of couplings `G_B`, `G_R` yields
//! the herald coefficients `(k_R, k_B)`; a red-detuned read pulse swaps a
//! fraction `ε` of the phonons into photons, which are counted behind a
//! beamsplitter by two detectors that click at most once each.

use serde::{Deserialize, Serialize};

use crate::fock::DensityMatrix;
use crate::{Error, NumericPolicy, RegimeWarning, Result, C64};

/// Hardware constants, all rates in rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub kappa: f64,
    pub gamma: f64,
    pub omega_m: f64,
    pub g0: f64,
    #[serde(default)]
    pub n_th: f64,
    #[serde(default)]
    pub delta_c: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.kappa, self.gamma, self.omega_m, self.g0, self.n_th, self.delta_c];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite system parameter".into()));
        }
        if !(self.kappa > 0.0) || self.gamma < 0.0 || !(self.omega_m > 0.0) || self.g0 < 0.0 || self.n_th < 0.0 {
            return Err(Error::Domain(format!("unphysical system parameters {self:?}")));
        }
        Ok(())
    }

    pub fn check(&self) -> Vec<RegimeWarning> {
        let mut w = Vec::new();
        if self.kappa >= self.omega_m {
            w.push(RegimeWarning::new(
                "resolved-sideband",
                format!("κ = {} is not below ω_m = {}", self.kappa, self.omega_m),
            ));
        }
        if self.delta_c.abs() > self.kappa / 10.0 {
            w.push(RegimeWarning::new("detuning", format!("|Δ_c| = {} exceeds κ/10", self.delta_c.abs())));
        }
        w
    }

    /// Scale every rate by `2π` (inputs quoted as ordinary frequencies).
    pub fn from_hz(mut self) -> Self {
        let s = 2.0 * std::f64::consts::PI;
        self.kappa *= s;
        self.gamma *= s;
        self.omega_m *= s;
        self.g0 *= s;
        self.delta_c *= s;
        self
    }
}

/// Intracavity amplitude `ā = Ω/(κ/2 − i(Δ_c + ω_drive))` of a tone at
/// `ω_drive` relative to the mean drive frequency.
pub fn cavity_amplitude(omega_drive: f64, omega: C64, p: &SystemParams) -> C64 {
    omega / C64::new(p.kappa / 2.0, -(p.delta_c + omega_drive))
}

/// Write pulse. The couplings are rotated by a common phase so that
/// `Im(G_R G_B) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulsePlan {
    pub g_r: C64,
    pub g_b: C64,
    pub tau_w: f64,
    pub kappa: f64,
    pub gamma_r: f64,
    pub gamma_b: f64,
    /// `𝒢_w = (γ_R − γ_B)/2`
    pub g_w: f64,
}

impl PulsePlan {
    pub fn new(g_r: C64, g_b: C64, tau_w: f64, kappa: f64) -> Result<Self> {
        if !(tau_w >= 0.0) || !tau_w.is_finite() || !(kappa > 0.0) {
            return Err(Error::Domain(format!("τ_w = {tau_w}, κ = {kappa}")));
        }
        let prod = g_r * g_b;
        let (g_r, g_b) = if prod.norm() > 0.0 {
            let rot = C64::from_polar(1.0, -prod.arg() / 2.0);
            (g_r * rot, g_b * rot)
        } else {
            (g_r, g_b)
        };
        let gamma_r = 4.0 * g_r.norm_sqr() / kappa;
        let gamma_b = 4.0 * g_b.norm_sqr() / kappa;
        Ok(Self { g_r, g_b, tau_w, kappa, gamma_r, gamma_b, g_w: (gamma_r - gamma_b) / 2.0 })
    }

    pub fn check(&self, p: Option<&SystemParams>) -> Vec<RegimeWarning> {
        let mut w = Vec::new();
        for (name, g, gam) in [("G_R", self.g_r, self.gamma_r), ("G_B", self.g_b, self.gamma_b)] {
            if g.norm() > self.kappa / 10.0 {
                w.push(RegimeWarning::new("adiabatic", format!("|{name}| = {} exceeds κ/10", g.norm())));
            }
            if gam * self.tau_w > 0.1 {
                w.push(RegimeWarning::new(
                    "short-pulse",
                    format!("γτ_w = {} for {name} exceeds 0.1", gam * self.tau_w),
                ));
            }
        }
        if let Some(p) = p {
            let decoherence = self.tau_w * p.gamma * (p.n_th + 1.0);
            if decoherence > 0.1 {
                w.push(RegimeWarning::new("bath", format!("τ_w γ(n_th+1) = {decoherence} exceeds 0.1")));
            }
        }
        w
    }
}

/// `(k_R, k_B)` from `cos√(|k_R|² − |k_B|²) = e^{−𝒢_wτ_w}` and `k_R/k_B = G_R/G_B`.
///
/// `k_B` is real and non-negative. For `𝒢_w < 0` the cosine becomes a
/// hyperbolic cosine of `√(|k_B|² − |k_R|²)`.
pub fn pulse_coefficients(plan: &PulsePlan) -> (C64, C64) {
    let u = plan.g_w * plan.tau_w;
    // x = |k_R|² − |k_B|²
    let x = if u >= 0.0 {
        // arccos(e^{−u}) = 2 asin(√((1 − e^{−u})/2))
        let s = 2.0 * (-(-u).exp_m1() / 2.0).sqrt().asin();
        s * s
    } else {
        // arccosh(1 + t) = ln(1 + t + √(t(t+2)))
        let t = (-u).exp_m1();
        let a = (t + (t * (t + 2.0)).sqrt()).ln_1p();
        -a * a
    };
    if plan.g_b.norm() == 0.0 {
        if plan.g_r.norm() == 0.0 {
            return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        }
        return (plan.g_r / plan.g_r.norm() * x.max(0.0).sqrt(), C64::new(0.0, 0.0));
    }
    // |k_B|² = x/(λ² − 1) = γ_Bτ_w · x/(2u)
    let h = if u.abs() < 1e-4 { 1.0 - u / 3.0 + 2.0 / 45.0 * u * u } else { x / (2.0 * u) };
    let kb2 = plan.gamma_b * plan.tau_w * h;
    let kb = kb2.sqrt();
    (plan.g_r / plan.g_b * kb, C64::new(kb, 0.0))
}

/// `ε = 1 − e^{−2𝒢_rτ_r}` with `𝒢_r = 2|G_R|²/κ`.
pub fn readout_conversion(g_r: C64, kappa: f64, tau_r: f64) -> Result<f64> {
    if !(tau_r >= 0.0) || !(kappa > 0.0) {
        return Err(Error::Domain(format!("τ_r = {tau_r}, κ = {kappa}")));
    }
    let rate = 2.0 * g_r.norm_sqr() / kappa;
    if tau_r.is_infinite() {
        return Ok(if rate > 0.0 { 1.0 } else { 0.0 });
    }
    Ok(-(-2.0 * rate * tau_r).exp_m1())
}

/// Detection efficiency `η`, readout conversion `ε` and beamsplitter ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionModel {
    pub eta: f64,
    pub epsilon: f64,
    #[serde(default = "half")]
    pub split: f64,
}

fn half() -> f64 {
    0.5
}

impl DetectionModel {
    pub fn new(eta: f64, epsilon: f64, split: f64) -> Result<Self> {
        for (name, v) in [("eta", eta), ("epsilon", epsilon), ("split", split)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(Self { eta, epsilon, split })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.eta, self.epsilon, self.split).map(|_| ())
    }

    /// Per-phonon detection probability `εη`.
    pub fn eps_eta(&self) -> f64 {
        self.epsilon * self.eta
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClickProbabilities {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

/// Click probabilities of two saturating detectors behind a beamsplitter.
///
/// Each phonon yields a detected photon with probability `εη`; a detected
/// photon reaches detector A with probability `split`.
pub fn click_probabilities(rho: &DensityMatrix, det: &DetectionModel) -> ClickProbabilities {
    clicks_from_distribution(&rho.populations(), det)
}

pub fn clicks_from_distribution(p: &[f64], det: &DetectionModel) -> ClickProbabilities {
    let q = det.eps_eta();
    let qa = q * det.split;
    let qb = q * (1.0 - det.split);
    let (la, lb, lc) = (ln_1m(qa), ln_1m(qb), ln_1m(q));
    // ln(ab/c) with ab/c = 1 + q²s(1−s)/(1−q)
    let lcross = if q < 1.0 { (qa * qb / (1.0 - q)).ln_1p() } else { f64::INFINITY };

    let (mut any, mut both) = (0.0, 0.0);
    for (n, &w) in p.iter().enumerate().skip(1) {
        let n = n as f64;
        // P(some click) = 1 − c^n
        any += w * -(n * lc).exp_m1();
        // P(both) = 1 − a^n − b^n + c^n = (1−a^n)(1−b^n) − (a^n b^n − c^n)
        let miss_a = -(n * la).exp_m1();
        let miss_b = -(n * lb).exp_m1();
        let excess = if q < 1.0 { (n * lc).exp() * (n * lcross).exp_m1() } else { (n * (la + lb)).exp() };
        both += w * (miss_a * miss_b - excess);
    }
    let total: f64 = p.iter().sum();
    let (any, both) = (any / total, both / total);
    ClickProbabilities { p0: 1.0 - any, p1: any - both, p2: both }
}

/// `ln(1 − q)`, `−∞` at `q = 1`.
fn ln_1m(q: f64) -> f64 {
    (-q).ln_1p()
}

/// Binomially thinned distribution `Σ_n P(n) C(n,k) q^k (1−q)^{n−k}`.
pub fn thinned_distribution(p: &[f64], q: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("thinning probability {q}")));
    }
    let n_max = p.len();
    if q == 0.0 || q == 1.0 {
        let mut out = vec![0.0; n_max];
        let total: f64 = p.iter().sum();
        if q == 0.0 {
            out[0] = total;
        } else {
            out.copy_from_slice(p);
        }
        return Ok(out);
    }
    let mut ln_fact = vec![0.0; n_max + 1];
    for k in 1..=n_max {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let (lq, l1q) = (q.ln(), ln_1m(q));
    let mut out = vec![0.0; n_max];
    for (n, &w) in p.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (k, slot) in out.iter_mut().enumerate().take(n + 1) {
            let ln_pmf = ln_fact[n] - ln_fact[k] - ln_fact[n - k] + k as f64 * lq + (n - k) as f64 * l1q;
            *slot += w * ln_pmf.exp();
        }
    }
    Ok(out)
}

/// Mandel Q of a number distribution.
pub fn distribution_q(p: &[f64], policy: &NumericPolicy) -> Result<f64> {
    let m = crate::fock::distribution_moments(p);
    if !(m.mean > policy.min_mean_number) {
        return Err(Error::UndefinedQ { mean: m.mean });
    }
    Ok(m.variance / m.mean - 1.0)
}

/// `Q ≈ (4p₂/p₁ − p₁)/(εη)`, valid for `εη⟨n⟩ ≪ 1`.
pub fn q_from_clicks(p1: f64, p2: f64, eps_eta: f64) -> Result<f64> {
    if !(p1 > 0.0) {
        return Err(Error::Degenerate(format!("click estimator needs p1 > 0, got {p1}")));
    }
    if !(eps_eta > 0.0) {
        return Err(Error::Domain(format!("εη = {eps_eta}")));
    }
    Ok((4.0 * p2 / p1 - p1) / eps_eta)
}
