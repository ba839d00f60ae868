//! Mandel `Q = ⟨Δn²⟩/⟨n⟩ − 1`: numerically from a density matrix and from the
//! closed forms for the heralded state.

use std::f64::consts::FRAC_2_PI;

use nalgebra::DMatrix;

use crate::fock::{displacement_unchecked, mul, number_moments, required_dim, DensityMatrix, FockDim};
use crate::{Error, NumericPolicy, RegimeWarning, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QMethod {
    Numeric,
    HighdispPure,
    HighdispThermal,
    ConditionedAnalytic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QReport {
    pub q: f64,
    pub mean_n: f64,
    pub var_n: f64,
    pub method: QMethod,
}

pub fn mandel_q(rho: &DensityMatrix, policy: &NumericPolicy) -> Result<QReport> {
    let m = number_moments(rho);
    if !(m.mean > policy.min_mean_number) {
        return Err(Error::UndefinedQ { mean: m.mean });
    }
    Ok(QReport { q: m.variance / m.mean - 1.0, mean_n: m.mean, var_n: m.variance, method: QMethod::Numeric })
}

/// High-displacement limit `2[(1+2n_m − |r|²cos2φ)/(1+2n_m+|r|²)² + n_m]`.
///
/// With `n_m = 0` this is the pure-state form `2(1 − |r|²cos2φ)/(1+|r|²)²`.
pub fn q_highdisp(r_mag: f64, phi: f64, n_m: f64) -> f64 {
    highdisp(r_mag * r_mag, (2.0 * phi).cos(), n_m)
}

/// [`q_highdisp`] with `cos 2φ` taken from `βr` directly.
pub fn q_highdisp_complex(r: C64, beta: C64, n_m: f64) -> f64 {
    let z = beta * r;
    let cos2phi = if z.norm() == 0.0 { 0.0 } else { (z * z).re / z.norm_sqr() };
    highdisp(r.norm_sqr(), cos2phi, n_m)
}

fn highdisp(r2: f64, cos2phi: f64, n_m: f64) -> f64 {
    let a = 1.0 + 2.0 * n_m;
    2.0 * ((a - r2 * cos2phi) / ((a + r2) * (a + r2)) + n_m)
}

/// Largest `n_m` for which the optimally chosen `|r| = √(3(1+2n_m))` still
/// gives a negative high-displacement Q. Found by bisection.
pub fn thermal_threshold() -> f64 {
    let f = |n: f64| q_highdisp((3.0 * (1.0 + 2.0 * n)).sqrt(), 0.0, n);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Moments of `b_n = b − β` in the heralded displaced-thermal state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionedCorrelators {
    /// `⟨b_n†b_n†b_n b_n⟩_c`
    pub n4: f64,
    /// `⟨b_n†b_n b_n⟩_c`
    pub n3: C64,
    /// `⟨b_n†b_n⟩_c`
    pub n2: f64,
    /// `⟨b_n b_n⟩_c`
    pub bb: C64,
    /// `⟨b_n⟩_c`
    pub b1: C64,
    /// `D = |β|²(1+|r|²) + (2|β|² + |r|² − 2Re(βr))n_m`
    pub denominator: f64,
}

/// Conditioned noise correlators of `P(D(β)ρ_th D†(β))P†` with `P ∝ (r−β*)/β·b + b†`.
///
/// The four-point term uses `|β|²(2 + 2n_m(1−|r|²))` inside the bracket; this
/// is what the Wick contraction of the thermal moments gives and what the
/// dense-matrix computation reproduces.
pub fn conditioned_correlators(r: C64, beta: C64, n_m: f64, policy: &NumericPolicy) -> Result<ConditionedCorrelators> {
    if !(n_m >= 0.0) || !n_m.is_finite() {
        return Err(Error::Domain(format!("n_m = {n_m}")));
    }
    let b2 = beta.norm_sqr();
    let r2 = r.norm_sqr();
    let d = b2 * (1.0 + r2) + (2.0 * b2 + r2 - 2.0 * (beta * r).re) * n_m;
    if !(d > policy.min_correlator_denominator) {
        return Err(Error::Degenerate(format!("correlator denominator D = {d:e}")));
    }
    let rb = r * beta * (r.conj() - beta);
    let b1 = (rb * n_m + r.conj() * b2 * (1.0 + n_m)) / d;
    Ok(ConditionedCorrelators {
        n4: 2.0 * n_m * (3.0 * d * n_m + b2 * (2.0 + 2.0 * n_m * (1.0 - r2))) / d,
        n3: b1 * (2.0 * n_m),
        n2: (2.0 * d * n_m + b2 * (1.0 + n_m * (1.0 - r2))) / d,
        bb: beta * (r.conj() - beta) * (2.0 * n_m * (1.0 + n_m) / d),
        b1,
        denominator: d,
    })
}

/// Four-point correlator with `|β|²(1 + 2n_m(1−|r|²))` in the bracket, as it
/// appears in print. Kept to document the discrepancy with
/// [`conditioned_correlators`].
pub fn printed_four_point(r: C64, beta: C64, n_m: f64) -> f64 {
    let b2 = beta.norm_sqr();
    let r2 = r.norm_sqr();
    let d = b2 * (1.0 + r2) + (2.0 * b2 + r2 - 2.0 * (beta * r).re) * n_m;
    2.0 * n_m * (3.0 * d * n_m + b2 * (1.0 + 2.0 * n_m * (1.0 - r2))) / d
}

/// Assemble `Q` from the correlators with `n = |β|² + X`,
/// `X = ⟨b_n†b_n⟩ + 2Re(β*⟨b_n⟩)`.
pub fn q_from_correlators(c: &ConditionedCorrelators, beta: C64, policy: &NumericPolicy) -> Result<QReport> {
    let b2 = beta.norm_sqr();
    let bc = beta.conj();
    let x = c.n2 + 2.0 * (bc * c.b1).re;
    let num = 2.0 * b2 * c.n2 + 2.0 * (bc * bc * c.bb).re + 4.0 * (bc * c.n3).re + c.n4 - x * x;
    let mean = b2 + x;
    if !(mean > policy.min_mean_number) {
        return Err(Error::UndefinedQ { mean });
    }
    Ok(QReport { q: num / mean, mean_n: mean, var_n: mean + num, method: QMethod::ConditionedAnalytic })
}

/// Finite-`β` Mandel Q of the heralded displaced-thermal state.
pub fn q_conditioned_analytic(r: C64, beta: C64, n_m: f64, policy: &NumericPolicy) -> Result<QReport> {
    let c = conditioned_correlators(r, beta, n_m, policy)?;
    q_from_correlators(&c, beta, policy)
}

/// Deviations of the drive settings from `(λ̄, θ̄)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensitivityInput {
    pub delta_lambda: f64,
    pub delta_theta: f64,
    pub beta: C64,
    pub n_m: f64,
}

impl SensitivityInput {
    /// The quadratic expansion is only meaningful for small deviations.
    pub fn check(&self, policy: &NumericPolicy) -> Vec<RegimeWarning> {
        let mut w = Vec::new();
        let lim = policy.sensitivity_soft_limit;
        if self.delta_lambda.abs() > lim || self.delta_theta.abs() > lim {
            w.push(RegimeWarning::new(
                "sensitivity-expansion",
                format!("|Δλ|={}, |Δθ|={} exceed {lim}", self.delta_lambda.abs(), self.delta_theta.abs()),
            ));
        }
        w
    }
}

/// `ΔQ = |β|²/(4(1+2n_m)²)·(¾Δλ² + Δθ²)`.
pub fn delta_q_sensitivity(s: &SensitivityInput) -> f64 {
    let a = 1.0 + 2.0 * s.n_m;
    s.beta.norm_sqr() / (4.0 * a * a) * (0.75 * s.delta_lambda * s.delta_lambda + s.delta_theta * s.delta_theta)
}

/// Wigner function `W(α) = (2/π)Tr[D(−α)ρD(α)Π]`.
///
/// `ρ` is embedded in a space large enough for the shift by `α`; the shifted
/// state's population in the top levels is checked afterwards.
pub fn wigner_at(rho: &DensityMatrix, alpha: C64, policy: &NumericPolicy) -> Result<f64> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::Domain(format!("non-finite α = {alpha}")));
    }
    let n = rho.dim();
    let reach = (n as f64).sqrt() + alpha.norm();
    let big = n.max(required_dim(reach, 0.0, 0, policy));
    let mut padded = DMatrix::zeros(big, big);
    padded.view_mut((0, 0), (n, n)).copy_from(rho.elements());
    let d = displacement_unchecked(-alpha, FockDim::new(big)?);
    let shifted = mul(&mul(d.elements(), &padded), &d.elements().adjoint());
    let margin = (policy.truncation_margin as usize).min(big);
    let boundary: f64 = (big - margin..big).map(|k| shifted[(k, k)].re).sum();
    if boundary > policy.boundary_population_tol {
        return Err(Error::Truncation { required: big + margin, actual: big });
    }
    let parity: f64 = (0..big).map(|k| if k % 2 == 0 { shifted[(k, k)].re } else { -shifted[(k, k)].re }).sum();
    Ok(FRAC_2_PI * parity)
}
