//! Heralding on a single ambiguous-sideband photon.
//!
//! Detection applies `P = k_R b + k_B b†` to the mechanical state. Writing
//! `r = β* + β k_R/k_B`, a coherent input `|β⟩` is mapped to the
//! superposition `r|β⟩ + |β,1⟩` of a coherent and a displaced one-phonon
//! state.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::fock::{
    displacement_unchecked, number_moments, required_dim, DensityMatrix, FockDim, OperatorKind, OperatorMatrix,
};
use crate::{Error, NumericPolicy, Result, C64};

/// Coefficients of the herald operator together with the initial displacement.
///
/// The global phase is fixed so that `k_B` is real and non-negative; only the
/// ratio `k_R/k_B` affects the conditional state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeraldSpec {
    k_r: C64,
    k_b: C64,
    beta: C64,
}

impl HeraldSpec {
    pub fn new(k_r: C64, k_b: C64, beta: C64) -> Result<Self> {
        for z in [k_r, k_b, beta] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::Domain(format!("non-finite herald parameter {z}")));
            }
        }
        if k_r.norm() == 0.0 && k_b.norm() == 0.0 {
            return Err(Error::Degenerate("k_R = k_B = 0".into()));
        }
        let (k_r, k_b) = if k_b.norm() > 0.0 {
            let phase = k_b.conj() / k_b.norm();
            (k_r * phase, C64::new(k_b.norm(), 0.0))
        } else {
            (k_r, k_b)
        };
        Ok(Self { k_r, k_b, beta })
    }

    /// Herald realizing a given `r` on top of `|β⟩`, normalized to `k_B = 1`.
    pub fn from_r(r: C64, beta: C64) -> Result<Self> {
        if beta.norm() == 0.0 {
            return Err(Error::Degenerate("r-parameterization needs β ≠ 0".into()));
        }
        Self::new((r - beta.conj()) / beta, C64::new(1.0, 0.0), beta)
    }

    pub fn k_r(&self) -> C64 {
        self.k_r
    }

    pub fn k_b(&self) -> C64 {
        self.k_b
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    /// `r = β* + β k_R/k_B`, `None` for pure phonon subtraction (`k_B = 0`).
    pub fn r(&self) -> Option<C64> {
        if self.k_b.norm() == 0.0 {
            None
        } else {
            Some(self.beta.conj() + self.beta * self.k_r / self.k_b)
        }
    }

    /// `P` as a dense matrix on `dim` levels (the top level's `b†` image is cut).
    pub fn projector(&self, dim: FockDim) -> OperatorMatrix {
        let n = dim.get();
        let mut m = DMatrix::zeros(n, n);
        for k in 1..n {
            let s = (k as f64).sqrt();
            m[(k - 1, k)] = self.k_r * s;
            m[(k, k - 1)] = self.k_b * s;
        }
        OperatorMatrix::new(m, OperatorKind::Herald)
    }
}

/// Experimental drive parameters: `λ = |G_R/G_B|`, `θ = arg(G_R G_B* β²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveRatio {
    pub lambda: f64,
    pub theta: f64,
}

impl DriveRatio {
    pub fn new(lambda: f64, theta: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() || !theta.is_finite() {
            return Err(Error::Domain(format!("invalid drive ratio λ={lambda}, θ={theta}")));
        }
        Ok(Self { lambda, theta: wrap_angle(theta) })
    }

    /// `k_R/k_B = G_R/G_B` implied by this ratio for displacement `β`.
    pub fn coupling_ratio(&self, beta: C64) -> C64 {
        C64::from_polar(self.lambda, self.theta - 2.0 * beta.arg())
    }

    /// Herald for this ratio with `k_B = 1`.
    pub fn herald(&self, beta: C64) -> Result<HeraldSpec> {
        HeraldSpec::new(self.coupling_ratio(beta), C64::new(1.0, 0.0), beta)
    }
}

/// Map into `(−π, π]`.
fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

pub fn drive_ratio_from_couplings(g_r: C64, g_b: C64, beta: C64) -> Result<DriveRatio> {
    if g_b.norm() == 0.0 {
        return Err(Error::Degenerate("G_B = 0".into()));
    }
    DriveRatio::new((g_r / g_b).norm(), (g_r * g_b.conj() * beta * beta).arg())
}

/// The superposition parameter and its phase `φ = arg(βr)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Superposition {
    pub r: C64,
    pub phi: f64,
    /// `r` vanished; `phi` is then set to 0.
    pub degenerate: bool,
}

/// `r = β*(1 + λe^{iθ})`.
pub fn r_from_drives(ratio: DriveRatio, beta: C64) -> Superposition {
    let (s, c) = ratio.theta.sin_cos();
    let mut factor = C64::new(1.0 + ratio.lambda * c, ratio.lambda * s);
    // sin(π) ≠ 0 in floating point: cancellation residue at the rounding level is zero.
    if factor.norm() <= 4.0 * f64::EPSILON * (1.0 + ratio.lambda) {
        factor = C64::new(0.0, 0.0);
    }
    let r = beta.conj() * factor;
    if r.norm() == 0.0 {
        return Superposition { r, phi: 0.0, degenerate: true };
    }
    Superposition { r, phi: factor.arg(), degenerate: false }
}

/// Sign choice in `λ̄ = 1 ± |r|/|β|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `λ̄ = 1 − |r|/|β|`, giving `φ = 0` (`r` parallel to `β*`).
    Lower,
    /// `λ̄ = 1 + |r|/|β|`, giving `φ = π`.
    Upper,
}

/// `|r|` minimizing the high-displacement Q at occupation `n_m`.
pub fn optimal_r(n_m: f64) -> f64 {
    (3.0 * (1.0 + 2.0 * n_m)).sqrt()
}

/// `(λ̄, θ̄ = π)` realizing `|r| = r_target_mag` with `cos 2φ = 1`; without a
/// target the Q-minimizing `|r| = √(3(1+2n_m))` is used.
pub fn optimal_drive_settings(r_target_mag: Option<f64>, n_m: f64, beta: C64, branch: Branch) -> Result<DriveRatio> {
    let b = beta.norm();
    if b == 0.0 {
        return Err(Error::Degenerate("optimal settings need β ≠ 0".into()));
    }
    let r = r_target_mag.unwrap_or_else(|| optimal_r(n_m.max(0.0)));
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("target |r| = {r}")));
    }
    let lambda = match branch {
        Branch::Lower => 1.0 - r / b,
        Branch::Upper => 1.0 + r / b,
    };
    if lambda <= 0.0 {
        return Err(Error::Domain(format!("lower branch needs |r| < |β| (|r|={r}, |β|={b})")));
    }
    DriveRatio::new(lambda, PI)
}

/// Heralded state `PρP†/Tr[P†Pρ]` and the herald weight `Tr[P†Pρ]`.
///
/// The weight is evaluated from the moments of `ρ`, so it does not depend on
/// the truncation; the part of `PρP†` pushed above the top level is added to
/// the output's trace deficit.
pub fn conditional_state(
    rho: &DensityMatrix,
    spec: &HeraldSpec,
    policy: &NumericPolicy,
) -> Result<(DensityMatrix, f64)> {
    let n = rho.dim();
    let r = rho.elements();
    let (kr, kb) = (spec.k_r(), spec.k_b());

    let mean = number_moments(rho).mean;
    // ⟨b†²⟩ = Σ_m ρ_{m,m+2} √((m+1)(m+2))
    let mut bd2 = C64::new(0.0, 0.0);
    for m in 0..n.saturating_sub(2) {
        bd2 += r[(m, m + 2)] * ((m + 1) as f64 * (m + 2) as f64).sqrt();
    }
    let weight = kr.norm_sqr() * mean + kb.norm_sqr() * (mean + 1.0) + 2.0 * (kr.conj() * kb * bd2).re;
    if !(weight > policy.min_herald_weight) {
        return Err(Error::ZeroLikelihood { weight });
    }

    let sq: Vec<f64> = (0..=n).map(|k| (k as f64).sqrt()).collect();
    // A = Pρ; (Pρ)_{ij} = k_R √(i+1) ρ_{i+1,j} + k_B √i ρ_{i−1,j}
    let a = DMatrix::from_fn(n, n, |i, j| {
        let mut v = C64::new(0.0, 0.0);
        if i + 1 < n {
            v += kr * sq[i + 1] * r[(i + 1, j)];
        }
        if i > 0 {
            v += kb * sq[i] * r[(i - 1, j)];
        }
        v
    });
    // (AP†)_{ij} = Σ_k A_{ik} conj(P_{jk})
    let (krc, kbc) = (kr.conj(), kb.conj());
    let out = DMatrix::from_fn(n, n, |i, j| {
        let mut v = C64::new(0.0, 0.0);
        if j + 1 < n {
            v += krc * sq[j + 1] * a[(i, j + 1)];
        }
        if j > 0 {
            v += kbc * sq[j] * a[(i, j - 1)];
        }
        v
    });
    let kept = out.trace().re;
    let lost = (1.0 - kept / weight).max(0.0);
    let rho_c = DensityMatrix::from_matrix(out, rho.trace_deficit() + lost)?;
    if rho_c.trace_deficit() > policy.max_trace_deficit {
        return Err(Error::Truncation { required: n + 1, actual: n });
    }
    Ok((rho_c, weight))
}

/// `(r|β⟩ + |β,1⟩)/√(1+|r|²)`.
pub fn ideal_superposition(r: C64, beta: C64, dim: FockDim, policy: &NumericPolicy) -> Result<DensityMatrix> {
    if !r.re.is_finite() || !r.im.is_finite() {
        return Err(Error::Domain(format!("non-finite r = {r}")));
    }
    dim.ensure(required_dim(beta.norm(), 0.0, 1, policy))?;
    let d = displacement_unchecked(beta, dim);
    let u = d.elements();
    // Scale so that the larger weight is 1; avoids overflow for huge |r|.
    let (c0, c1) = if r.norm() > 1.0 { (C64::new(1.0, 0.0), r.inv()) } else { (r, C64::new(1.0, 0.0)) };
    let psi: DVector<C64> = u.column(0) * c0 + u.column(1) * c1;
    DensityMatrix::from_pure(&psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fidelity, prepare_state, StateKind};
    use crate::mandel::mandel_q;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn coherent(beta: C64) -> DensityMatrix {
        let p = policy();
        let kind = StateKind::Coherent { beta };
        let dim = FockDim::new(required_dim(beta.norm(), 0.0, 1, &p)).unwrap();
        prepare_state(kind, dim, &p).unwrap()
    }

    #[test]
    fn global_phase_is_fixed_on_k_b() {
        let s = HeraldSpec::new(C64::new(0.0, 2.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)).unwrap();
        assert_eq!(s.k_b(), C64::new(1.0, 0.0));
        assert!((s.k_r() - C64::new(-2.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            HeraldSpec::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
            Err(Error::Degenerate(_))
        ));
        let sub = HeraldSpec::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert_eq!(sub.r(), None);
    }

    #[test]
    fn zero_r_gives_displaced_fock() {
        let beta = C64::new(2.0, -1.0);
        let rho = coherent(beta);
        let spec = HeraldSpec::from_r(C64::new(0.0, 0.0), beta).unwrap();
        let (rc, _) = conditional_state(&rho, &spec, &policy()).unwrap();
        let d = FockDim::new(rho.dim()).unwrap();
        let oracle = prepare_state(StateKind::DisplacedFock { beta, n: 1 }, d, &policy()).unwrap();
        assert!(fidelity(&rc, &oracle).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn phonon_addition_on_vacuum() {
        let vac = prepare_state(StateKind::Fock { n: 0 }, FockDim::new(6).unwrap(), &policy()).unwrap();
        let spec = HeraldSpec::new(C64::new(0.3, 0.7), C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let (rc, w) = conditional_state(&vac, &spec, &policy()).unwrap();
        assert!((rc.elements()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!((w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_subtraction_on_vacuum_is_impossible() {
        let vac = prepare_state(StateKind::Fock { n: 0 }, FockDim::new(6).unwrap(), &policy()).unwrap();
        let spec = HeraldSpec::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!(matches!(conditional_state(&vac, &spec, &policy()), Err(Error::ZeroLikelihood { .. })));
    }

    #[test]
    fn weight_matches_truncated_trace() {
        let beta = C64::new(1.2, 0.4);
        let p = policy();
        let kind = StateKind::DisplacedThermal { beta, n_m: 0.6 };
        let rho = prepare_state(kind, FockDim::new(kind.required_dim(&p)).unwrap(), &p).unwrap();
        let spec = HeraldSpec::new(C64::new(0.4, -0.9), C64::new(0.8, 0.1), beta).unwrap();
        let pm = spec.projector(FockDim::new(rho.dim()).unwrap());
        let unnorm = pm.elements() * rho.elements() * pm.elements().adjoint();
        let (_, w) = conditional_state(&rho, &spec, &p).unwrap();
        assert!((unnorm.trace().re / w - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sub_poissonian_at_optimal_r() {
        let beta = C64::new(5.0, 0.0);
        let r = C64::new(3f64.sqrt(), 0.0);
        let spec = HeraldSpec::from_r(r, beta).unwrap();
        let (rc, _) = conditional_state(&coherent(beta), &spec, &policy()).unwrap();
        assert!((rc.purity() - 1.0).abs() < 1e-8);
        assert!(mandel_q(&rc, &policy()).unwrap().q < 0.0);
    }

    #[test]
    fn r_from_drives_examples() {
        let beta = C64::new(1.3, -0.4);
        let s = r_from_drives(DriveRatio::new(1.0, PI).unwrap(), beta);
        assert_eq!(s.r, C64::new(0.0, 0.0));
        assert!(s.degenerate && s.phi == 0.0);

        let s = r_from_drives(DriveRatio::new(1.0, 0.0).unwrap(), C64::new(2.0, 0.0));
        assert!((s.r.norm() - 4.0).abs() < 1e-15);

        for (l, t) in [(0.5, 0.3), (1.4, -2.0), (0.9, 3.0)] {
            let s = r_from_drives(DriveRatio::new(l, t).unwrap(), beta);
            let quoted = beta.norm_sqr() * ((1.0 - l) * (1.0 - l) + 2.0 * l * (1.0 + t.cos()));
            assert!((s.r.norm_sqr() / quoted - 1.0).abs() < 1e-12);
            assert!((s.phi - (beta * s.r).arg()).abs() < 1e-12);
        }
    }

    #[test]
    fn optimal_settings_realize_target() {
        let beta = C64::from_polar(7.0, 0.9);
        for branch in [Branch::Lower, Branch::Upper] {
            let ratio = optimal_drive_settings(Some(1.1), 0.0, beta, branch).unwrap();
            assert_eq!(ratio.theta, PI);
            let s = r_from_drives(ratio, beta);
            assert!((s.r.norm() - 1.1).abs() < 1e-12);
            assert!(((2.0 * s.phi).cos() - 1.0).abs() < 1e-12);
        }
        let r = optimal_drive_settings(None, 0.0, beta, Branch::Upper).unwrap();
        assert!(((r.lambda - 1.0) * 7.0 - 1.7320508).abs() < 1e-7);
        let r = optimal_drive_settings(None, 0.05, beta, Branch::Upper).unwrap();
        assert!(((r.lambda - 1.0) * 7.0 - 1.8165902).abs() < 1e-7);
        let r = optimal_drive_settings(Some(0.0), 0.0, beta, Branch::Lower).unwrap();
        assert_eq!((r.lambda, r.theta), (1.0, PI));
        assert!(matches!(
            optimal_drive_settings(None, 0.0, C64::new(0.0, 0.0), Branch::Upper),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn ideal_superposition_limits() {
        let beta = C64::new(-1.0, 2.0);
        let p = policy();
        let d = FockDim::new(required_dim(beta.norm(), 0.0, 1, &p)).unwrap();
        let zero = ideal_superposition(C64::new(0.0, 0.0), beta, d, &p).unwrap();
        let fock = prepare_state(StateKind::DisplacedFock { beta, n: 1 }, d, &p).unwrap();
        assert!(fidelity(&zero, &fock).unwrap() > 1.0 - 1e-12);

        let big = ideal_superposition(C64::new(1e6, 0.0), beta, d, &p).unwrap();
        let coh = prepare_state(StateKind::Coherent { beta }, d, &p).unwrap();
        assert!(fidelity(&big, &coh).unwrap() > 1.0 - 1e-11);
        assert!(big.purity() > 1.0 - 1e-10);
    }

    #[test]
    fn conditional_matches_ideal_superposition_on_grid() {
        let p = policy();
        for b in [1.0, 3.0, 6.0] {
            let beta = C64::from_polar(b, 0.4);
            let rho = coherent(beta);
            let d = FockDim::new(rho.dim()).unwrap();
            for i in 0..5 {
                let lambda = 0.5 + 0.25 * i as f64;
                for j in 0..6 {
                    let theta = -PI + (j + 1) as f64 * PI / 3.0;
                    let ratio = DriveRatio::new(lambda, theta).unwrap();
                    let (rc, _) = conditional_state(&rho, &ratio.herald(beta).unwrap(), &p).unwrap();
                    let ideal = ideal_superposition(r_from_drives(ratio, beta).r, beta, d, &p).unwrap();
                    let f = fidelity(&rc, &ideal).unwrap();
                    assert!(f > 1.0 - 1e-8, "β={b} λ={lambda} θ={theta}: F={f}");
                }
            }
        }
    }

    #[test]
    fn q_is_phase_covariant() {
        let p = policy();
        let ratio = DriveRatio::new(0.8, 2.2).unwrap();
        let q_at = |chi: f64| {
            let beta = C64::from_polar(3.0, chi);
            let (rc, _) = conditional_state(&coherent(beta), &ratio.herald(beta).unwrap(), &p).unwrap();
            mandel_q(&rc, &p).unwrap().q
        };
        let q0 = q_at(0.0);
        for chi in [0.7, -2.0, 3.1] {
            assert!((q_at(chi) - q0).abs() < 1e-10);
        }
    }

    #[test]
    fn drive_ratio_from_couplings_round_trip() {
        let beta = C64::from_polar(2.0, -0.3);
        let (g_r, g_b) = (C64::from_polar(1.5, 0.2), C64::from_polar(2.0, 1.1));
        let ratio = drive_ratio_from_couplings(g_r, g_b, beta).unwrap();
        assert!((ratio.lambda - 0.75).abs() < 1e-15);
        assert!((ratio.coupling_ratio(beta) - g_r / g_b).norm() < 1e-14);
    }
}
