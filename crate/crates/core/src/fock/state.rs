use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{displacement_unchecked, linalg, required_dim, FockDim, OperatorMatrix};
use crate::{Error, NumericPolicy, Result, C64};

/// Thermal weights below this (relative to the largest) are dropped from the
/// displaced-thermal sum; the dropped mass is added to the trace deficit.
const THERMAL_WEIGHT_FLOOR: f64 = 1e-20;

/// Unit-trace Hermitian positive operator on a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    elements: DMatrix<C64>,
    trace_deficit: f64,
}

impl DensityMatrix {
    /// Normalize `elements` to unit trace. `trace_deficit` is the probability
    /// mass already known to be lost to truncation.
    pub fn from_matrix(elements: DMatrix<C64>, trace_deficit: f64) -> Result<Self> {
        if !elements.is_square() {
            return Err(Error::ShapeMismatch { left: elements.nrows(), right: elements.ncols() });
        }
        FockDim::new(elements.nrows())?;
        let tr = elements.trace().re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::Domain(format!("density matrix trace {tr} is not positive")));
        }
        Ok(Self { elements: elements / C64::new(tr, 0.0), trace_deficit: trace_deficit.max(0.0) })
    }

    pub fn from_pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::Domain("zero state vector".into()));
        }
        let psi = psi / C64::new(norm, 0.0);
        Self::from_matrix(&psi * psi.adjoint(), 0.0)
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    /// Diagonal of ρ (phonon-number distribution).
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.elements[(n, n)].re).collect()
    }

    /// Tr[ρ²]
    pub fn purity(&self) -> f64 {
        // Tr[ρ²] = Σ |ρ_ij|² for Hermitian ρ.
        self.elements.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.elements[(i, j)] - self.elements[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.elements + self.elements.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(herm).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Population held in the top `levels` Fock states.
    pub fn boundary_population(&self, levels: usize) -> f64 {
        let n = self.dim();
        (n.saturating_sub(levels)..n).map(|k| self.elements[(k, k)].re).sum()
    }

    /// Check Hermiticity, positivity, unit trace and the truncation deficit.
    pub fn validate(&self, policy: &NumericPolicy) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > policy.hermitian_tol {
            return Err(Error::Domain(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.elements.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::Domain(format!("density matrix trace {tr}")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -policy.positivity_tol {
            return Err(Error::Domain(format!("negative eigenvalue {min_eig:e}")));
        }
        if self.trace_deficit > policy.max_trace_deficit {
            return Err(Error::Truncation { required: self.dim() + 1, actual: self.dim() });
        }
        Ok(())
    }
}

/// The state families used by the protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateKind {
    Coherent {
        beta: C64,
    },
    /// Geometric distribution with mean `n_m`.
    Thermal {
        n_m: f64,
    },
    DisplacedThermal {
        beta: C64,
        n_m: f64,
    },
    Fock {
        n: usize,
    },
    DisplacedFock {
        beta: C64,
        n: usize,
    },
}

impl StateKind {
    pub fn required_dim(&self, policy: &NumericPolicy) -> usize {
        match *self {
            StateKind::Coherent { beta } => required_dim(beta.norm(), 0.0, 0, policy),
            StateKind::Thermal { n_m } => required_dim(0.0, n_m, 0, policy),
            StateKind::DisplacedThermal { beta, n_m } => required_dim(beta.norm(), n_m, 0, policy),
            StateKind::Fock { n } => n + 2,
            StateKind::DisplacedFock { beta, n } => required_dim(beta.norm(), 0.0, n, policy),
        }
    }

    fn displacement(&self) -> C64 {
        match *self {
            StateKind::Coherent { beta }
            | StateKind::DisplacedThermal { beta, .. }
            | StateKind::DisplacedFock { beta, .. } => beta,
            _ => C64::new(0.0, 0.0),
        }
    }
}

/// Thermal weights `n_m^n/(n_m+1)^{n+1}` for `n < dim` and the lost tail mass.
fn thermal_weights(n_m: f64, dim: usize) -> (Vec<f64>, f64) {
    let ratio = n_m / (n_m + 1.0);
    let mut p = Vec::with_capacity(dim);
    let mut w = 1.0 / (n_m + 1.0);
    for _ in 0..dim {
        p.push(w);
        w *= ratio;
    }
    // Σ_{n≥dim} p_n = ratio^dim
    (p, ratio.powi(dim as i32))
}

/// Build one of the [`StateKind`] states on `dim` levels.
pub fn prepare_state(kind: StateKind, dim: FockDim, policy: &NumericPolicy) -> Result<DensityMatrix> {
    match kind {
        StateKind::Thermal { n_m } | StateKind::DisplacedThermal { n_m, .. } if !(n_m >= 0.0) || !n_m.is_finite() => {
            return Err(Error::Domain(format!("thermal occupation must be finite and ≥ 0, got {n_m}")));
        }
        _ => {}
    }
    let beta = kind.displacement();
    if !beta.re.is_finite() || !beta.im.is_finite() {
        return Err(Error::Domain(format!("non-finite amplitude {beta}")));
    }
    dim.ensure(kind.required_dim(policy))?;
    let n = dim.get();

    let state = match kind {
        StateKind::Fock { n: k } => {
            let mut m = DMatrix::zeros(n, n);
            m[(k, k)] = C64::new(1.0, 0.0);
            DensityMatrix::from_matrix(m, 0.0)?
        }
        StateKind::Thermal { n_m } => {
            let (p, tail) = thermal_weights(n_m, n);
            let m = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(p[i], 0.0) } else { C64::new(0.0, 0.0) });
            DensityMatrix::from_matrix(m, tail)?
        }
        StateKind::Coherent { beta } | StateKind::DisplacedFock { beta, n: _ } => {
            let k = match kind {
                StateKind::DisplacedFock { n: k, .. } => k,
                _ => 0,
            };
            let u = displacement_unchecked(beta, dim);
            let psi: DVector<C64> = u.elements().column(k).into_owned();
            let mut rho = DensityMatrix::from_pure(&psi)?;
            rho.trace_deficit = rho.boundary_population(policy.truncation_margin as usize);
            rho
        }
        StateKind::DisplacedThermal { beta, n_m } => {
            let (p, tail) = thermal_weights(n_m, n);
            let cut = p.iter().position(|&w| w < THERMAL_WEIGHT_FLOOR * p[0]).unwrap_or(n).max(1);
            let dropped: f64 = p[cut..].iter().sum();
            let u = displacement_unchecked(beta, dim);
            let mut a = u.elements().columns(0, cut).into_owned();
            for (j, w) in p.iter().take(cut).enumerate() {
                a.column_mut(j).scale_mut(w.sqrt());
            }
            let rho = linalg::gram(&a);
            let mut rho = DensityMatrix::from_matrix(rho, 0.0)?;
            rho.trace_deficit = tail + dropped + rho.boundary_population(policy.truncation_margin as usize);
            rho
        }
    };

    if state.trace_deficit > policy.max_trace_deficit {
        return Err(Error::Truncation { required: kind.required_dim(policy).max(n + 1), actual: n });
    }
    Ok(state)
}

/// `Tr[ρ·op]`
pub fn expectation(rho: &DensityMatrix, op: &OperatorMatrix) -> Result<C64> {
    if rho.dim() != op.dim() {
        return Err(Error::ShapeMismatch { left: rho.dim(), right: op.dim() });
    }
    let r = rho.elements();
    let o = op.elements();
    let n = rho.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += r[(i, j)] * o[(j, i)];
        }
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumberMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of the phonon number.
pub fn number_moments(rho: &DensityMatrix) -> NumberMoments {
    distribution_moments(&rho.populations())
}

pub(crate) fn distribution_moments(p: &[f64]) -> NumberMoments {
    let total: f64 = p.iter().sum();
    let mean = p.iter().enumerate().map(|(n, w)| n as f64 * w).sum::<f64>() / total;
    let variance = p.iter().enumerate().map(|(n, w)| (n as f64 - mean).powi(2) * w).sum::<f64>() / total;
    NumberMoments { mean, variance }
}

/// Uhlmann fidelity `(Tr√(√ρ σ √ρ))²`; reduces to `Tr[ρσ]` when either state is pure.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch { left: a.dim(), right: b.dim() });
    }
    const PURE: f64 = 1.0 - 1e-12;
    if a.purity() >= PURE || b.purity() >= PURE {
        // Tr[ρσ] = Σ_ij ρ_ij σ_ji
        let overlap: C64 = a.elements().iter().zip(b.elements().transpose().iter()).map(|(x, y)| x * y).sum();
        return Ok(overlap.re);
    }
    let eig = SymmetricEigen::new(a.elements().clone());
    let sqrt_diag = eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    let sqrt_a = v * DMatrix::from_diagonal(&sqrt_diag) * v.adjoint();
    let m = &sqrt_a * b.elements() * &sqrt_a;
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let s: f64 = SymmetricEigen::new(m).eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok(s * s)
}
