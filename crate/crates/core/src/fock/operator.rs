use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{linalg, required_dim, FockDim};
use crate::{NumericPolicy, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Ladder,
    Number,
    Displacement,
    Herald,
    Parity,
    Generic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    elements: DMatrix<C64>,
    kind: OperatorKind,
}

impl OperatorMatrix {
    pub fn new(elements: DMatrix<C64>, kind: OperatorKind) -> Self {
        debug_assert!(elements.is_square());
        Self { elements, kind }
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn into_elements(self) -> DMatrix<C64> {
        self.elements
    }

    pub fn adjoint(&self) -> Self {
        let kind = match self.kind {
            OperatorKind::Number | OperatorKind::Parity => self.kind,
            _ => OperatorKind::Generic,
        };
        Self { elements: self.elements.adjoint(), kind }
    }

    /// Product with another operator; the result is [`OperatorKind::Generic`].
    pub fn compose(&self, other: &OperatorMatrix) -> OperatorMatrix {
        Self::new(linalg::mul(&self.elements, &other.elements), OperatorKind::Generic)
    }

    /// `max |U†U − I|`
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let prod = self.elements.adjoint() * &self.elements;
        (prod - DMatrix::<C64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i..n).all(|j| (self.elements[(i, j)] - self.elements[(j, i)].conj()).norm() <= tol))
    }
}

/// Annihilation operator `b` with `⟨n−1|b|n⟩ = √n`.
pub fn ladder_matrix(dim: FockDim) -> OperatorMatrix {
    let n = dim.get();
    let mut m = DMatrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    OperatorMatrix::new(m, OperatorKind::Ladder)
}

pub fn number_matrix(dim: FockDim) -> OperatorMatrix {
    let n = dim.get();
    let m = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) });
    OperatorMatrix::new(m, OperatorKind::Number)
}

/// Photon-number parity `(−1)^n`.
pub fn parity_matrix(dim: FockDim) -> OperatorMatrix {
    let n = dim.get();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i % 2 == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    });
    OperatorMatrix::new(m, OperatorKind::Parity)
}

/// `D(β) = exp(βb† − β*b)` on the truncated space.
///
/// Errors with [`crate::Error::Truncation`] when `dim` is below the truncation
/// rule for `|β|`.
pub fn displacement_operator(beta: C64, dim: FockDim, policy: &NumericPolicy) -> Result<OperatorMatrix> {
    dim.ensure(required_dim(beta.norm(), 0.0, 0, policy))?;
    Ok(displacement_unchecked(beta, dim))
}

/// [`displacement_operator`] without the truncation-rule check.
///
/// The generator is rotated onto the position quadrature: with
/// `β = |β|e^{iχ}`, `βb† − β*b = −i|β|·R X R†`, where `X = b + b†` and
/// `R = diag(e^{in(χ+π/2)})`. `X` is real symmetric tridiagonal, so
/// `D = R·V·e^{−i|β|Λ}·Vᵀ·R†` from its eigendecomposition `X = VΛVᵀ`. The
/// truncated result is exactly unitary for every `β`.
pub fn displacement_unchecked(beta: C64, dim: FockDim) -> OperatorMatrix {
    let n = dim.get();
    let amp = beta.norm();
    if amp == 0.0 {
        return OperatorMatrix::new(DMatrix::identity(n, n), OperatorKind::Displacement);
    }

    let mut x = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let s = (k as f64).sqrt();
        x[(k - 1, k)] = s;
        x[(k, k - 1)] = s;
    }
    let eig = SymmetricEigen::new(x);
    let v = &eig.eigenvectors;

    let mut vc = v.clone();
    let mut vs = v.clone();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let (s, c) = (amp * lam).sin_cos();
        vc.column_mut(k).scale_mut(c);
        vs.column_mut(k).scale_mut(s);
    }
    let cos_part = vc * v.transpose();
    let sin_part = vs * v.transpose();

    let chi = beta.arg() + FRAC_PI_2;
    let phase: Vec<C64> = (0..n).map(|m| C64::from_polar(1.0, m as f64 * chi)).collect();
    let m = DMatrix::from_fn(n, n, |i, j| phase[i] * C64::new(cos_part[(i, j)], -sin_part[(i, j)]) * phase[j].conj());
    OperatorMatrix::new(m, OperatorKind::Displacement)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    /// ⟨m|D(β)|n⟩ for m ≥ n from the associated-Laguerre closed form.
    fn laguerre_element(beta: C64, m: usize, n: usize) -> C64 {
        assert!(m >= n);
        let x = beta.norm_sqr();
        let k = (m - n) as f64;
        // L_n^{(k)}(x) by the three-term recurrence.
        let mut l0 = 1.0;
        let mut l1 = 1.0 + k - x;
        let lag = if n == 0 {
            l0
        } else {
            for j in 1..n {
                let j = j as f64;
                let l2 = ((2.0 * j + 1.0 + k - x) * l1 - (j + k) * l0) / (j + 1.0);
                l0 = l1;
                l1 = l2;
            }
            l1
        };
        let mut ratio = 1.0; // sqrt(n!/m!)
        for j in (n + 1)..=m {
            ratio /= (j as f64).sqrt();
        }
        (-x / 2.0).exp() * ratio * beta.powu((m - n) as u32) * lag
    }

    #[test]
    fn ladder_entries() {
        let b = ladder_matrix(FockDim::new(2).unwrap());
        assert_eq!(b.elements()[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(b.elements()[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(b.elements()[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(b.elements()[(1, 1)], C64::new(0.0, 0.0));

        let b3 = ladder_matrix(FockDim::new(3).unwrap());
        assert!((b3.elements()[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn canonical_commutator_on_interior_block() {
        let d = FockDim::new(12).unwrap();
        let b = ladder_matrix(d);
        let bd = b.adjoint();
        let comm = b.elements() * bd.elements() - bd.elements() * b.elements();
        for i in 0..11 {
            for j in 0..11 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_displacement_is_identity() {
        let d = FockDim::new(40).unwrap();
        let u = displacement_operator(C64::new(0.0, 0.0), d, &policy()).unwrap();
        assert_eq!(u.elements(), &DMatrix::<C64>::identity(40, 40));
    }

    #[test]
    fn vacuum_overlap() {
        let beta = C64::new(1.0, 0.0);
        let d = FockDim::for_state(1.0, 0.0, 0, &policy());
        let u = displacement_operator(beta, d, &policy()).unwrap();
        assert!((u.elements()[(0, 0)].norm() - 0.60653066).abs() < 1e-8);
        assert!((u.elements()[(0, 0)].norm() - (-0.5f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn inverse_and_unitarity() {
        let beta = C64::new(2.0, 1.0);
        let d = FockDim::for_state(beta.norm(), 0.0, 0, &policy());
        let plus = displacement_operator(beta, d, &policy()).unwrap();
        let minus = displacement_operator(-beta, d, &policy()).unwrap();
        let prod = plus.compose(&minus);
        let n = d.get();
        let err = (prod.elements() - DMatrix::<C64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "D(β)D(−β) − I = {err:e}");
        assert!(plus.unitarity_error() < 1e-10);
    }

    #[test]
    fn low_matrix_elements_match_laguerre_form() {
        for beta in [C64::new(1.5, 0.0), C64::new(-0.7, 2.1), C64::new(0.0, -3.0)] {
            let d = FockDim::for_state(beta.norm(), 0.0, 0, &policy());
            let u = displacement_operator(beta, d, &policy()).unwrap();
            for n in 0..5 {
                for m in n..(n + 8) {
                    let expect = laguerre_element(beta, m, n);
                    let got = u.elements()[(m, n)];
                    assert!((got - expect).norm() < 1e-11, "β={beta} ⟨{m}|D|{n}⟩: {got} vs {expect}");
                    // ⟨n|D(β)|m⟩ = (−1)^{m−n} conj-partner: D(β)_{nm} = ⟨m|D(−β)|n⟩*
                    let mirror = laguerre_element(-beta, m, n).conj();
                    assert!((u.elements()[(n, m)] - mirror).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn truncation_violation_reports_required_dim() {
        let err = displacement_operator(C64::new(5.0, 0.0), FockDim::new(20).unwrap(), &policy()).unwrap_err();
        match err {
            crate::Error::Truncation { required, actual } => {
                assert_eq!(actual, 20);
                assert_eq!(required, required_dim(5.0, 0.0, 0, &policy()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn number_and_parity_kinds() {
        let d = FockDim::new(6).unwrap();
        let n = number_matrix(d);
        assert_eq!(n.kind(), OperatorKind::Number);
        for i in 0..6 {
            assert_eq!(n.elements()[(i, i)].re, i as f64);
        }
        let p = parity_matrix(d);
        assert_eq!(p.elements()[(3, 3)].re, -1.0);
        assert!(p.is_hermitian(0.0));
    }
}
