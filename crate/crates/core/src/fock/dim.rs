use crate::{Error, NumericPolicy, Result};

/// Number of retained Fock levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockDim(usize);

impl FockDim {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self(dim))
    }

    /// Smallest dimension satisfying the truncation rule, see [`required_dim`].
    pub fn for_state(beta_abs: f64, n_m: f64, n: usize, policy: &NumericPolicy) -> Self {
        Self(required_dim(beta_abs, n_m, n, policy).max(2))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Fail with [`Error::Truncation`] unless `self` holds at least `required` levels.
    pub fn ensure(self, required: usize) -> Result<()> {
        if self.0 < required {
            return Err(Error::Truncation { required, actual: self.0 });
        }
        Ok(())
    }
}

/// Truncation rule for a state displaced by `beta_abs` from a thermal
/// (occupation `n_m`) or number (`n`) state.
///
/// `ceil(b² + 8b + 2b·√(T·n_m) + T·(2n_m+1) + n + margin)` with `T` the policy
/// tail exponent. The `2b√(T n_m)` term follows the number-distribution tail of
/// a displaced thermal state, `~ exp(−(√N − b)²/n_m)`; the `8b` term keeps the
/// Poisson tail of a coherent state below 1e−12, and `T(2n_m+1)` keeps the
/// geometric tail of the thermal weights below `e^{−T}`.
pub fn required_dim(beta_abs: f64, n_m: f64, n: usize, policy: &NumericPolicy) -> usize {
    let b = beta_abs.abs();
    let t = policy.truncation_tail;
    let n_m = n_m.max(0.0);
    let levels =
        b * b + 8.0 * b + 2.0 * b * (t * n_m).sqrt() + t * (2.0 * n_m + 1.0) + n as f64 + policy.truncation_margin;
    levels.ceil() as usize
}
