//! Soft validity checks.
//!
//! The closed forms hold only in particular parameter regimes (resolved
//! sidebands, adiabatic coupling, short pulses ...). Leaving a regime is not an
//! error by itself; it produces a [`RegimeWarning`] that callers may escalate.

use std::fmt;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeWarning {
    pub code: &'static str,
    pub message: String,
}

impl RegimeWarning {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

/// Turn a non-empty warning list into a [`Error::Regime`].
pub fn escalate(warnings: &[RegimeWarning]) -> Result<()> {
    if warnings.is_empty() {
        return Ok(());
    }
    let joined = warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("; ");
    Err(Error::Regime(joined))
}
