//! Run configuration: one JSON document per run.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::herald::Branch;
use crate::pulse::SystemParams;
use crate::steady::{DriveTone, FilterSpec, FiveTonePlan};
use crate::{Error, NumericPolicy, Result, C64};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Unit convention for rates and frequencies in the file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// Angular frequencies in rad/s.
    #[default]
    RadS,
    /// Ordinary frequencies in Hz, multiplied by 2π on load.
    Hz,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    #[serde(default)]
    pub min: f64,
    #[serde(default)]
    pub max: f64,
    #[serde(default = "one")]
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
    /// Explicit grid values; replaces `min`/`max`/`points`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn one() -> usize {
    1
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, points: usize) -> Self {
        Self { name: name.into(), min, max, points, scale: Scale::Linear, values: None }
    }

    pub fn list(name: &str, values: &[f64]) -> Self {
        Self {
            name: name.into(),
            min: 0.0,
            max: 0.0,
            points: values.len(),
            scale: Scale::Linear,
            values: Some(values.to_vec()),
        }
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        if let Some(v) = &self.values {
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!("axis {}: values must be finite and non-empty", self.name)));
            }
            return Ok(v.clone());
        }
        if self.points == 0 {
            return Err(Error::Config(format!("axis {}: points must be ≥ 1", self.name)));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Config(format!("axis {}: non-finite bounds", self.name)));
        }
        let n = self.points;
        let at = |i: usize| -> f64 {
            if n == 1 {
                return 0.0;
            }
            i as f64 / (n - 1) as f64
        };
        match self.scale {
            Scale::Linear => Ok((0..n)
                .map(|i| if i + 1 == n && n > 1 { self.max } else { self.min + (self.max - self.min) * at(i) })
                .collect()),
            Scale::Log => {
                if !(self.min > 0.0 && self.max > 0.0) {
                    return Err(Error::Config(format!("axis {}: log scale needs positive bounds", self.name)));
                }
                let (a, b) = (self.min.ln(), self.max.ln());
                Ok((0..n)
                    .map(|i| {
                        if i + 1 == n && n > 1 {
                            self.max
                        } else if i == 0 {
                            self.min
                        } else {
                            (a + (b - a) * at(i)).exp()
                        }
                    })
                    .collect())
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
    /// Values of parameters that are not swept.
    pub fixed: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Readout {
    /// Read-pulse coupling `|G_R|`.
    pub g_r: f64,
    pub tau_r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Initial displacement `|β|` (real, phase irrelevant).
    pub beta: f64,
    #[serde(default)]
    pub n_m: f64,
    /// Target `|r|`; defaults to `√(3(1+2n_m))`.
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default = "lower")]
    pub branch: Branch,
    /// Explicit drive ratio; both must be given and override `r`/`branch`.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    /// Write-pulse Stokes coupling `|G_B|`.
    pub g_b: f64,
    pub tau_w: f64,
    pub eta: f64,
    /// Readout conversion; computed from `readout` when absent.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub readout: Option<Readout>,
    #[serde(default = "half")]
    pub split: f64,
}

fn lower() -> Branch {
    Branch::Lower
}

fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SteadyConfig {
    pub tones: Vec<DriveTone>,
    pub five_tone: Option<FiveTonePlan>,
    pub filter: Option<FilterSpec>,
    /// Target `r` for the ideal measurement time.
    pub r_target: Option<C64>,
    /// Occupation threshold for the amplitude bound.
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivityConfig {
    pub betas: Vec<f64>,
    pub n_ms: Vec<f64>,
    pub deltas: Vec<f64>,
    pub branches: Vec<Branch>,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self {
            betas: vec![50.0],
            n_ms: vec![0.0, 0.05],
            deltas: vec![5e-4, 1e-3, 2e-3],
            branches: vec![Branch::Lower, Branch::Upper],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub policy: NumericPolicy,
    pub units: Units,
    pub system: Option<SystemParams>,
    pub protocol: Option<ProtocolConfig>,
    pub steady: SteadyConfig,
    pub sensitivity: SensitivityConfig,
    pub sweep: SweepConfig,
    pub format: Format,
    pub parallelism: usize,
    /// Reserved; every computation is deterministic.
    pub seed: u64,
    /// Largest Fock dimension for dense computations in sweeps.
    pub dim_cap: usize,
    /// Escalate regime warnings to errors.
    pub strict: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            policy: NumericPolicy::default(),
            units: Units::RadS,
            system: None,
            protocol: None,
            steady: SteadyConfig::default(),
            sensitivity: SensitivityConfig::default(),
            sweep: SweepConfig::default(),
            format: Format::Csv,
            parallelism: 1,
            seed: 0,
            dim_cap: 600,
            strict: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be ≥ 1".into()));
        }
        if self.dim_cap < 2 {
            return Err(Error::Config("dim_cap must be ≥ 2".into()));
        }
        for a in &self.sweep.axes {
            a.grid()?;
        }
        if let Some(s) = &self.system {
            s.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form, leaving out `parallelism`.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("parallelism");
        }
        let digest = Sha256::digest(v.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// System parameters in rad/s.
    pub fn system_rad(&self) -> Result<SystemParams> {
        let s = self.system.clone().ok_or_else(|| Error::Config("missing `system` section".into()))?;
        Ok(match self.units {
            Units::RadS => s,
            Units::Hz => s.from_hz(),
        })
    }

    /// Multiplier taking configured frequencies to rad/s.
    pub fn freq_scale(&self) -> f64 {
        match self.units {
            Units::RadS => 1.0,
            Units::Hz => 2.0 * std::f64::consts::PI,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_grids() {
        assert_eq!(Axis::linear("r", 0.0, 4.0, 5).grid().unwrap(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(Axis::linear("r", 0.3, 4.0, 1).grid().unwrap(), vec![0.3]);
        let log = Axis { scale: Scale::Log, ..Axis::linear("x", 1e-3, 1e-1, 3) }.grid().unwrap();
        assert_eq!(log[0], 1e-3);
        assert!((log[1] - 1e-2).abs() < 1e-17);
        assert_eq!(log[2], 1e-1);
        assert!(Axis::linear("r", 0.0, 1.0, 0).grid().is_err());
        assert!(Axis { scale: Scale::Log, ..Axis::linear("x", 0.0, 1.0, 3) }.grid().is_err());
    }

    #[test]
    fn unknown_fields_are_config_errors() {
        assert!(matches!(RunConfig::from_json(r#"{"bogus": 1}"#), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"policy": {"nope": 1}}"#), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"parallelism": 0}"#), Err(Error::Config(_))));
    }

    #[test]
    fn hash_ignores_parallelism_only() {
        let base = RunConfig::default();
        let jobs = RunConfig { parallelism: 8, ..base.clone() };
        assert_eq!(base.hash(), jobs.hash());
        let cap = RunConfig { dim_cap: 100, ..base.clone() };
        assert_ne!(base.hash(), cap.hash());
        let mut tol = base.clone();
        tol.policy.hermitian_tol = 1e-11;
        assert_ne!(base.hash(), tol.hash());
        assert_eq!(base.hash().len(), 64);
    }

    #[test]
    fn partial_policy_override() {
        let c = RunConfig::from_json(r#"{"policy": {"truncation_margin": 15}}"#).unwrap();
        assert_eq!(c.policy.truncation_margin, 15.0);
        assert_eq!(c.policy.hermitian_tol, 1e-12);
    }
}
