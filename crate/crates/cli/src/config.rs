use qca_core::{Family, PeriodicLattice, Sign, WavePacketSpec};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

/// One JSON document describing a run. Missing keys take defaults; unknown
/// keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub solution: SolutionConfig,
    pub lattice: LatticeConfig,
    pub packet: PacketConfig,
    pub dirac: DiracConfig,
    pub spectrum: SpectrumConfig,
    pub evolve: EvolveConfig,
    /// Overrides each command's own default tolerance.
    pub tol: Option<f64>,
    pub output_path: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            solution: SolutionConfig::default(),
            lattice: LatticeConfig::default(),
            packet: PacketConfig::default(),
            dirac: DiracConfig::default(),
            spectrum: SpectrumConfig::default(),
            evolve: EvolveConfig::default(),
            tol: None,
            output_path: PathBuf::from("qca-out"),
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolutionConfig {
    pub family: Family,
    pub sign: Sign,
    pub alpha_branch: Sign,
}

impl Default for SolutionConfig {
    fn default() -> Self {
        SolutionConfig { family: Family::One, sign: Sign::Minus, alpha_branch: Sign::Plus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    #[serde(rename = "L")]
    pub side: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig { side: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PacketConfig {
    pub k0: [f64; 3],
    pub sigma: f64,
    /// Defaults to `(L/4, L/2, L/2)`.
    pub x0: Option<[f64; 3]>,
    pub branch: Sign,
}

impl Default for PacketConfig {
    fn default() -> Self {
        PacketConfig { k0: [0.6, 0.0, 0.0], sigma: 8.0, x0: None, branch: Sign::Plus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiracConfig {
    /// Unset: `dirac` sweeps a fixed set of couplings and `limit` skips the Dirac fit.
    pub s: Option<f64>,
    pub mass_sign: Sign,
}

impl Default for DiracConfig {
    fn default() -> Self {
        DiracConfig { s: None, mass_sign: Sign::Plus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    /// Points per axis of the uniform grid on `[−π, π]³`.
    pub grid: usize,
    /// Closed-form branch compared against; defaults to the solution's α branch.
    pub closed_form_branch: Option<Sign>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig { grid: 17, closed_form_branch: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Weyl,
    Dirac,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub model: Model,
    pub steps: u64,
    /// Relative bound on `|v_measured − v_predicted| / |v_predicted|`.
    pub velocity_rel_tol: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig { model: Model::Weyl, steps: 40, velocity_rel_tol: 0.02 }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn lattice(&self) -> Result<PeriodicLattice, CliError> {
        Ok(PeriodicLattice::new(self.lattice.side)?)
    }

    pub fn packet_spec(&self) -> WavePacketSpec {
        let l = self.lattice.side as f64;
        WavePacketSpec {
            k0: self.packet.k0,
            sigma: self.packet.sigma,
            x0: self.packet.x0.unwrap_or([l / 4.0, l / 2.0, l / 2.0]),
            branch: self.packet.branch,
        }
    }

    pub fn tol_or(&self, default: f64) -> Result<f64, CliError> {
        match self.tol {
            None => Ok(default),
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            Some(t) => Err(CliError::Config(format!("tolerance {t} must be positive"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
        assert_eq!(RunConfig::default().seed, 42);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::from_json(r#"{"colour": 1}"#), Err(CliError::Config(_))));
        assert!(RunConfig::from_json(r#"{"solution": {"famly": 2}}"#).is_err());
    }

    #[test]
    fn nested_fields_parse() {
        let cfg = RunConfig::from_json(
            r#"{"solution": {"family": 3, "sign": "+", "alpha_branch": "-"},
                "lattice": {"L": 16}, "dirac": {"s": 0.5}, "tol": 1e-9}"#,
        )
        .unwrap();
        assert_eq!(cfg.solution.family, Family::Three);
        assert_eq!(cfg.solution.alpha_branch, Sign::Minus);
        assert_eq!(cfg.lattice.side, 16);
        assert_eq!(cfg.dirac.s, Some(0.5));
        assert_eq!(cfg.tol, Some(1e-9));
        assert!(RunConfig::from_json(r#"{"solution": {"family": 4}}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }
}
