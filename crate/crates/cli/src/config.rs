//! TOML problem files.
//!
//! ```toml
//! c = 1.0
//!
//! [left]
//! n = 1.0
//! rho = 2.0
//! v = 0.5
//!
//! [right]
//! n = 1.0
//! rho = 2.0
//! v = 0.0
//!
//! [sim]            # optional, needed by `simulate`
//! ncells = 400
//! t_end = 0.5
//! flux = "godunov"
//!
//! [verify]         # optional
//! seed = 7
//! ```

use std::path::Path;

use chaplygin_core::fvm::{FluxKind, Grid1D, SimConfig};
use chaplygin_core::verify::Quadrature;
use chaplygin_core::{ModelParams, PrimitiveState, RiemannData};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub n: f64,
    pub rho: f64,
    pub v: f64,
}

impl From<StateConfig> for PrimitiveState {
    fn from(s: StateConfig) -> Self {
        PrimitiveState::new(s.n, s.rho, s.v)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_xmin")]
    pub xmin: f64,
    #[serde(default = "default_xmax")]
    pub xmax: f64,
    pub ncells: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    #[serde(default = "default_flux")]
    pub flux: FluxKind,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default = "default_window")]
    pub window_cells: usize,
    #[serde(default = "default_floor")]
    pub rho_floor: f64,
    #[serde(default = "default_floor")]
    pub speed_floor: f64,
}

fn default_xmin() -> f64 {
    -1.0
}
fn default_xmax() -> f64 {
    1.0
}
fn default_cfl() -> f64 {
    0.8
}
fn default_flux() -> FluxKind {
    FluxKind::Godunov
}
fn default_window() -> usize {
    5
}
fn default_floor() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Limit-study `eps` values.
    pub epsilons: Vec<f64>,
    pub seed: u64,
    pub test_functions: usize,
    pub panels: usize,
    pub order: usize,
    pub quadrature_tolerance: f64,
    /// Relative tolerance for jump residuals.
    pub rh_tolerance: f64,
    /// Relative tolerance for the generalized jump ODEs and the speed quadratic.
    pub grh_tolerance: f64,
    /// Absolute tolerance for weak-form residuals.
    pub weak_tolerance: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        let q = Quadrature::default();
        Self {
            epsilons: vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
            seed: 7,
            test_functions: 20,
            panels: q.panels,
            order: q.order,
            quadrature_tolerance: q.tolerance,
            rh_tolerance: 1e-12,
            grh_tolerance: 1e-12,
            weak_tolerance: 1e-9,
        }
    }
}

impl VerifySection {
    pub fn quadrature(&self) -> Quadrature {
        Quadrature { panels: self.panels, order: self.order, tolerance: self.quadrature_tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "default_c")]
    pub c: f64,
    pub left: StateConfig,
    pub right: StateConfig,
    pub sim: Option<SimSection>,
    #[serde(default)]
    pub verify: VerifySection,
}

fn default_c() -> f64 {
    1.0
}

/// A parsed configuration with the digest of its source bytes.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub problem: ProblemConfig,
    pub sha256: String,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&bytes)
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, CliError> {
        let text = std::str::from_utf8(bytes).map_err(|e| CliError::Config(e.to_string()))?;
        let problem: ProblemConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        problem.check_finite()?;
        Ok(Self { problem, sha256: hex::encode(Sha256::digest(bytes)) })
    }
}

impl ProblemConfig {
    fn check_finite(&self) -> Result<(), CliError> {
        let mut values = vec![self.c];
        for s in [&self.left, &self.right] {
            values.extend([s.n, s.rho, s.v]);
        }
        if let Some(sim) = &self.sim {
            values.extend([sim.xmin, sim.xmax, sim.cfl, sim.t_end, sim.rho_floor, sim.speed_floor]);
            values.extend(&sim.snapshots);
        }
        let v = &self.verify;
        values.extend(&v.epsilons);
        values.extend([v.quadrature_tolerance, v.rh_tolerance, v.grh_tolerance, v.weak_tolerance]);
        if values.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config("numeric fields must be finite".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.c).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn data(&self) -> Result<RiemannData, CliError> {
        Ok(RiemannData::new(self.left.into(), self.right.into(), self.params()?)?)
    }

    pub fn simulation(&self) -> Result<(Grid1D, SimConfig), CliError> {
        let sim = self
            .sim
            .as_ref()
            .ok_or_else(|| CliError::Config("the [sim] block is required for simulate".into()))?;
        let grid =
            Grid1D::new(sim.xmin, sim.xmax, sim.ncells).map_err(|e| CliError::Config(e.to_string()))?;
        let config = SimConfig {
            cfl: sim.cfl,
            t_end: sim.t_end,
            flux: sim.flux,
            rho_floor: sim.rho_floor,
            speed_floor: sim.speed_floor,
            snapshot_times: sim.snapshots.clone(),
            window_cells: sim.window_cells,
        };
        config.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok((grid, config))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[left]\nn = 1.0\nrho = 2.0\nv = 0.5\n[right]\nn = 1.0\nrho = 2.0\nv = 0.0\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = LoadedConfig::parse(MINIMAL.as_bytes()).unwrap();
        assert_eq!(cfg.problem.c, 1.0);
        assert!(cfg.problem.sim.is_none());
        assert_eq!(cfg.problem.verify, VerifySection::default());
        assert_eq!(cfg.sha256.len(), 64);
    }

    #[test]
    fn rejects_unknown_and_non_finite_fields() {
        let extra = format!("{MINIMAL}[verify]\nsead = 3\n");
        assert!(matches!(LoadedConfig::parse(extra.as_bytes()), Err(CliError::Config(_))));
        let nan = MINIMAL.replace("v = 0.0", "v = nan");
        assert!(matches!(LoadedConfig::parse(nan.as_bytes()), Err(CliError::Config(_))));
    }

    #[test]
    fn missing_sim_block() {
        let cfg = LoadedConfig::parse(MINIMAL.as_bytes()).unwrap();
        assert!(matches!(cfg.problem.simulation(), Err(CliError::Config(_))));
    }

    #[test]
    fn inadmissible_state_maps_to_exit_3() {
        let bad = MINIMAL.replace("rho = 2.0\nv = 0.0", "rho = 0.5\nv = 0.0");
        let cfg = LoadedConfig::parse(bad.as_bytes()).unwrap();
        assert_eq!(cfg.problem.data().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn flux_names() {
        let text = format!("{MINIMAL}[sim]\nncells = 100\nt_end = 0.5\nflux = \"lax-friedrichs\"\n");
        let cfg = LoadedConfig::parse(text.as_bytes()).unwrap();
        let (grid, sim) = cfg.problem.simulation().unwrap();
        assert_eq!(grid.ncells, 100);
        assert_eq!(sim.flux, FluxKind::LaxFriedrichs);
    }
}
