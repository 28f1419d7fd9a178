//! JSON run configuration with central defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Half-width L of the window [−L, L]².
    pub half_width: f64,
    /// Nodes per side; a power of two.
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { half_width: 1.0, n: 256 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationKind {
    /// Dirichlet window when a corpus entry supplies exterior data, principal otherwise.
    #[default]
    Auto,
    Principal,
    DirichletWindow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub normalization: NormalizationKind,
    /// z-coefficient a of a principal solution, as [re, im].
    pub a: [f64; 2],
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            normalization: NormalizationKind::Auto,
            a: [1.0, 0.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiskConfig {
    pub center: [f64; 2],
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for DiskConfig {
    fn default() -> Self {
        Self {
            center: [0.0, 0.0],
            radius: 0.25,
            n_r: crate::transforms::DEFAULT_RADIAL,
            n_theta: crate::transforms::DEFAULT_ANGULAR,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeSource {
    /// Exact jets of the corpus entry.
    #[default]
    Closed,
    /// Spectral derivatives of the windowed grid sample.
    Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub source: ProbeSource,
    /// Largest and smallest radius of the Morrey and Campanato profiles (relative to L).
    pub r_max: f64,
    pub r_min: f64,
    pub per_octave: usize,
    /// Radii of the circle spectra (relative to L).
    pub circle_radii: Vec<f64>,
    /// Fourier truncation order of the circle spectra.
    pub order: usize,
    /// Random evaluation points for pointwise probes.
    pub points: usize,
    pub n_theta: usize,
    pub centers: Vec<[f64; 2]>,
    pub q: Vec<f64>,
    /// Dyadic radii of the Caccioppoli check (relative to L).
    pub caccioppoli_radii: Vec<f64>,
    /// Sample count for field certificates and round trips.
    pub samples: usize,
    pub tol_closed: f64,
    pub tol_grid: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            source: ProbeSource::Closed,
            r_max: 0.25,
            r_min: 1.0 / 256.0,
            per_octave: 2,
            circle_radii: vec![0.05, 0.1, 0.2],
            order: 16,
            points: 64,
            n_theta: 128,
            centers: vec![[0.0, 0.0], [0.05, 0.0], [-0.05, 0.0], [0.0, 0.05], [0.0, -0.05]],
            q: vec![3.0, 4.0],
            caccioppoli_radii: vec![0.2, 0.1, 0.05, 0.025],
            samples: 2000,
            tol_closed: crate::probes::TOL_CLOSED,
            tol_grid: crate::probes::TOL_GRID,
        }
    }
}

/// Everything a command needs; flags override file values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub grid: GridConfig,
    /// Field selector (H for Beltrami commands, A for Leray-Lions commands).
    pub field: Option<String>,
    pub k: Option<f64>,
    #[serde(rename = "K")]
    pub big_k: Option<f64>,
    pub corpus: Option<String>,
    /// Expression in z for the inhomogeneity G (Beltrami) or g (Leray-Lions).
    pub data: Option<String>,
    /// Expression in z for a manufactured solution f₀.
    pub manufactured: Option<String>,
    pub solver: SolverConfig,
    pub disk: DiskConfig,
    pub probes: ProbeConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            grid: GridConfig::default(),
            field: None,
            k: None,
            big_k: None,
            corpus: None,
            data: None,
            manufactured: None,
            solver: SolverConfig::default(),
            disk: DiskConfig::default(),
            probes: ProbeConfig::default(),
            seed: 7,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(src: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(src).map_err(|e| Error::Config {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !self.grid.n.is_power_of_two() || self.grid.n < 16 {
            return bad(format!("grid.n = {} must be a power of two, at least 16", self.grid.n));
        }
        if !(self.grid.half_width > 0.0) {
            return bad("grid.half_width must be positive".into());
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 {
            return bad("solver.tol and solver.max_iter must be positive".into());
        }
        if !(self.probes.r_min > 0.0 && self.probes.r_max > self.probes.r_min) || self.probes.per_octave == 0 {
            return bad("probe radii must satisfy 0 < r_min < r_max".into());
        }
        if self.probes.q.iter().any(|&q| !(q > 2.0)) {
            return bad("Caccioppoli exponents must exceed 2".into());
        }
        if !(self.disk.radius > 0.0) {
            return bad("disk.radius must be positive".into());
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_json(&c.to_json().unwrap()).unwrap(), c);
        let c = RunConfig::from_json(r#"{"grid": {"n": 128}, "K": 2}"#).unwrap();
        assert_eq!(c.grid.n, 128);
        assert_eq!(c.big_k, Some(2.0));
    }

    #[test]
    fn errors_carry_positions() {
        match RunConfig::from_json("{\n  \"grid\": {\"n\": 128},\n  \"bogus\": 1\n}") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::from_json(r#"{"grid": {"n": 100}}"#).is_err());
    }
}
