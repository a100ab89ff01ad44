//! Run manifests: a JSON sidecar that records enough to rerun a solve.

use std::path::{Path, PathBuf};

use portsolve::splitting::SolverConfig;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    ForwardBackward,
    DouglasRachford,
    Nested,
    Naive,
    Mmdr,
}

/// The solver settings actually used, after netlist defaults and flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub level_alphas: Vec<f64>,
    pub epsilon: f64,
    pub max_iter: usize,
}

impl ConfigRecord {
    pub fn from_config(cfg: &SolverConfig) -> Self {
        ConfigRecord {
            alpha: cfg.alpha,
            level_alphas: cfg.level_alphas.clone(),
            epsilon: cfg.epsilon,
            max_iter: cfg.max_iter,
        }
    }

    pub fn to_config(&self) -> SolverConfig {
        SolverConfig::new(self.alpha, self.epsilon, self.max_iter).with_level_alphas(self.level_alphas.clone())
    }
}

/// What was run. Together with [`ConfigRecord`] this determines the outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunSpec {
    Solve {
        input: PathBuf,
        naive: bool,
        /// Amplitude of the starting sinusoid for mixed topologies.
        init_amplitude: f64,
    },
    Vdp {
        mu: f64,
        period: f64,
        steps: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub run: RunSpec,
    pub config: ConfigRecord,
    pub solver: SolverKind,
    pub outputs: Vec<PathBuf>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: Option<f64>,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}
