use std::path::{Path, PathBuf};

use serde::Deserialize;

/// Experiment settings read from a TOML file. Every key is optional and
/// command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: Option<Vec<PathBuf>>,
    pub mech: Option<String>,
    pub beta_grid: Option<String>,
    pub q_grid: Option<String>,
    #[serde(rename = "sL")]
    pub s_low: Option<f64>,
    #[serde(rename = "sU")]
    pub s_high: Option<f64>,
    pub mass_low: Option<f64>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub grid_points: Option<usize>,
    pub mass_splits: Option<usize>,
    pub p_max: Option<usize>,
    pub beta: Option<f64>,
    pub min_margin: Option<f64>,
    pub theorem: Option<u8>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }
}
