use std::path::{Path, PathBuf};

use serde::Deserialize;

use matteforge::guidance::ThicknessSchedule;
use matteforge::metrics::MetricParams;

/// JSON experiment config. Command-line flags override every field.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub schedule: Option<ThicknessSchedule>,
    pub metrics: Option<MetricParams>,
    pub root: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let cfg: Config =
            serde_json::from_slice(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
        if let Some(s) = &cfg.schedule {
            s.validate()
                .map_err(|e| format!("{}: {e}", path.display()))?;
        }
        if let Some(m) = &cfg.metrics {
            m.validate()
                .map_err(|e| format!("{}: {e}", path.display()))?;
        }
        Ok(cfg)
    }
}
