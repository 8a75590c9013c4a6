use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

/// Settings read from an optional TOML file. Command-line flags win over it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub rank: Option<usize>,
    pub max_image_length: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub min_instances: Option<usize>,
    pub report: Option<PathBuf>,
    pub verbosity: Option<u8>,
}

impl CliConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: CliConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let bounds = [
            ("rank", self.rank),
            ("max_image_length", self.max_image_length),
            ("samples", self.samples),
            ("min_instances", self.min_instances),
        ];
        for (name, v) in bounds {
            if v == Some(0) {
                bail!("config field {name} must be positive");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_fields() {
        let cfg: CliConfig = toml::from_str(
            "rank = 3\nmax_image_length = 4\nsamples = 9\nseed = 5\nmin_instances = 2\nreport = \"r.json\"\nverbosity = 1\n",
        )
        .unwrap();
        assert_eq!(cfg.rank, Some(3));
        assert_eq!(cfg.report, Some(PathBuf::from("r.json")));
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_zero_and_unknown() {
        let cfg: CliConfig = toml::from_str("samples = 0").unwrap();
        assert!(cfg.validate().is_err());
        assert!(toml::from_str::<CliConfig>("colour = 1").is_err());
    }
}
