use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use radlabel::config::PipelineConfig;

/// Reads the configuration file, or returns defaults when none is given.
pub fn load(path: Option<&Path>) -> Result<PipelineConfig> {
    let Some(path) = path else {
        return Ok(PipelineConfig::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let cfg: PipelineConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    cfg.validate().with_context(|| format!("invalid config {}", path.display()))?;
    Ok(cfg)
}

/// A flag value if given, else the configured path, else an error naming both.
pub fn require(flag: Option<PathBuf>, configured: &Option<PathBuf>, what: &str, key: &str) -> Result<PathBuf> {
    match flag.or_else(|| configured.clone()) {
        Some(p) => Ok(p),
        None => bail!("missing {what}: pass the flag or set paths.{key} in the config file"),
    }
}

pub fn override_with<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    radlabel::io::write_atomic(path, contents.as_ref()).with_context(|| format!("writing {}", path.display()))
}
