//! Flags shared by `run` and `serve`.

use std::path::{Path, PathBuf};

use clap::Args;
use intentnav_core::{Config, Method, Scenario};

use crate::Failure;

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Bundled scenario id (s1..s4) or path to a scenario TOML file.
    #[arg(long)]
    pub scenario: String,
    /// Comma-separated methods: boir, boir-airm, rbii1, ecf.
    #[arg(long, value_delimiter = ',', default_value = "boir,boir-airm,rbii1,ecf")]
    pub methods: Vec<Method>,
    /// Base seed; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// TOML file with parameter overrides.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Estimator tick rate in Hz.
    #[arg(long)]
    pub tick_rate: Option<f64>,
    /// Single parameter override, e.g. `estimator.delta=0.1`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ModelArgs {
    pub fn methods(&self) -> Vec<Method> {
        let mut out = Vec::new();
        for m in &self.methods {
            if !out.contains(m) {
                out.push(*m);
            }
        }
        out
    }

    pub fn scenario(&self) -> Result<Scenario, Failure> {
        Scenario::resolve(&self.scenario)
            .map_err(|e| Failure::Usage(format!("scenario `{}`: {e}", self.scenario)))
    }

    pub fn config(&self) -> Result<Config, Failure> {
        let mut config = match &self.config {
            Some(path) => Config::load(path).map_err(|e| Failure::Usage(e.to_string()))?,
            None => Config::default(),
        };
        if let Some(rate) = self.tick_rate {
            config.estimator.tick_rate = rate;
        }
        for o in &self.overrides {
            config = apply_override(config, o).map_err(Failure::Usage)?;
        }
        config
            .validate()
            .map_err(|e| Failure::Usage(format!("config: {e}")))?;
        Ok(config)
    }
}

/// Sets one dotted key in `config`. The value is read as a TOML value,
/// falling back to a bare string.
pub fn apply_override(config: Config, assignment: &str) -> Result<Config, String> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override `{assignment}` is not KEY=VALUE"))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let mut root = toml::Value::try_from(config).map_err(|e| e.to_string())?;
    let mut slot = &mut root;
    let mut parts = key.trim().split('.').peekable();
    while let Some(part) = parts.next() {
        let table = slot
            .as_table_mut()
            .ok_or_else(|| format!("override `{key}`: `{part}` is not a section"))?;
        if parts.peek().is_none() {
            if !table.contains_key(part) {
                return Err(format!("override `{key}`: unknown parameter"));
            }
            table.insert(part.to_string(), value);
            break;
        }
        slot = table
            .get_mut(part)
            .ok_or_else(|| format!("override `{key}`: unknown section `{part}`"))?;
    }
    root.try_into()
        .map_err(|e: toml::de::Error| format!("override `{key}`: {}", e.message()))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(
    path: &Path,
    write: impl FnOnce(&mut std::fs::File) -> std::io::Result<()>,
) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write(tmp.as_file_mut())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
