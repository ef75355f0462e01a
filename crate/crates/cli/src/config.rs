//! Experiment configs and run manifests.
//!
//! A manifest is itself a valid config: feeding it back through `--config`
//! reproduces the run.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use recur_core::{ModelSpec, SourceModel};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::Cli;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_PRESET: &str = "bernoulli-0.3";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT: &str = "out";

/// Invalid input: exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// A run refused by a size guard: exit code 3.
#[derive(Debug)]
pub struct GuardError(pub String);

impl fmt::Display for GuardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GuardError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// A model given inline or by preset name / file path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Inline(ModelSpec),
    Named(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: Option<u32>,
    pub command: Option<String>,
    pub model: Option<ModelRef>,
    pub model_id: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub params: Map<String, Value>,
    /// Written by manifests, ignored on input.
    #[allow(dead_code)]
    pub version: Option<String>,
    #[serde(skip)]
    pub dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| config_error(format!("config {}: {e}", path.display())))?;
        if let Some(v) = cfg.schema_version {
            if v != SCHEMA_VERSION {
                return Err(config_error(format!(
                    "config schema_version {v} is not supported (expected {SCHEMA_VERSION})"
                )));
            }
        }
        cfg.dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }
}

/// Flags layered over the config file's `params`, then defaults.
pub fn merge_params<T: Serialize + DeserializeOwned>(file: &Map<String, Value>, flags: &T) -> Result<T> {
    let mut merged = file.clone();
    if let Value::Object(set) = serde_json::to_value(flags)? {
        merged.extend(set);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| config_error(format!("params: {e}")))
}

pub struct ResolvedModel {
    pub id: String,
    pub spec: ModelSpec,
    pub model: SourceModel,
}

fn load_model_file(path: &Path) -> Result<(String, ModelSpec)> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read model file {}: {e}", path.display())))?;
    let spec = ModelSpec::from_json(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| spec.kind.clone());
    Ok((id, spec))
}

fn preset(name: &str) -> Result<ModelSpec> {
    ModelSpec::preset(name).ok_or_else(|| {
        config_error(format!("unknown preset \"{name}\" (known: {})", ModelSpec::PRESETS.join(", ")))
    })
}

/// `--model` / `--preset` beat the config's model, which beats the default preset.
pub fn resolve_model(cli: &Cli, cfg: &ExperimentConfig) -> Result<ResolvedModel> {
    let (id, spec) = if let Some(path) = &cli.model {
        load_model_file(path)?
    } else if let Some(name) = &cli.preset {
        (name.clone(), preset(name)?)
    } else {
        match &cfg.model {
            Some(ModelRef::Inline(spec)) => (cfg.model_id.clone().unwrap_or_else(|| spec.kind.clone()), spec.clone()),
            Some(ModelRef::Named(name)) => match ModelSpec::preset(name) {
                Some(spec) => (name.clone(), spec),
                None => load_model_file(&cfg.dir.join(name))?,
            },
            None => (DEFAULT_PRESET.to_string(), preset(DEFAULT_PRESET)?),
        }
    };
    let model = spec.build().map_err(|e| config_error(format!("model \"{id}\": {e}")))?;
    Ok(ResolvedModel { id, spec: ModelSpec::from(&model), model })
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, P: Serialize> {
    pub schema_version: u32,
    pub version: &'static str,
    pub command: &'a str,
    pub model_id: &'a str,
    pub model: &'a ModelSpec,
    pub seed: u64,
    pub params: &'a P,
}

pub fn write_manifest<P: Serialize>(out: &Path, manifest: &Manifest<'_, P>) -> Result<()> {
    let path = out.join("manifest.json");
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}
