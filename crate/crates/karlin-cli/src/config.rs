//! TOML experiment configuration: schema, parsing, and validation.
//!
//! A config file has a required `version` tag, a `[distribution]`
//! block selecting the urn family, an `[experiment]` block with the
//! sampling plan, and optional `[tolerance]` and `[output]` blocks.
//! Parsing rejects unknown keys and reports every validation problem
//! at once, each tagged with the offending key path.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use karlin::{DistributionSpec, ExperimentConfig, SamplingRegime, Tolerances};

pub const SUPPORTED_VERSION: u32 = 1;

fn default_kmax() -> u32 {
    1
}
fn default_regime() -> SamplingRegime {
    SamplingRegime::Fixed
}
fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv]
}

/// Sampling plan of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSettings {
    /// Ball budget (exact count or Poisson intensity).
    pub n: u64,
    /// Ascending checkpoint times in (0, 1], ending at 1.
    pub grid: Vec<f64>,
    /// Largest occupancy threshold tracked.
    #[serde(default = "default_kmax")]
    pub kmax: u32,
    #[serde(default = "default_regime")]
    pub regime: SamplingRegime,
    /// Number of independent replications.
    pub m_reps: u64,
    pub master_seed: u64,
}

/// File format of a written table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Where and how result tables are written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    /// Target directory; falls back to `--out-dir`, then the
    /// `KARLIN_OUT_DIR` environment variable, then the working
    /// directory.
    #[serde(default)]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings { directory: None, formats: default_formats() }
    }
}

/// Parsed experiment config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub version: u32,
    pub distribution: DistributionSpec,
    pub experiment: ExperimentSettings,
    #[serde(default)]
    pub tolerance: Tolerances,
    #[serde(default)]
    pub output: OutputSettings,
}

impl ConfigFile {
    /// Assemble the core experiment description this file configures.
    pub fn experiment_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            distribution: self.distribution.clone(),
            n: self.experiment.n,
            grid: self.experiment.grid.clone(),
            kmax: self.experiment.kmax,
            regime: self.experiment.regime,
            m_reps: self.experiment.m_reps,
            master_seed: self.experiment.master_seed,
            tolerances: self.tolerance,
        }
    }

    /// All semantic problems, each prefixed with its key path; empty
    /// when the file is valid.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.version != SUPPORTED_VERSION {
            errors.push(format!(
                "version: unsupported config version {}, expected {SUPPORTED_VERSION}",
                self.version
            ));
        }
        for msg in self.experiment_config().validation_errors() {
            errors.push(attach_key_path(&msg));
        }
        if self.output.formats.is_empty() {
            errors.push("output.formats: needs at least one entry".to_string());
        }
        errors
    }
}

fn attach_key_path(msg: &str) -> String {
    let rules: &[(&str, &str)] = &[
        ("grid", "experiment.grid"),
        ("theta out of range", "distribution.theta"),
        ("finite distribution", "distribution.probs"),
        ("n must", "experiment.n"),
        ("m_reps", "experiment.m_reps"),
        ("kmax", "experiment.kmax"),
        ("tolerance relative", "tolerance.relative"),
        ("tolerance se_multiplier", "tolerance.se_multiplier"),
        ("tolerance ks_level", "tolerance.ks_level"),
        ("tolerance increment_corr", "tolerance.increment_corr"),
    ];
    for (needle, path) in rules {
        if msg.contains(needle) {
            return format!("{path}: {msg}");
        }
    }
    msg.to_string()
}

/// Parse and validate a config file. Returns the validated config, or
/// every problem found: a syntax error comes back alone with its line
/// number, while unknown keys and semantic violations are collected
/// exhaustively.
pub fn parse_config(text: &str) -> Result<ConfigFile, Vec<String>> {
    match toml::from_str::<ConfigFile>(text) {
        Ok(cfg) => {
            let errors = cfg.validation_errors();
            if errors.is_empty() {
                Ok(cfg)
            } else {
                Err(errors)
            }
        }
        Err(typed_err) => match toml::from_str::<toml::Value>(text) {
            Err(syntax_err) => Err(vec![syntax_err.to_string()]),
            Ok(value) => {
                let mut errors = structural_errors(&value);
                if errors.is_empty() {
                    errors.push(typed_err.to_string());
                }
                Err(errors)
            }
        },
    }
}

const ROOT_KEYS: &[&str] = &["version", "distribution", "experiment", "tolerance", "output"];
const ROOT_REQUIRED: &[&str] = &["version", "distribution", "experiment"];
const EXPERIMENT_KEYS: &[&str] = &["n", "grid", "kmax", "regime", "m_reps", "master_seed"];
const TOLERANCE_KEYS: &[&str] = &["relative", "se_multiplier", "ks_level", "increment_corr"];
const OUTPUT_KEYS: &[&str] = &["directory", "formats"];

fn structural_errors(value: &toml::Value) -> Vec<String> {
    let mut errors = Vec::new();
    let Some(root) = value.as_table() else {
        return vec!["config root must be a table".to_string()];
    };
    collect_keys(root, "", ROOT_KEYS, &mut errors);
    for key in ROOT_REQUIRED {
        if !root.contains_key(*key) {
            errors.push(format!("missing required key `{key}`"));
        }
    }
    if let Some(block) = root.get("distribution").and_then(|v| v.as_table()) {
        let allowed: &[&str] = match block.get("kind").and_then(|v| v.as_str()) {
            Some("zipf") => &["kind", "theta", "truncation_index", "tail_mass_tol"],
            Some("log_zipf") => &["kind", "truncation_index", "tail_mass_tol"],
            Some("finite_explicit") => &["kind", "probs"],
            Some(other) => {
                errors.push(format!(
                    "distribution.kind: unknown kind `{other}`, expected zipf, log_zipf, or finite_explicit"
                ));
                &[]
            }
            None => {
                errors.push("distribution.kind: missing required key `kind`".to_string());
                &[]
            }
        };
        if !allowed.is_empty() {
            collect_keys(block, "distribution.", allowed, &mut errors);
        }
    }
    for (name, allowed) in [
        ("experiment", EXPERIMENT_KEYS),
        ("tolerance", TOLERANCE_KEYS),
        ("output", OUTPUT_KEYS),
    ] {
        if let Some(block) = root.get(name).and_then(|v| v.as_table()) {
            collect_keys(block, &format!("{name}."), allowed, &mut errors);
        }
    }
    errors
}

fn collect_keys(
    table: &toml::map::Map<String, toml::Value>,
    prefix: &str,
    allowed: &[&str],
    errors: &mut Vec<String>,
) {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            errors.push(format!("unknown key `{prefix}{key}`"));
        }
    }
}
