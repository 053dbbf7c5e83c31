//! Run configurations: everything needed to reproduce one simulation.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::angles::Angle;
use crate::configuration::{ConfigFile, Configuration};
use crate::protocol::ProtocolKind;
use crate::simulator::{run, Adversary, AdversarySpec, RunOptions, RunResult, SetupError, Simulation};

/// Start configuration, written inline or as a path to a configuration file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialConfig {
    Inline(ConfigFile),
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub protocol: ProtocolKind,
    pub initial: InitialConfig,
    pub adversary: AdversarySpec,
    pub delta: Angle,
    /// Defaults to `400 * n * ceil(1 / delta)` commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunConfigError {
    #[error("run config is not a JSON object: {0}")]
    NotAnObject(String),
    #[error("run config field `{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error("run config has unknown field `{0}`")]
    UnknownField(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl RunConfigError {
    fn field(field: &'static str, message: impl ToString) -> Self {
        RunConfigError::Field { field, message: message.to_string() }
    }

    /// The offending field, when the problem is tied to one.
    pub fn field_name(&self) -> Option<&'static str> {
        match self {
            RunConfigError::Field { field, .. } => Some(field),
            _ => None,
        }
    }
}

const FIELDS: &[&str] = &["protocol", "initial", "adversary", "delta", "budget", "seed", "trace_out"];

fn take<T: for<'de> Deserialize<'de>>(
    obj: &serde_json::Map<String, Value>,
    field: &'static str,
) -> Result<Option<T>, RunConfigError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => T::deserialize(v).map(Some).map_err(|e| RunConfigError::field(field, e)),
    }
}

fn require<T: for<'de> Deserialize<'de>>(
    obj: &serde_json::Map<String, Value>,
    field: &'static str,
) -> Result<T, RunConfigError> {
    take(obj, field)?.ok_or_else(|| RunConfigError::field(field, "missing"))
}

impl RunConfig {
    /// Parses field by field so every diagnostic names the field at fault.
    pub fn from_json(text: &str) -> Result<Self, RunConfigError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| RunConfigError::NotAnObject(e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(RunConfigError::NotAnObject("top level must be an object".into()));
        };
        if let Some(k) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            return Err(RunConfigError::UnknownField(k.clone()));
        }
        let config = RunConfig {
            protocol: require(&obj, "protocol")?,
            initial: require(&obj, "initial")?,
            adversary: require(&obj, "adversary")?,
            delta: require(&obj, "delta")?,
            budget: take(&obj, "budget")?,
            seed: take(&obj, "seed")?.unwrap_or(0),
            trace_out: take(&obj, "trace_out")?,
        };
        config.adversary.validate().map_err(|e| RunConfigError::field("adversary", e))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, RunConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| RunConfigError::Io { path: path.to_owned(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("run config serializes")
    }

    /// Relative configuration paths are taken from `base`.
    pub fn initial_configuration(&self, base: Option<&Path>) -> Result<Configuration, RunConfigError> {
        let file = match &self.initial {
            InitialConfig::Inline(f) => f.clone(),
            InitialConfig::Path(p) => {
                let p = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                let text = fs::read_to_string(&p)
                    .map_err(|e| RunConfigError::Io { path: p.clone(), message: e.to_string() })?;
                serde_json::from_str(&text).map_err(|e| RunConfigError::field("initial", e))?
            }
        };
        Configuration::from_file(&file).map_err(|e| RunConfigError::field("initial", e))
    }

    pub fn simulation(&self, base: Option<&Path>) -> Result<Simulation, RunConfigError> {
        let config = self.initial_configuration(base)?;
        Simulation::new(Arc::from(self.protocol.build()), &config, self.delta.clone()).map_err(|e| {
            match e {
                SetupError::NonPositiveDelta | SetupError::DeltaTooLarge => {
                    RunConfigError::field("delta", e)
                }
                SetupError::RobotCount { .. } => RunConfigError::field("initial", e),
                SetupError::Config(c) => RunConfigError::field("initial", c),
            }
        })
    }

    pub fn adversary_for(&self, n: usize) -> Box<dyn Adversary> {
        self.adversary.build(n, self.seed)
    }

    /// Runs to completion; `record` keeps the full trace.
    pub fn execute(&self, base: Option<&Path>, record: bool) -> Result<RunResult, RunConfigError> {
        let mut sim = self.simulation(base)?;
        let mut adversary = self.adversary_for(sim.robots().len());
        let opts = RunOptions { budget: self.budget, record, hashes: record };
        Ok(run(&mut sim, adversary.as_mut(), &opts))
    }
}
