use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::configuration::ConfigFile;
use crate::runconfig::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Index of the failing instance in its source.
    pub instance: u64,
    pub config: ConfigFile,
    pub witness: String,
    /// Set when the failure came from a simulation that can be replayed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunConfig>,
}

/// Outcome of checking one property over many instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub instances: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Time spent on this property, summed over workers.
    pub wall_ms: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, String>,
}

impl PropertyReport {
    pub fn new(property: impl Into<String>) -> Self {
        PropertyReport {
            property: property.into(),
            instances: 0,
            counterexample: None,
            wall_ms: 0,
            stats: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn stat(&mut self, key: &str, value: impl ToString) {
        self.stats.insert(key.to_string(), value.to_string());
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} ({} instances, {} ms)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.property,
            self.instances,
            self.wall_ms
        );
        for (k, v) in &self.stats {
            let _ = write!(s, "\n    {k}: {v}");
        }
        if let Some(c) = &self.counterexample {
            let pos: Vec<String> = c.config.robots.iter().map(|r| r.pos.to_string()).collect();
            let _ = write!(s, "\n    instance {}: {{{}}}\n    {}", c.instance, pos.join(", "), c.witness);
        }
        s
    }
}

pub fn to_text(reports: &[PropertyReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&r.to_text());
        s.push('\n');
    }
    s
}

pub fn all_passed(reports: &[PropertyReport]) -> bool {
    reports.iter().all(PropertyReport::passed)
}
