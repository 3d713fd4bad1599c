use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::objective::Scenario;
use crate::optimizers::{Method, MethodParams};
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Complete,
    Diverged,
    Failed,
}

/// Provenance record for one output directory. The only file carrying
/// wall-clock times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub scenario_hash: String,
    /// Covers the scenario plus everything else that shapes the outputs.
    pub inputs_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<MethodParams>,
    pub seed: u64,
    pub status: RunStatus,
    pub started_unix_ms: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finished_unix_ms: Option<u128>,
    pub outputs: Vec<String>,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// SHA-256 of the compact JSON form. Object keys of `serde_json::Value` are
/// sorted, so equal values hash equally.
pub fn json_hash<T: Serialize>(value: &T) -> String {
    let canonical = serde_json::to_value(value).expect("hash input serializes to JSON");
    let bytes = serde_json::to_vec(&canonical).expect("JSON value serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn scenario_hash(scenario: &Scenario) -> String {
    json_hash(scenario)
}

impl RunManifest {
    pub fn start(command: &str, scenario: &Scenario, inputs: &serde_json::Value, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            scenario_hash: scenario_hash(scenario),
            inputs_hash: json_hash(inputs),
            method: None,
            params: None,
            seed,
            status: RunStatus::Running,
            started_unix_ms: now_ms(),
            finished_unix_ms: None,
            outputs: vec![MANIFEST_FILE.to_string()],
        }
    }

    pub fn with_method(mut self, method: Method, params: MethodParams) -> Self {
        self.method = Some(method);
        self.params = Some(params);
        self
    }

    pub fn expect_outputs(mut self, files: &[&str]) -> Self {
        self.outputs.extend(files.iter().map(|f| f.to_string()));
        self
    }

    pub fn finish(&mut self, status: RunStatus) {
        self.status = status;
        self.finished_unix_ms = Some(now_ms());
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
    }
}
