//! Run manifests: what was run, on what, and what came out.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Serialize)]
pub struct Input {
    pub name: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub verified: bool,
}

#[derive(Serialize, Default)]
pub struct Manifest {
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub inputs: Vec<Input>,
    pub rows: Vec<BTreeMap<String, Value>>,
    pub artifacts: Vec<Artifact>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn config(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_string(), value.into());
    }

    pub fn input(&mut self, name: &str, content: &[u8]) {
        self.inputs.push(Input {
            name: name.to_string(),
            sha256: sha256_hex(content),
        });
    }

    /// Writes `content` to `path` and records it.
    pub fn write_artifact(&mut self, path: &Path, content: &str, verified: bool) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(Artifact {
            path: path.display().to_string(),
            sha256: sha256_hex(content.as_bytes()),
            verified,
        });
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}
