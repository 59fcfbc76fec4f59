//! Run manifest: config echo, input digests, seed, tool version and stage
//! timings, written next to every output so a run can be reproduced from the
//! manifest alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    /// Stable id: digest of version, command, config, inputs and seed.
    pub id: String,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub created_unix: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub timings_ms: BTreeMap<String, u64>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

impl Manifest {
    pub fn new(
        command: &str,
        config: serde_json::Value,
        inputs: Vec<InputDigest>,
        seed: Option<u64>,
    ) -> Self {
        let version = env!("CARGO_PKG_VERSION");
        let mut hasher = Sha256::new();
        hasher.update(version.as_bytes());
        hasher.update(command.as_bytes());
        hasher.update(config.to_string().as_bytes());
        for input in &inputs {
            hasher.update(input.path.as_bytes());
            hasher.update(input.sha256.as_bytes());
        }
        if let Some(seed) = seed {
            hasher.update(seed.to_le_bytes());
        }
        Manifest {
            id: format!("{:x}", hasher.finalize()),
            tool: "motif-rules",
            version,
            command: command.to_string(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config,
            inputs,
            seed,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn record_timing(&mut self, stage: &str, ms: u64) {
        self.timings_ms.insert(stage.to_string(), ms);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
