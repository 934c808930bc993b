//! Run manifests: a content hash of everything that determines the outputs.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// SHA-256 over version, subcommand and canonical inputs; outputs cite it.
    pub hash: String,
    pub version: String,
    pub subcommand: String,
    /// Seconds since the Unix epoch when the run started (not hashed).
    pub wall_clock: u64,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub parameters: serde_json::Value,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value, seed: Option<u64>) -> Self {
        let version = env!("CARGO_PKG_VERSION").to_string();
        let mut h = Sha256::new();
        h.update(version.as_bytes());
        h.update([0]);
        h.update(subcommand.as_bytes());
        h.update([0]);
        h.update(parameters.to_string().as_bytes());
        h.update([0]);
        h.update(seed.map_or(String::new(), |s| s.to_string()).as_bytes());
        let wall_clock = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            hash: hex::encode(h.finalize()),
            version,
            subcommand: subcommand.to_string(),
            wall_clock,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed,
            parameters,
        }
    }

    pub fn input(&mut self, p: &Path) {
        self.inputs.push(p.display().to_string());
    }

    pub fn output(&mut self, p: &Path) {
        self.outputs.push(p.display().to_string());
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Numerical(e.to_string()))?;
        alphaflow::domain::io::atomic_write(path, text.as_bytes())?;
        Ok(())
    }
}

/// `<file>.manifest.json` next to an output file.
pub fn sidecar(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_wall_clock_and_tracks_parameters() {
        let a = RunManifest::new("sweep", serde_json::json!({"a": 1}), Some(3));
        let mut b = RunManifest::new("sweep", serde_json::json!({"a": 1}), Some(3));
        b.wall_clock += 100;
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, RunManifest::new("sweep", serde_json::json!({"a": 2}), Some(3)).hash);
        assert_ne!(a.hash, RunManifest::new("simulate", serde_json::json!({"a": 1}), Some(3)).hash);
        assert_eq!(sidecar(Path::new("/x/r.json")), Path::new("/x/r.json.manifest.json"));
    }
}
