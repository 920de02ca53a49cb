//! Run manifests: a JSON record of what was executed, with what seeds,
//! and which files (with digests) came out of it.
//!
//! The manifest is written atomically after all data files, so a manifest
//! on disk always describes complete outputs. Re-running the same command
//! with the same seeds reproduces every referenced file byte for byte.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::CliResult;
use crate::util::{write_atomic, OutputCollector};

#[derive(Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Subcommand (and preset name, where applicable).
    pub command: String,
    pub scale: String,
    pub master_seed: u64,
    pub jobs: usize,
    /// Echo of the fully resolved configuration this run executed.
    pub config: serde_json::Value,
    pub started_unix: u64,
    pub wall_seconds: f64,
    pub outputs: Vec<OutputFile>,
}

pub struct ManifestBuilder {
    command: String,
    scale: String,
    master_seed: u64,
    jobs: usize,
    config: serde_json::Value,
    started: std::time::Instant,
    started_unix: u64,
}

impl ManifestBuilder {
    pub fn new(command: &str, scale: &str, master_seed: u64, jobs: usize) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            scale: scale.to_string(),
            master_seed,
            jobs,
            config: serde_json::Value::Null,
            started: std::time::Instant::now(),
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// Attach the resolved configuration echo.
    pub fn config(mut self, config: impl Serialize) -> Self {
        self.config = serde_json::to_value(config).unwrap_or(serde_json::Value::Null);
        self
    }

    /// Finalise and write `manifest.json` into the collector's directory.
    pub fn write(self, out: &OutputCollector) -> CliResult<()> {
        let manifest = RunManifest {
            tool: "phasekit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command,
            scale: self.scale,
            master_seed: self.master_seed,
            jobs: self.jobs,
            config: self.config,
            started_unix: self.started_unix,
            wall_seconds: self.started.elapsed().as_secs_f64(),
            outputs: out
                .files()
                .iter()
                .map(|(file, sha256, bytes)| OutputFile {
                    file: file.clone(),
                    sha256: sha256.clone(),
                    bytes: *bytes,
                })
                .collect(),
        };
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| crate::error::CliError::Runtime(e.to_string()))?;
        write_atomic(&out.dir().join("manifest.json"), format!("{json}\n").as_bytes())
    }
}
