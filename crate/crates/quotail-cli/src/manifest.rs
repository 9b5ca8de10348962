//! Run manifests: a small JSON record written beside every output file.

use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;

use crate::error::CliError;

/// Provenance for one output file: which subcommand produced it, from
/// which config (by content hash), with which seed, when.
///
/// Timestamps are the only fields that vary between identical reruns;
/// reproducibility checks should compare the output files themselves.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the config file bytes, or `"none"` without a config.
    pub config_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stream_id: Option<u64>,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
}

fn now_rfc3339() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true)
}

/// The manifest path for an output file: `<out>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    /// Start the clock for a run.
    pub fn begin(
        command: &str,
        config_digest: Option<String>,
        seed: Option<u64>,
        stream_id: Option<u64>,
    ) -> Self {
        RunManifest {
            command: command.to_string(),
            config_digest: config_digest.unwrap_or_else(|| "none".to_string()),
            seed,
            stream_id,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: now_rfc3339(),
            finished: String::new(),
        }
    }

    /// Stamp the finish time and write the manifest beside `out`.
    pub fn finish_and_write(mut self, out: &Path) -> Result<(), CliError> {
        self.finished = now_rfc3339();
        let path = manifest_path(out);
        let text = serde_json::to_string_pretty(&self)?;
        std::fs::write(&path, text + "\n").map_err(CliError::io(path.display().to_string()))
    }
}
