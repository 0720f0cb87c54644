//! Run manifests: what was run, with which resolved config, and digests of
//! everything it wrote. A manifest can be passed back as `--config`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{parse_value, ConfigError, Format, RunConfig};

pub const TOOL: &str = "hybrid-finger";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: String,
    pub config: RunConfig,
    pub outputs: Vec<OutputDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl OutputDigest {
    pub fn of(file: &str, contents: &[u8]) -> Self {
        OutputDigest {
            file: file.to_string(),
            sha256: sha256_hex(contents),
        }
    }
}

/// Reads either a plain config or a manifest (recognized by its `tool` and
/// `config` keys, JSON only). Returns the unresolved config.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{origin}: {e}")))?;
    let format = Format::from_path(path)?;
    if let Format::Json = format {
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| ConfigError(format!("{origin}: {e}")))?;
        let is_manifest = value
            .as_object()
            .is_some_and(|o| o.contains_key("tool") && o.contains_key("config"));
        if is_manifest {
            let manifest: RunManifest = parse_value(&text, Format::Json, &origin)?;
            return Ok(manifest.config);
        }
    }
    parse_value(&text, format, &origin)
}
