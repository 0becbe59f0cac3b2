//! Run records: every command persists its parameters and result payload as
//! JSON so a run can be reproduced exactly (same parameters and seeds give
//! the same payload bit for bit; only the timestamp differs).

use std::io;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub params: serde_json::Value,
    pub version: String,
    pub timestamp_unix_s: u64,
    pub payload: serde_json::Value,
}

impl RunRecord {
    pub fn new(command: &str, params: serde_json::Value, payload: serde_json::Value) -> Self {
        RunRecord {
            command: command.to_string(),
            params,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            payload,
        }
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut text = serde_json::to_string_pretty(self).expect("record serializes");
        text.push('\n');
        std::fs::write(path, text)
    }
}
