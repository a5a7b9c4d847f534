//! Run manifests, atomic file output, and the CSV sample format.

use nalgebra::DVector;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Record that makes a run reproducible: command, fully resolved
/// configuration, input digest, seed and tool version.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub body_digest: String,
    pub seed: u64,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, body_digest: String, seed: u64) -> Self {
        RunManifest {
            schema_version: 1,
            command: command.to_owned(),
            config,
            body_digest,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            started_at: now_rfc3339(),
            finished_at: String::new(),
        }
    }

    pub fn finish(&mut self) {
        self.finished_at = now_rfc3339();
    }
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Micros, true)
}

/// Hex SHA-256 of a byte string.
pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes via a temporary sibling and renames, so no partial file is
/// ever visible under the final name.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = PathBuf::from(path);
    let mut name = tmp
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".tmp");
    tmp.set_file_name(name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV sample stream: header `x_1..x_n`, one row per sample, 17
/// significant decimal digits per value.
pub fn samples_to_csv(samples: &[DVector<f64>], dim: usize) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=dim).map(|i| format!("x_{i}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for s in samples {
        let row: Vec<String> = s.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Serializes a JSON document with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest_bytes(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let csv = samples_to_csv(&[dvector![0.5, -1.0 / 3.0]], 2);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x_1,x_2");
        let row = lines.next().unwrap();
        assert!(row.starts_with("5.0000000000000000e-1,"));
        let second: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(second, -1.0 / 3.0);
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        atomic_write(&path, b"one").unwrap();
        atomic_write(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert!(!dir.path().join("out.txt.tmp").exists());
    }
}
