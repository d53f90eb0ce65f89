//! Run manifest: what was asked, what was written, how long it took.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;

pub const MANIFEST_NAME: &str = "manifest.json";

pub const UNITS: &str = "hbar = m = omega_x = 1; lengths in a_x = sqrt(hbar/(m omega_x)); \
     times in 1/omega_x except schedule.t_end and schedule.t_off, which are in trap periods 2 pi/omega_x";

pub const DETERMINISM: &str = "no random numbers are drawn; identical configs on the same build \
     produce byte-identical CSV and grid files (timings in this manifest differ)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Complete,
    /// The run stopped early; files listed were written before the failure.
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: ScenarioConfig,
    pub units: String,
    pub determinism: String,
    pub warnings: Vec<String>,
    pub files: Vec<FileEntry>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
    /// Scalar results (B_rot, mu, ...).
    pub results: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(config: ScenarioConfig, warnings: Vec<String>) -> Self {
        Self {
            status: Status::Partial,
            error: None,
            config,
            units: UNITS.into(),
            determinism: DETERMINISM.into(),
            warnings,
            files: Vec::new(),
            timings: BTreeMap::new(),
            results: BTreeMap::new(),
        }
    }

    /// Records a written file, relative to `root`.
    pub fn add_file(&mut self, root: &Path, path: &Path) -> io::Result<()> {
        let bytes = fs::read(path)?;
        let rel = path.strip_prefix(root).unwrap_or(path);
        let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        self.files.push(FileEntry { path: rel, bytes: bytes.len() as u64, sha256: sha256_hex(&bytes) });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(dir.join(MANIFEST_NAME), text + "\n")
    }

    pub fn read(dir: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
