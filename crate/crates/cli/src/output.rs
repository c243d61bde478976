//! Output files and the run manifest.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

/// Files produced by one command, in write order.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    columns: Vec<(String, String)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), contents.into()));
    }

    /// CSV file plus its entry in `columns.txt`.
    pub fn csv(&mut self, name: &str, contents: String, columns: &str) {
        self.add(name, contents);
        self.columns.push((name.to_string(), columns.to_string()));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
        text.push('\n');
        self.add(name, text);
        Ok(())
    }

    fn column_doc(&self) -> String {
        let mut out = String::new();
        for (file, cols) in &self.columns {
            out.push_str(&format!("# {file}\n"));
            for (i, c) in cols.split(',').enumerate() {
                out.push_str(&format!("{:>3}  {}\n", i + 1, c.trim()));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileHash {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub outputs: Vec<FileHash>,
}

impl Manifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write every file, `columns.txt` and the manifest into `dir`.
pub fn write_outputs(
    dir: &Path,
    command: &str,
    config: &ExperimentConfig,
    mut outputs: Outputs,
) -> CliResult<Manifest> {
    if !outputs.columns.is_empty() {
        let doc = outputs.column_doc();
        outputs.add("columns.txt", doc);
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut hashes = Vec::new();
    for (name, bytes) in &outputs.files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        hashes.push(FileHash {
            file: name.clone(),
            sha256: sha256_hex(bytes),
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        seed: config.seed,
        config: config.clone(),
        outputs: hashes,
    };
    let mut text =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    let path = dir.join(MANIFEST);
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(manifest)
}
