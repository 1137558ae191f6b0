//! Output directory bookkeeping: every written file is hashed for the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cavityflow::Warning;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub scenario: String,
    pub config_hash: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub warnings: Vec<Warning>,
    /// Every file of the run except the manifest itself.
    pub files: Vec<FileEntry>,
}

pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.retain(|f| f.path != rel);
        self.files.push(FileEntry { path: rel.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(rel, text.as_bytes())
    }

    /// CSV with a header row; floats use the shortest round-trip form.
    pub fn write_csv<R, I>(&mut self, rel: &str, header: &[&str], rows: I) -> Result<()>
    where
        R: IntoIterator,
        R::Item: ToString,
        I: IntoIterator<Item = R>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.into_iter().map(|v| v.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
        self.write(rel, &bytes)
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    /// Write the manifest and return it.
    pub fn finish(mut self, mut manifest: Manifest) -> Result<Manifest> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        manifest.files = self.files.clone();
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(self.root.join(MANIFEST), text)?;
        Ok(manifest)
    }
}
