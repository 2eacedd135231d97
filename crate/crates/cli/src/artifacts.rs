//! Output files. Every file carries the run configuration and the SHA-256
//! of its payload, so identical configurations give identical bytes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Writer {
    dir: PathBuf,
    config_line: String,
    config: serde_json::Value,
    written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path, cfg: &RunConfig) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let config = serde_json::to_value(cfg).map_err(io::Error::other)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_line: config.to_string(),
            config,
            written: Vec::new(),
        })
    }

    /// CSV with two leading comment lines: the run configuration and the
    /// hash of the table that follows.
    pub fn csv(&mut self, name: &str, body: &str) -> io::Result<PathBuf> {
        let text = format!(
            "# run_config: {}\n# content_sha256: {}\n{body}",
            self.config_line,
            sha256_hex(body.as_bytes())
        );
        self.put(name, text)
    }

    /// JSON object `{run_config, content_sha256, data}`; the hash covers
    /// the compact serialization of `data`.
    pub fn json(&mut self, name: &str, data: &impl Serialize) -> io::Result<PathBuf> {
        let data = serde_json::to_value(data).map_err(io::Error::other)?;
        let compact = data.to_string();
        let doc = serde_json::json!({
            "run_config": self.config,
            "content_sha256": sha256_hex(compact.as_bytes()),
            "data": data,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)? + "\n";
        self.put(name, text)
    }

    fn put(&mut self, name: &str, text: String) -> io::Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, text)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// Splits an annotated CSV into `(stored hash, body)`.
#[cfg(test)]
fn split_annotated(text: &str) -> Option<(&str, &str)> {
    let mut rest = text;
    let mut hash = None;
    while let Some(line) = rest.strip_prefix('#') {
        let end = line.find('\n')?;
        if let Some(h) = line[..end].trim().strip_prefix("content_sha256: ") {
            hash = Some(h);
        }
        rest = &line[end + 1..];
    }
    Some((hash?, rest))
}
