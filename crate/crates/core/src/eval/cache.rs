//! On-disk response cache, one JSON file per (task, model, temperature, sample).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::client::TokenUsage;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CachedResponse {
    pub task_id: String,
    pub model: String,
    pub temperature: f64,
    pub sample: u32,
    pub text: String,
    pub latency_ms: u64,
    pub usage: Option<TokenUsage>,
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O error at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("corrupt cache entry {path}: {reason}")]
    CacheCorruption { path: PathBuf, reason: String },
}

#[derive(Debug, Clone)]
pub struct ResponseCache {
    root: PathBuf,
}

/// Keeps file names portable: anything outside `[A-Za-z0-9._-]` becomes `_`.
fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

impl ResponseCache {
    pub fn new(root: impl Into<PathBuf>) -> ResponseCache {
        ResponseCache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entry_path(&self, task_id: &str, model: &str, temperature: f64, sample: u32) -> PathBuf {
        self.root
            .join(sanitize(model))
            .join(format!("{}__t{temperature}__s{sample}.json", sanitize(task_id)))
    }

    pub fn get(
        &self,
        task_id: &str,
        model: &str,
        temperature: f64,
        sample: u32,
    ) -> Result<Option<CachedResponse>, CacheError> {
        let path = self.entry_path(task_id, model, temperature, sample);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        let corrupt = |reason: String| CacheError::CacheCorruption { path: path.clone(), reason };
        let entry: CachedResponse = serde_json::from_slice(&bytes).map_err(|e| corrupt(e.to_string()))?;
        if entry.task_id != task_id || entry.model != model || entry.temperature != temperature || entry.sample != sample {
            return Err(corrupt(format!(
                "entry is keyed ({}, {}, {}, {})",
                entry.task_id, entry.model, entry.temperature, entry.sample
            )));
        }
        Ok(Some(entry))
    }

    /// Writes to a temporary sibling and renames it into place, so readers
    /// never observe a partial entry.
    pub fn put(&self, entry: &CachedResponse) -> Result<(), CacheError> {
        let path = self.entry_path(&entry.task_id, &entry.model, entry.temperature, entry.sample);
        let io_err = |source| CacheError::Io { path: path.clone(), source };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
        let json = serde_json::to_vec_pretty(entry).expect("cache entries serialize");
        let write = || -> io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&json)?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        };
        write().map_err(io_err)
    }
}
