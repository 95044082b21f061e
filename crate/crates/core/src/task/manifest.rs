//! JSONL dataset manifests.
//!
//! Line 1 is a header record carrying the generation config; every following
//! line is one [`Task`]. Field order is fixed by the struct definitions, so
//! identical manifests serialize to identical bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Category, Task};
use crate::generators::DatasetConfig;

const FORMAT: &str = "gridrule-manifest";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub const ALL: [Split; 2] = [Split::Train, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub config: DatasetConfig,
    pub split: Split,
    pub tasks: Vec<Task>,
}

impl DatasetManifest {
    pub fn counts_by_category(&self) -> BTreeMap<Category, usize> {
        let mut counts = BTreeMap::new();
        for task in &self.tasks {
            *counts.entry(task.category()).or_insert(0) += 1;
        }
        counts
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    split: Split,
    config: DatasetConfig,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Schema {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl ManifestError {
    fn io(path: &Path, source: io::Error) -> Self {
        ManifestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn schema(path: &Path, line: usize, message: impl Into<String>) -> Self {
        ManifestError::Schema {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }
}

pub fn write_manifest(manifest: &DatasetManifest, path: impl AsRef<Path>) -> Result<(), ManifestError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| ManifestError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let header = Header {
        format: FORMAT.to_string(),
        version: VERSION,
        split: manifest.split,
        config: manifest.config.clone(),
    };
    let write = |out: &mut BufWriter<File>| -> io::Result<()> {
        serde_json::to_writer(&mut *out, &header)?;
        out.write_all(b"\n")?;
        for task in &manifest.tasks {
            serde_json::to_writer(&mut *out, task)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| ManifestError::io(path, e))
}

/// Reads a manifest and re-checks every task against its stored rule.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest, ManifestError> {
    read(path.as_ref(), true)
}

/// Reads a manifest checking only its structure and counts.
pub fn read_manifest_unchecked(path: impl AsRef<Path>) -> Result<DatasetManifest, ManifestError> {
    read(path.as_ref(), false)
}

fn read(path: &Path, check_rules: bool) -> Result<DatasetManifest, ManifestError> {
    let file = File::open(path).map_err(|e| ManifestError::io(path, e))?;
    let mut lines = BufReader::new(file).lines();

    let first = lines
        .next()
        .ok_or_else(|| ManifestError::schema(path, 1, "empty manifest"))?
        .map_err(|e| ManifestError::io(path, e))?;
    let header: Header = serde_json::from_str(&first)
        .map_err(|e| ManifestError::schema(path, 1, format!("bad header: {e}")))?;
    if header.format != FORMAT || header.version != VERSION {
        return Err(ManifestError::schema(
            path,
            1,
            format!("unsupported format {} v{}", header.format, header.version),
        ));
    }

    let mut tasks = Vec::new();
    let mut line_no = 1;
    for line in lines {
        line_no += 1;
        let line = line.map_err(|e| ManifestError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let task: Task = serde_json::from_str(&line)
            .map_err(|e| ManifestError::schema(path, line_no, e.to_string()))?;
        if check_rules {
            task.check_consistency()
                .map_err(|e| ManifestError::schema(path, line_no, format!("task {}: {e}", task.id)))?;
        }
        tasks.push(task);
    }

    let manifest = DatasetManifest {
        config: header.config,
        split: header.split,
        tasks,
    };
    let expected = manifest.config.split_sizes(manifest.split);
    let found = manifest.counts_by_category();
    for &category in &Category::ALL {
        let want = expected.get(&category).copied().unwrap_or(0);
        let have = found.get(&category).copied().unwrap_or(0);
        if want != have {
            return Err(ManifestError::schema(
                path,
                line_no + 1,
                format!("expected {want} {category} tasks, found {have} (truncated file?)"),
            ));
        }
    }
    Ok(manifest)
}
