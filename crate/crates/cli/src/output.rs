//! Atomic file output and plot tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::RunError;

/// Files written by one run.
#[derive(Clone, Debug, Default)]
pub struct Sink {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), written: Vec::new() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes through a temporary file in the target directory, then renames.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, RunError> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(bytes)?;
        tmp.persist(&path).map_err(|e| RunError::Io(e.error))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, RunError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| RunError::Io(e.into_error()))?;
        self.write(name, &bytes)
    }

    /// One tab-separated curve with a header line.
    pub fn plot(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, RunError> {
        let mut text = header.join("\t");
        text.push('\n');
        for row in rows {
            text.push_str(&row.join("\t"));
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, RunError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| RunError::Io(e.into()))?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }
}

fn csv_err(e: csv::Error) -> RunError {
    RunError::Io(std::io::Error::other(e))
}

/// File-name form of a group spec: `bs:1:2` becomes `bs1-2`.
pub fn slug(family: &str) -> String {
    let mut parts = family.split(':');
    let head = parts.next().unwrap_or_default().to_string();
    let rest: Vec<&str> = parts.collect();
    if rest.is_empty() {
        head
    } else {
        format!("{head}{}", rest.join("-"))
    }
}

pub fn float(x: f64) -> String {
    format!("{x:e}")
}
