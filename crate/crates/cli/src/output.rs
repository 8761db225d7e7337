//! Deterministic output files carrying the configuration and data hashes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use topdc_core::provenance::Provenance;

use crate::config::Format;
use crate::error::{CliError, CliResult};
use crate::setup::DataHashes;

#[derive(Debug, Clone, Serialize)]
pub struct DataHash {
    pub source: String,
    pub sha256: String,
}

/// Provenance block shared by every file of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_sha256: String,
    pub data_sha256: Vec<DataHash>,
}

impl Header {
    pub fn new(command: &'static str, config_sha256: String, data: &DataHashes) -> Self {
        Self {
            tool: "topdc",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_sha256,
            data_sha256: data
                .0
                .iter()
                .map(|(source, sha256)| DataHash {
                    source: source.clone(),
                    sha256: sha256.clone(),
                })
                .collect(),
        }
    }

    /// Commented header lines for CSV files.
    pub fn csv_lines(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# tool: {} {}", self.tool, self.version);
        let _ = writeln!(s, "# command: {}", self.command);
        let _ = writeln!(s, "# config_sha256: {}", self.config_sha256);
        for d in &self.data_sha256 {
            let _ = writeln!(s, "# data_sha256: {} {}", d.source, d.sha256);
        }
        s
    }

    /// Core provenance record for spectral grids.
    pub fn provenance(&self) -> Provenance {
        Provenance {
            config_hash: Some(self.config_sha256.clone()),
            data_hashes: self
                .data_sha256
                .iter()
                .map(|d| (d.source.clone(), d.sha256.clone()))
                .collect(),
            dispersion_sources: Vec::new(),
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    provenance: &'a Header,
    result: &'a T,
}

/// Writes files into one directory and remembers what it wrote.
pub struct Writer {
    pub dir: PathBuf,
    pub format: Format,
    pub header: Header,
    pub written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: PathBuf, format: Format, header: Header) -> CliResult<Self> {
        std::fs::create_dir_all(&dir).map_err(|source| CliError::Output {
            path: dir.clone(),
            source,
        })?;
        Ok(Self {
            dir,
            format,
            header,
            written: Vec::new(),
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    /// `{stem}.json` holding the provenance block and `result`.
    pub fn json<T: Serialize>(&mut self, stem: &str, result: &T) -> CliResult<()> {
        let doc = Document {
            provenance: &self.header,
            result,
        };
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::Config(format!("cannot serialize {stem}: {e}")))?;
        text.push('\n');
        self.write_text(&format!("{stem}.json"), &text)
    }

    /// `{stem}.csv` with the provenance header followed by `body`.
    pub fn csv(&mut self, stem: &str, body: &str) -> CliResult<()> {
        let text = format!("{}{}", self.header.csv_lines(), body);
        self.write_text(&format!("{stem}.csv"), &text)
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.written.iter().map(PathBuf::as_path)
    }
}

/// File-name fragment for a sweep value, e.g. `diameter_7.91e-7`.
pub fn sweep_tag(parameter: &str, value: f64) -> String {
    format!("{parameter}_{value:e}")
}

/// Optional float as a CSV field.
pub fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}
