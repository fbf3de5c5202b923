use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Provenance record written next to every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub version: &'static str,
    /// Arguments that reproduce this run, without the program name.
    pub argv: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_time_ms: f64,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

/// Where a run's artifacts go: a directory, or stdout (reports) and stderr
/// (manifest) when none is given.
pub struct Sink {
    dir: Option<PathBuf>,
    written: Vec<String>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
        }
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    pub fn emit(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(name);
                fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
                self.written.push(path.display().to_string());
            }
            None => {
                print!("{contents}");
                self.written.push(format!("<stdout>:{name}"));
            }
        }
        Ok(())
    }

    pub fn has_output(&self) -> bool {
        !self.written.is_empty()
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<(), CliError> {
        manifest.outputs = self.written;
        let text = to_json(&manifest);
        match &self.dir {
            Some(dir) => {
                let path = dir.join("manifest.json");
                fs::write(&path, text).map_err(|e| CliError::io(&path, e))
            }
            None => {
                eprint!("{text}");
                Ok(())
            }
        }
    }
}

pub fn io_message(path: &Path, err: std::io::Error) -> String {
    format!("{}: {err}", path.display())
}
