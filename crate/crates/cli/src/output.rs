use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use helfrich::ConstantsTable;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Float at 17 significant digits, enough to round-trip every `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // NaN and infinities have no 17-digit form
        x.to_string()
    }
}

/// Comma-separated table with a header row and LF line endings.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.writer.write_record(cells).expect("in-memory write");
    }

    pub fn into_string(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("cells are UTF-8")
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub artifact_version: String,
    pub constants_fingerprint: String,
    pub outputs: Vec<PathBuf>,
}

/// sha256 of the constants table as JSON.
pub fn constants_fingerprint() -> String {
    let json = serde_json::to_vec(ConstantsTable::shared()).expect("constants serialise");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects the files of one run. Without an output directory the first
/// file goes to stdout and the rest are dropped.
pub struct Sink {
    dir: Option<PathBuf>,
    written: Vec<PathBuf>,
    printed: bool,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| CliError::Io(format!("{}: {e}", d.display())))?;
        }
        Ok(Self { dir, written: Vec::new(), printed: false })
    }

    pub fn emit(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                self.written.push(path);
            }
            None if !self.printed => {
                print!("{body}");
                if !body.ends_with('\n') {
                    println!();
                }
                self.printed = true;
            }
            None => {}
        }
        Ok(())
    }

    pub fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let body = serde_json::to_string_pretty(value).expect("output serialises") + "\n";
        self.emit(name, &body)
    }

    /// Writes the manifest after every other output.
    pub fn finish(self, command: &str, parameters: BTreeMap<String, Value>) -> Result<(), CliError> {
        let Some(dir) = self.dir else { return Ok(()) };
        let manifest = RunManifest {
            command: command.into(),
            parameters,
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            constants_fingerprint: constants_fingerprint(),
            outputs: self.written,
        };
        let path: &Path = &dir.join("manifest.json");
        let body = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
        fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}
