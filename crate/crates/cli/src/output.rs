use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{Command, Global};

/// A failed run, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Certification(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Certification(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            Failure::Config(m) => ("config", m),
            Failure::Certification(m) => ("certification", m),
            Failure::Numerical(m) => ("numerical", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl From<cmv_spectra::Error> for Failure {
    fn from(e: cmv_spectra::Error) -> Self {
        use cmv_spectra::Error::*;
        let msg = e.to_string();
        match e {
            InvalidWord(_)
            | InvalidArgument(_)
            | GridTooCoarse { .. }
            | WindowTooSmall { .. }
            | NTooSmall { .. }
            | DegenerateCoin(_)
            | NonUnitaryCoin(_)
            | NotWalkShaped(_)
            | ArcTooLong(_)
            | OddIndex(_) => Failure::Config(msg),
            GapOpeningFailed { .. } | CoverCertificationFailed(_) | EtaNonPositive(_) | ScheduleInfeasible(_) => {
                Failure::Certification(msg)
            }
            _ => Failure::Numerical(msg),
        }
    }
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum => "spectrum",
        Command::Dos => "dos",
        Command::Lyapunov => "lyapunov",
        Command::Schur => "schur",
        Command::Thin => "thin",
        Command::Tower => "tower",
        Command::Walk(_) => "walk",
        Command::Verify(_) => "verify",
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Serialize)]
struct ArtifactEntry {
    file: String,
    sha256: String,
}

/// Artifacts and input hashes of one invocation.
pub struct Run {
    out: PathBuf,
    command: &'static str,
    options: Value,
    inputs: Sha256,
    artifacts: Vec<ArtifactEntry>,
    /// Exit code once artifacts are written; nonzero for a failed certificate.
    status: u8,
    notes: Vec<String>,
}

impl Run {
    pub fn new(global: &Global, command: &Command) -> Result<Self, Failure> {
        if let Some(t) = global.tol {
            if !(t > 0.0) {
                return Err(Failure::Config(format!("--tol must be positive, got {t}")));
            }
        }
        if global.grid == Some(0) {
            return Err(Failure::Config("--grid must be positive".into()));
        }
        let sub = match command {
            Command::Walk(a) => serde_json::to_value(a).unwrap_or(Value::Null),
            Command::Verify(a) => serde_json::to_value(a).unwrap_or(Value::Null),
            _ => Value::Null,
        };
        let options = json!({ "grid": global.grid, "tol": global.tol, "args": sub });
        let mut inputs = Sha256::new();
        inputs.update(command_name(command).as_bytes());
        inputs.update(options.to_string().as_bytes());
        fs::create_dir_all(&global.out)
            .map_err(|e| Failure::Config(format!("cannot create {}: {e}", global.out.display())))?;
        Ok(Self {
            out: global.out.clone(),
            command: command_name(command),
            options,
            inputs,
            artifacts: Vec::new(),
            status: 0,
            notes: Vec::new(),
        })
    }

    /// Reads an input file and adds its bytes to the inputs hash.
    pub fn read_input(&mut self, path: &Path) -> Result<String, Failure> {
        let text =
            fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.update(sha256_hex(text.as_bytes()).as_bytes());
        Ok(text)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
        self.artifacts.push(ArtifactEntry {
            file: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Records a failure whose artifacts are still written; the worst code wins.
    pub fn flag(&mut self, failure: Failure) {
        self.status = self.status.max(failure.code());
        self.notes.push(failure.to_string());
    }

    /// Writes `manifest.json` and returns the exit code.
    pub fn finish(mut self, wall_time: f64) -> Result<u8, Failure> {
        let manifest = json!({
            "command": self.command,
            "versions": { "cmv-spectra": cmv_spectra::VERSION, "cmv-spectra-cli": env!("CARGO_PKG_VERSION") },
            "inputs_sha256": format!("{:x}", self.inputs.clone().finalize()),
            "options": self.options,
            "artifacts": self.artifacts,
            "exit_code": self.status,
            "notes": self.notes,
            "wall_time_seconds": wall_time,
        });
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Numerical(e.to_string()))? + "\n";
        let path = self.out.join("manifest.json");
        fs::write(&path, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
        for n in &self.notes {
            eprintln!("error: {n}");
        }
        Ok(std::mem::take(&mut self.status))
    }
}

/// 17 significant digits, so CSV values round-trip.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}
