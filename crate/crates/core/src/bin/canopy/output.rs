use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use canopy::antenna::AntennaError;
use canopy::campaign::PipelineError;
use canopy::channel::ChannelError;
use canopy::fading::FadingError;
use canopy::sim::SimError;
use serde::Serialize;
use serde_json::{json, Value};

/// Process exit status of a failed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    /// Unreadable, malformed or inconsistent input.
    Input = 2,
    /// The model fit is not identifiable from the data.
    DegenerateFit = 3,
    /// Too little variation in the data for the requested statistics.
    DegenerateStats = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { kind: ExitKind::Input, message: message.into() }
    }

    /// Prefixes the message with the file it concerns.
    pub fn in_file(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<AntennaError> for CliError {
    fn from(e: AntennaError) -> Self {
        let kind = match e {
            AntennaError::Empty => ExitKind::DegenerateStats,
            _ => ExitKind::Input,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let kind = match e {
            PipelineError::Unidentifiable { .. } | PipelineError::TooFewSamples { .. } => ExitKind::DegenerateFit,
            _ => ExitKind::Input,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<FadingError> for CliError {
    fn from(e: FadingError) -> Self {
        let kind = match e {
            FadingError::Empty | FadingError::Degenerate | FadingError::NoFit(_) => ExitKind::DegenerateStats,
            FadingError::NonConvergence { .. } | FadingError::OutOfRange { .. } => ExitKind::DegenerateFit,
            _ => ExitKind::Input,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Fading(f) => f.into(),
            other => Self::input(other.to_string()),
        }
    }
}

/// The resolved configuration of a run, embedded in every output file.
pub struct Provenance {
    pub seed: u64,
    pub config: Value,
}

impl Provenance {
    pub fn new(command: &str, seed: u64, config: Value) -> Self {
        let config = json!({
            "tool": format!("canopy {}", env!("CARGO_PKG_VERSION")),
            "command": command,
            "settings": config,
        });
        Self { seed, config }
    }

    /// Leading `#` lines of a CSV output.
    pub fn csv_comments(&self) -> Vec<String> {
        vec![
            format!("seed: {}", self.seed),
            format!("config: {}", serde_json::to_string(&self.config).expect("serializable config")),
        ]
    }

    /// `report` with `config` and `seed` fields added.
    pub fn wrap<T: Serialize>(&self, report: &T) -> Value {
        let mut v = serde_json::to_value(report).expect("serializable report");
        match &mut v {
            Value::Object(map) => {
                map.insert("config".into(), self.config.clone());
                map.insert("seed".into(), self.seed.into());
                v
            }
            _ => json!({ "config": self.config, "seed": self.seed, "data": v }),
        }
    }
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::input(format!("{}: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json(&self, name: &str, value: &Value) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable value");
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        fs::write(&p, bytes).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
        Ok(p)
    }

    /// CSV with provenance comments, a header row and `rows`.
    pub fn write_csv(
        &self,
        name: &str,
        prov: &Provenance,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<PathBuf, CliError> {
        let mut buf = Vec::new();
        for c in prov.csv_comments() {
            writeln!(buf, "# {c}")?;
        }
        writeln!(buf, "{}", header.join(","))?;
        for row in rows {
            writeln!(buf, "{}", row.join(","))?;
        }
        self.write_bytes(name, &buf)
    }
}

pub fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable value"));
}

pub fn print_table(header: &[&str], rows: &[Vec<String>]) {
    println!("{}", header.join(","));
    for r in rows {
        println!("{}", r.join(","));
    }
}

/// Fixed-point rendering for human-facing tables.
pub fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}
