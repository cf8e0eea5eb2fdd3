//! Counts files and the run manifests that accompany every written artifact.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use xyjoint::povm::{outcome_at, pair_outcome_at, VisibilityTriple};
use xyjoint::qubit::{Axis, Sign};
use xyjoint::sim::{ExperimentConfig, OutcomeCounts4, PairCounts16, RNG_ID};

use crate::error::{CliError, CliResult};
use crate::format::{Document, Parsed, Section, COUNTS_SCHEMA, MANIFEST_SCHEMA};

pub const TOOL_VERSION: &str = concat!("xyjoint ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eigenstate,
    Pair,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Eigenstate => "eigenstate",
            Mode::Pair => "pair",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eigenstate" => Ok(Mode::Eigenstate),
            "pair" => Ok(Mode::Pair),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Label of single-qubit cell `k`, e.g. `(+,-)`.
pub fn cell_label(k: usize) -> String {
    let (x, y) = outcome_at(k);
    format!("({},{})", sign_char(x), sign_char(y))
}

/// Label of pair cell `k`, e.g. `(+,-;-,+)`.
pub fn pair_cell_label(k: usize) -> String {
    let (x1, y1, x2, y2) = pair_outcome_at(k);
    format!("({},{};{},{})", sign_char(x1), sign_char(y1), sign_char(x2), sign_char(y2))
}

fn sign_char(s: Sign) -> char {
    match s {
        Sign::Plus => '+',
        Sign::Minus => '-',
    }
}

/// Everything that determines the contents of a counts file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Input eigenstate; eigenstate mode only.
    pub input: Option<(Axis, Sign)>,
    pub experiment: ExperimentConfig,
}

impl RunConfig {
    pub fn write(&self, doc: &mut Document) {
        let e = &self.experiment;
        doc.section("config");
        doc.str("mode", &self.mode.to_string());
        if let Some((axis, value)) = self.input {
            doc.str("axis", &axis.to_string());
            doc.str("value", &value.to_string());
        }
        doc.float("vx", e.visibilities.vx());
        doc.float("vy", e.visibilities.vy());
        doc.float("vz", e.visibilities.vz());
        doc.int("shots", e.shots);
        doc.int("seed", e.seed);
        doc.bool("randomize_flips", e.randomize_flips);
        doc.float("werner_p", e.werner_p);
        doc.str("rng", RNG_ID);
    }

    pub fn read(section: &Section<'_>, origin: &str) -> CliResult<Self> {
        let mode: Mode = section.str("mode")?.parse().map_err(|e: String| CliError::format(origin, e))?;
        let input = if section.has("axis") {
            let axis: Axis = section
                .str("axis")?
                .parse()
                .map_err(|_| CliError::format(origin, "config.axis: expected X, Y or Z"))?;
            Some((axis, parse_sign(section.str("value")?, origin)?))
        } else {
            None
        };
        if (mode == Mode::Eigenstate) != input.is_some() {
            return Err(CliError::format(origin, "config.axis must be present exactly in eigenstate mode"));
        }
        let rng = section.str("rng")?;
        if rng != RNG_ID {
            return Err(CliError::format(origin, format!("unsupported rng {rng:?}")));
        }
        let v = VisibilityTriple::new(section.f64("vx")?, section.f64("vy")?, section.f64("vz")?)?;
        let experiment = ExperimentConfig::new(v, section.u64("shots")?, section.u64("seed")?)
            .with_flips(section.bool("randomize_flips")?)
            .with_werner(section.f64("werner_p")?);
        Ok(RunConfig { mode, input, experiment })
    }
}

pub fn parse_sign(s: &str, origin: &str) -> CliResult<Sign> {
    match s {
        "+1" | "+" | "1" => Ok(Sign::Plus),
        "-1" | "-" => Ok(Sign::Minus),
        other => Err(CliError::format(origin, format!("expected +1 or -1, found {other:?}"))),
    }
}

/// A simulated run: configuration, the manifest it was written with, and
/// one count per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CountsFile {
    pub config: RunConfig,
    pub manifest: String,
    pub counts: Vec<u64>,
}

impl CountsFile {
    pub fn to_text(&self) -> String {
        let mut doc = Document::new(COUNTS_SCHEMA);
        doc.str("manifest", &self.manifest);
        self.config.write(&mut doc);
        doc.section("counts");
        let labels: Vec<String> = match self.config.mode {
            Mode::Eigenstate => (0..4).map(cell_label).collect(),
            Mode::Pair => (0..16).map(pair_cell_label).collect(),
        };
        doc.strs("cells", &labels);
        doc.ints("values", &self.counts);
        doc.int("total", self.counts.iter().sum());
        doc.finish()
    }

    pub fn from_text(text: &str, origin: &str) -> CliResult<Self> {
        let parsed = Parsed::parse(text, COUNTS_SCHEMA, origin)?;
        let manifest = parsed.root().str("manifest")?.to_owned();
        let config = RunConfig::read(&parsed.section("config")?, origin)?;
        let section = parsed.section("counts")?;
        let counts = section.u64s("values")?;
        let expected: Vec<String> = match config.mode {
            Mode::Eigenstate => (0..4).map(cell_label).collect(),
            Mode::Pair => (0..16).map(pair_cell_label).collect(),
        };
        if section.strs("cells")? != expected || counts.len() != expected.len() {
            return Err(CliError::format(origin, "cell labels do not match the run mode"));
        }
        let total: u64 = counts.iter().sum();
        if section.u64("total")? != total {
            return Err(CliError::format(origin, "counts.total disagrees with the cell counts"));
        }
        Ok(CountsFile { config, manifest, counts })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::from_text(&read_text(path)?, &path.display().to_string())
    }

    pub fn eigenstate_counts(&self) -> Option<OutcomeCounts4> {
        let (axis, value) = self.config.input?;
        let counts: [u64; 4] = self.counts.clone().try_into().ok()?;
        Some(OutcomeCounts4::new(counts, axis, value))
    }

    pub fn pair_counts(&self) -> Option<PairCounts16> {
        if self.config.mode != Mode::Pair {
            return None;
        }
        let counts: [u64; 16] = self.counts.clone().try_into().ok()?;
        Some(PairCounts16::new(counts))
    }
}

/// Provenance record written next to every artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub timestamp: u64,
    pub tool_version: String,
    pub threads: Option<usize>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub config: Option<RunConfig>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_owned(),
            timestamp: now_utc_seconds(),
            tool_version: TOOL_VERSION.to_owned(),
            threads: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut doc = Document::new(MANIFEST_SCHEMA);
        doc.str("command", &self.command);
        doc.int("timestamp", self.timestamp);
        doc.str("tool_version", &self.tool_version);
        if let Some(t) = self.threads {
            doc.int("threads", t as u64);
        }
        doc.strs("inputs", &self.inputs);
        doc.strs("outputs", &self.outputs);
        if let Some(c) = &self.config {
            c.write(&mut doc);
        }
        doc.finish()
    }

    pub fn from_text(text: &str, origin: &str) -> CliResult<Self> {
        let parsed = Parsed::parse(text, MANIFEST_SCHEMA, origin)?;
        let root = parsed.root();
        let config = if parsed.has("config") {
            Some(RunConfig::read(&parsed.section("config")?, origin)?)
        } else {
            None
        };
        Ok(RunManifest {
            command: root.str("command")?.to_owned(),
            timestamp: root.u64("timestamp")?,
            tool_version: root.str("tool_version")?.to_owned(),
            threads: if root.has("threads") { Some(root.u64("threads")? as usize) } else { None },
            inputs: root.strs("inputs")?,
            outputs: root.strs("outputs")?,
            config,
        })
    }
}

/// `SOURCE_DATE_EPOCH` when set, otherwise the system clock.
fn now_utc_seconds() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Path of the manifest that accompanies `artifact`.
pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest");
    artifact.with_file_name(name)
}

/// File name of the manifest, as stored inside the artifact.
pub fn manifest_ref(artifact: &Path) -> String {
    manifest_path(artifact)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}
