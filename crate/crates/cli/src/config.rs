//! Shared arguments, the resolved run configuration and output helpers.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use frustsim::lattice::{build_cylinder, build_torus, Lattice, ModelKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_OUT: &str = "frustsim-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Triangular,
    Villain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyArg {
    Cylinder,
    Torus,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LatticeArgs {
    /// Columns of the physical lattice.
    #[arg(long, default_value_t = 3)]
    pub lx: usize,
    /// Rows of the physical lattice.
    #[arg(long, default_value_t = 6)]
    pub ly: usize,
    #[arg(long, value_enum, default_value_t = Model::Triangular)]
    pub model: Model,
    /// Override the model's intra-column coupler.
    #[arg(long, allow_hyphen_values = true)]
    pub j1: Option<f64>,
    /// Override the model's pair coupler.
    #[arg(long, allow_hyphen_values = true)]
    pub j2: Option<f64>,
    #[arg(long, value_enum, default_value_t = TopologyArg::Cylinder)]
    pub topology: TopologyArg,
}

impl LatticeArgs {
    pub fn couplers(&self) -> (f64, f64) {
        let (j1, j2) = match self.model {
            Model::Triangular => ModelKind::Triangular.couplers(),
            Model::Villain => ModelKind::Villain.couplers(),
        };
        (self.j1.unwrap_or(j1), self.j2.unwrap_or(j2))
    }

    pub fn build(&self) -> Result<Lattice, CliError> {
        let (j1, j2) = self.couplers();
        Ok(match self.topology {
            TopologyArg::Cylinder => build_cylinder(self.lx, self.ly, j1, j2)?,
            TopologyArg::Torus => build_torus(self.lx, self.ly, j1, j2)?,
        })
    }
}

/// Geometric sweep `start:stop:count`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let ratio = (self.stop / self.start).ln() / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| match k {
                0 => self.start,
                k if k == self.count - 1 => self.stop,
                // twelve significant digits keep file names and tables tidy
                k => format!("{:.11e}", self.start * (ratio * k as f64).exp()).parse().expect("formatted float"),
            })
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("expected start:stop:count, got {s:?}");
        let [a, b, n] = parts[..] else {
            // a bare number is a one-point sweep
            let v: f64 = s.parse().map_err(|_| bad())?;
            return Sweep::checked(v, v, 1);
        };
        let start: f64 = a.parse().map_err(|_| bad())?;
        let stop: f64 = b.parse().map_err(|_| bad())?;
        let count: usize = n.parse().map_err(|_| bad())?;
        Sweep::checked(start, stop, count)
    }
}

impl Sweep {
    fn checked(start: f64, stop: f64, count: usize) -> Result<Self, String> {
        if !(start > 0.0 && stop > 0.0 && start.is_finite() && stop.is_finite()) {
            return Err("sweep ends must be positive".into());
        }
        if count == 0 {
            return Err("sweep needs at least one point".into());
        }
        if count > 1 && start == stop {
            return Err("a multi-point sweep needs distinct ends".into());
        }
        Ok(Sweep { start, stop, count })
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Closed range `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let lo: f64 = a.parse().map_err(|_| format!("bad number {a:?}"))?;
        let hi: f64 = b.parse().map_err(|_| format!("bad number {b:?}"))?;
        if !(lo < hi) {
            return Err(format!("need lo < hi, got {s:?}"));
        }
        Ok(Range { lo, hi })
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// Everything that determines a run's primary outputs. Thread count and
/// output location are deliberately absent.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig<'a> {
    Quench(&'a crate::commands::quench::QuenchArgs),
    Coarsen(&'a crate::commands::coarsen::CoarsenArgs),
    Analyze(&'a crate::commands::analyze::AnalyzeArgs),
    Shim(&'a crate::commands::shim::ShimArgs),
}

#[derive(Serialize)]
struct ConfigFile<'a> {
    version: &'static str,
    hash: String,
    config: &'a RunConfig<'a>,
}

impl RunConfig<'_> {
    /// Hash of the canonical JSON, taken over `"blob <len>\0" + json` in
    /// the manner of git object ids, with SHA-256.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("configs serialize");
        let mut h = Sha256::new();
        h.update(format!("blob {}\0", json.len()));
        h.update(json.as_bytes());
        format!("{:x}", h.finalize())
    }

    /// Writes `config.json` into `dir` and returns the hash.
    pub fn write(&self, dir: &Path) -> Result<String, CliError> {
        let hash = self.hash();
        let file = ConfigFile {
            version: env!("CARGO_PKG_VERSION"),
            hash: hash.clone(),
            config: self,
        };
        let text = serde_json::to_string_pretty(&file).expect("configs serialize");
        write_file(&dir.join("config.json"), text.as_bytes())?;
        Ok(hash)
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Runs `fill` on a CSV writer into `path`.
pub fn write_csv(
    path: &Path,
    fill: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w).map_err(|e| CliError::io(path, e))?;
    let bytes = w.into_inner().map_err(|e| CliError::io(path, e))?;
    write_file(path, &bytes)
}

/// Output directory shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, short, env = "FRUSTSIM_OUT", default_value = DEFAULT_OUT)]
    pub out: PathBuf,
}
