use std::io::{BufRead, Write};

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{spins_of, StateVector};
use crate::lattice::{build_cylinder, build_torus, Lattice, LatticeError, Topology};
use crate::rng;

#[derive(Debug, Error)]
pub enum SampleSetError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad metadata line: {0}")]
    Meta(String),
    #[error("line {line}: {reason}")]
    Read { line: usize, reason: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn default_topology() -> String {
    "cylinder".into()
}

/// First line of a sample file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub lx: usize,
    pub ly: usize,
    pub j1: f64,
    pub j2: f64,
    #[serde(default = "default_topology")]
    pub topology: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_a: Option<f64>,
    pub seed: u64,
    pub reads: usize,
    /// Content hash of the run configuration that produced the reads.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl SampleMeta {
    pub fn for_lattice(lattice: &Lattice, t_a: Option<f64>, seed: u64, reads: usize) -> Self {
        SampleMeta {
            lx: lattice.lx(),
            ly: lattice.ly(),
            j1: lattice.j1(),
            j2: lattice.j2(),
            topology: lattice.topology().name().into(),
            t_a,
            seed,
            reads,
            config_hash: None,
        }
    }

    /// Rebuilds the (unshimmed) lattice geometry the reads live on.
    pub fn lattice(&self) -> Result<Lattice, LatticeError> {
        match Topology::parse(&self.topology) {
            Some(Topology::Torus) => build_torus(self.lx, self.ly, self.j1, self.j2),
            Some(Topology::Ring) => Lattice::ring(self.ly, self.j1),
            Some(Topology::Chain) => Lattice::chain(self.ly, self.j1),
            _ => build_cylinder(self.lx, self.ly, self.j1, self.j2),
        }
    }

    pub fn num_sites(&self) -> usize {
        self.lx * self.ly
    }

    /// Same lattice, regardless of anneal time or seed.
    pub fn same_lattice(&self, other: &SampleMeta) -> bool {
        self.lx == other.lx
            && self.ly == other.ly
            && self.j1 == other.j1
            && self.j2 == other.j2
            && self.topology == other.topology
    }
}

/// Reads stored row-major: read `r`, site `i` at `r * n + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub(crate) meta: SampleMeta,
    n: usize,
    spins: Vec<i8>,
}

impl SampleSet {
    pub fn new(meta: SampleMeta, n: usize) -> Self {
        SampleSet {
            meta,
            n,
            spins: Vec::new(),
        }
    }

    pub fn from_reads(meta: SampleMeta, reads: &[Vec<i8>]) -> Self {
        let n = reads.first().map_or(meta.num_sites(), Vec::len);
        let mut set = SampleSet::new(meta, n);
        for r in reads {
            set.push(r);
        }
        set
    }

    pub fn push(&mut self, read: &[i8]) {
        assert_eq!(read.len(), self.n, "read length");
        debug_assert!(read.iter().all(|&s| s == 1 || s == -1));
        self.spins.extend_from_slice(read);
        self.meta.reads = self.len();
    }

    pub fn meta(&self) -> &SampleMeta {
        &self.meta
    }

    /// Replaces the metadata; the read count is kept.
    pub fn set_meta(&mut self, meta: SampleMeta) {
        self.meta = SampleMeta {
            reads: self.len(),
            ..meta
        };
    }

    pub fn num_sites(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.spins.len() / self.n
        }
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn read(&self, r: usize) -> &[i8] {
        &self.spins[r * self.n..(r + 1) * self.n]
    }

    pub fn reads(&self) -> impl ExactSizeIterator<Item = &[i8]> + '_ {
        self.spins.chunks_exact(self.n.max(1))
    }

    /// Mean of each site over reads.
    pub fn magnetizations(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n];
        for r in self.reads() {
            for (acc, &s) in m.iter_mut().zip(r) {
                *acc += s as f64;
            }
        }
        let k = self.len().max(1) as f64;
        m.iter_mut().for_each(|x| *x /= k);
        m
    }

    /// Read-averaged `s_a s_b`.
    pub fn correlation(&self, a: usize, b: usize) -> f64 {
        let sum: i64 = self.reads().map(|r| (r[a] * r[b]) as i64).sum();
        sum as f64 / self.len().max(1) as f64
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<(), SampleSetError> {
        let meta = serde_json::to_string(&self.meta).map_err(|e| SampleSetError::Meta(e.to_string()))?;
        writeln!(w, "{meta}")?;
        let mut line = String::with_capacity(3 * self.n);
        for r in self.reads() {
            line.clear();
            for (i, &s) in r.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(if s > 0 { "1" } else { "-1" });
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<SampleSet, SampleSetError> {
        let mut lines = r.lines();
        let first = lines
            .next()
            .ok_or_else(|| SampleSetError::Meta("empty file".into()))??;
        let meta: SampleMeta =
            serde_json::from_str(&first).map_err(|e| SampleSetError::Meta(e.to_string()))?;
        let n = meta.num_sites();
        let declared = meta.reads;
        let mut set = SampleSet::new(meta, n);
        let mut buf = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let ln = i + 2;
            buf.clear();
            for tok in line.split_whitespace() {
                match tok {
                    "1" | "+1" => buf.push(1),
                    "-1" => buf.push(-1),
                    other => {
                        return Err(SampleSetError::Read {
                            line: ln,
                            reason: format!("spin {other:?} is not ±1"),
                        })
                    }
                }
            }
            if buf.len() != n {
                return Err(SampleSetError::Read {
                    line: ln,
                    reason: format!("{} spins, expected {n}", buf.len()),
                });
            }
            set.push(&buf);
        }
        if set.len() != declared {
            return Err(SampleSetError::Meta(format!(
                "header declares {declared} reads, file has {}",
                set.len()
            )));
        }
        Ok(set)
    }
}

/// Draws `reads` basis states from `|amplitude|²`. Read `r` uses its own
/// counter stream, so any subset of reads can be regenerated independently.
pub fn sample(state: &StateVector, reads: usize, seed: u64) -> SampleSet {
    let n = state.n_qubits();
    let mut cdf = Vec::with_capacity(state.amplitudes().len());
    let mut acc = 0.0;
    for a in state.amplitudes() {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let meta = SampleMeta {
        lx: 1,
        ly: n,
        j1: 0.0,
        j2: 0.0,
        topology: "chain".into(),
        t_a: None,
        seed,
        reads,
        config_hash: None,
    };
    let mut set = SampleSet::new(meta, n);
    set.spins.reserve(reads * n);
    for r in 0..reads {
        let u: f64 = rng::stream(seed, r as u64).gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        set.spins.extend(spins_of(idx, n));
    }
    set.meta.reads = reads;
    set
}
