//! Static structure factor `S(q) = |Σ_i s_i e^{−iq·r_i}|² / N²`, averaged over reads.
//!
//! Physical lattices use positions `(x, y)`. Logical lattices use `(x, m/2)`,
//! so odd columns sit half a spacing up; these are embedded in a dense
//! `lx × ly` array at rows `m` and transformed there. The reported grid is
//! `q_x = 2πk/lx`, `q_y = 2πk/(ly/2)` for `k < ly/2`; peak cuts run over the
//! full dense period so peaks outside that rectangle are still found.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::AnalysisError;
use crate::fft::fft2;
use crate::lattice::{Lattice, LogicalLattice};
use crate::quench::SampleSet;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureFactor {
    nx: usize,
    /// Rows in the dense embedding.
    ndense: usize,
    /// Dense rows per unit of `y`.
    stride: usize,
    /// Read-averaged `S` on the dense `nx × ndense` momentum grid.
    dense: Vec<f64>,
    reads: usize,
}

/// A 1D slice through a peak: momenta in radians per lattice spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub q: Vec<f64>,
    pub s: Vec<f64>,
}

struct Embedding {
    nx: usize,
    ndense: usize,
    stride: usize,
    /// Dense cell of each spin in the vector passed to `accumulate`.
    cell: Vec<usize>,
}

impl StructureFactor {
    fn empty(e: &Embedding) -> Self {
        StructureFactor {
            nx: e.nx,
            ndense: e.ndense,
            stride: e.stride,
            dense: vec![0.0; e.nx * e.ndense],
            reads: 0,
        }
    }

    fn accumulate(&mut self, e: &Embedding, spins: &[i8], buf: &mut Vec<Complex64>) {
        buf.clear();
        buf.resize(e.nx * e.ndense, Complex64::new(0.0, 0.0));
        for (&c, &s) in e.cell.iter().zip(spins) {
            buf[c] = Complex64::new(s as f64, 0.0);
        }
        fft2(buf, e.nx, e.ndense);
        let n2 = (spins.len() * spins.len()) as f64;
        for (acc, z) in self.dense.iter_mut().zip(buf.iter()) {
            *acc += z.norm_sqr() / n2;
        }
        self.reads += 1;
    }

    fn finish(mut self) -> Self {
        let k = self.reads.max(1) as f64;
        self.dense.iter_mut().for_each(|v| *v /= k);
        self
    }

    /// Grid extents `(n_qx, n_qy)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ndense / self.stride)
    }

    pub fn reads(&self) -> usize {
        self.reads
    }

    pub fn qx(&self, kx: usize) -> f64 {
        2.0 * PI * kx as f64 / self.nx as f64
    }

    pub fn qy(&self, ky: usize) -> f64 {
        2.0 * PI * (ky * self.stride) as f64 / self.ndense as f64
    }

    /// `S` at grid point `(kx, ky)`, `ky < dims().1`.
    pub fn get(&self, kx: usize, ky: usize) -> f64 {
        assert!(kx < self.nx && ky < self.ndense / self.stride);
        self.dense[kx * self.ndense + ky]
    }

    /// The reported grid as `(q_x, q_y, S)` rows.
    pub fn grid(&self) -> Vec<(f64, f64, f64)> {
        let (nx, ny) = self.dims();
        let mut out = Vec::with_capacity(nx * ny);
        for kx in 0..nx {
            for ky in 0..ny {
                out.push((self.qx(kx), self.qy(ky), self.get(kx, ky)));
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        let (nx, ny) = self.dims();
        (0..nx).flat_map(|kx| (0..ny).map(move |ky| (kx, ky))).map(|(a, b)| self.get(a, b)).sum()
    }

    /// Brightest point over the full dense period, as dense indices.
    pub fn peak(&self) -> (usize, usize) {
        let i = self
            .dense
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        (i / self.ndense, i % self.ndense)
    }

    /// Momentum of the brightest point, `(q_x, q_y)`.
    pub fn peak_q(&self) -> (f64, f64) {
        let (kx, ky) = self.peak();
        (
            2.0 * PI * kx as f64 / self.nx as f64,
            2.0 * PI * (ky * self.stride) as f64 / self.ndense as f64,
        )
    }

    /// Horizontal and vertical cuts through the brightest peak, each one
    /// full period centered on it.
    pub fn peak_cuts(&self) -> (Cut, Cut) {
        let (px, py) = self.peak();
        let (qx0, qy0) = self.peak_q();
        let dq_x = 2.0 * PI / self.nx as f64;
        let dq_y = 2.0 * PI * self.stride as f64 / self.ndense as f64;
        let half_x = self.nx as isize / 2;
        let horizontal = (-half_x..=(self.nx as isize - 1 - half_x))
            .map(|d| {
                let kx = (px as isize + d).rem_euclid(self.nx as isize) as usize;
                (qx0 + d as f64 * dq_x, self.dense[kx * self.ndense + py])
            })
            .unzip();
        let half_y = self.ndense as isize / 2;
        let vertical = (-half_y..=(self.ndense as isize - 1 - half_y))
            .map(|d| {
                let ky = (py as isize + d).rem_euclid(self.ndense as isize) as usize;
                (qy0 + d as f64 * dq_y, self.dense[px * self.ndense + ky])
            })
            .unzip();
        let cut = |(q, s): (Vec<f64>, Vec<f64>)| Cut { q, s };
        (cut(horizontal), cut(vertical))
    }
}

fn physical_embedding(lattice: &Lattice) -> Embedding {
    Embedding {
        nx: lattice.lx(),
        ndense: lattice.ly(),
        stride: 1,
        cell: (0..lattice.num_sites()).collect(),
    }
}

fn logical_embedding(logical: &LogicalLattice) -> Embedding {
    let (lx, ly) = logical.physical_dims();
    Embedding {
        nx: lx,
        ndense: ly,
        stride: 2,
        cell: logical.sites().iter().map(|s| s.x * ly + s.m).collect(),
    }
}

/// Structure factor of the reads on their physical sites.
pub fn structure_factor(samples: &SampleSet) -> Result<StructureFactor, AnalysisError> {
    let lattice = samples.meta().lattice()?;
    structure_factor_of(samples, &lattice, None)
}

/// With `logical` set, the reads are first contracted to logical spins.
pub fn structure_factor_of(
    samples: &SampleSet,
    lattice: &Lattice,
    logical: Option<&LogicalLattice>,
) -> Result<StructureFactor, AnalysisError> {
    if samples.is_empty() {
        return Err(AnalysisError::Empty);
    }
    if samples.num_sites() != lattice.num_sites() {
        return Err(AnalysisError::Mismatch(format!(
            "reads have {} sites, lattice has {}",
            samples.num_sites(),
            lattice.num_sites()
        )));
    }
    let e = match logical {
        Some(g) => logical_embedding(g),
        None => physical_embedding(lattice),
    };
    let mut sf = StructureFactor::empty(&e);
    let mut buf = Vec::new();
    for read in samples.reads() {
        match logical {
            Some(g) => sf.accumulate(&e, &g.spins(read), &mut buf),
            None => sf.accumulate(&e, read, &mut buf),
        }
    }
    Ok(sf.finish())
}
