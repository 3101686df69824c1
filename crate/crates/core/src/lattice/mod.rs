//! Physical qubit lattices with signed couplers.
//!
//! The main geometry is an `lx × ly` square lattice that is open along `x`
//! and periodic along `y` (a cylinder). Vertical couplers alternate between
//! `j1` and `j2` so that every square plaquette holds exactly one `j2` bond.
//! With a strong ferromagnetic `j2` the `j2`-joined pairs behave as single
//! logical spins on a triangular lattice (see [`LogicalLattice`]).
//!
//! Site indexing is column-major with `y` fastest: `site = x * ly + y`.
//! Vertical bonds come first (`x * ly + y`, joining `(x, y)` and
//! `(x, y + 1 mod ly)`), followed by horizontal bonds
//! (`lx * ly + x * ly + y`, joining `(x, y)` and `(x + 1, y)`).

mod logical;
mod orbits;
mod sublattice;

use std::fmt;
use std::io::{BufRead, Write};

use thiserror::Error;

pub use logical::{contract_to_triangular, DualFace, LogicalLattice, LogicalSite};
pub use orbits::{compute_orbits, OrbitPartition};
pub use sublattice::{assign_sublattices, Scheme, SublatticeMap};

/// Coupler values of the triangular-lattice configuration.
pub const TRIANGULAR_J1: f64 = 0.9;
pub const TRIANGULAR_J2: f64 = -2.0;
/// Coupler values of the fully frustrated (Villain) configuration.
pub const VILLAIN_J1: f64 = 0.9;
pub const VILLAIN_J2: f64 = -0.9;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("ly = {0} is odd; the alternating vertical coupler pattern only closes around the cylinder for even ly")]
    OddPeriodicExtent(usize),
    #[error("lx = {lx} is below the minimum of {min}")]
    WidthTooSmall { lx: usize, min: usize },
    #[error("ly = {ly} is below the minimum of {min}")]
    HeightTooSmall { ly: usize, min: usize },
    #[error("a torus needs an even lx so the coupler pattern closes horizontally (got {0})")]
    OddTorusWidth(usize),
    #[error("{scheme} sublattices need {axis} to be a multiple of {multiple} (got {value})")]
    Divisibility {
        scheme: Scheme,
        axis: &'static str,
        multiple: usize,
        value: usize,
    },
    #[error("operation requires a cylinder or torus lattice, got a {0}")]
    NotPlanar(Topology),
    #[error("malformed lattice file at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("io error: {0}")]
    Io(String),
}

/// Which coupler configuration a lattice carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Triangular,
    Villain,
    Custom { j1: f64, j2: f64 },
}

impl ModelKind {
    pub fn from_couplers(j1: f64, j2: f64) -> Self {
        if j1 == TRIANGULAR_J1 && j2 == TRIANGULAR_J2 {
            ModelKind::Triangular
        } else if j1 == VILLAIN_J1 && j2 == VILLAIN_J2 {
            ModelKind::Villain
        } else {
            ModelKind::Custom { j1, j2 }
        }
    }

    pub fn couplers(self) -> (f64, f64) {
        match self {
            ModelKind::Triangular => (TRIANGULAR_J1, TRIANGULAR_J2),
            ModelKind::Villain => (VILLAIN_J1, VILLAIN_J2),
            ModelKind::Custom { j1, j2 } => (j1, j2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Triangular => "triangular",
            ModelKind::Villain => "villain",
            ModelKind::Custom { .. } => "custom",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Open in x, periodic in y.
    Cylinder,
    /// Periodic in both directions.
    Torus,
    /// A single periodic column (`lx = 1`).
    Ring,
    /// A single open column (`lx = 1`).
    Chain,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::Cylinder => "cylinder",
            Topology::Torus => "torus",
            Topology::Ring => "ring",
            Topology::Chain => "chain",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cylinder" => Some(Topology::Cylinder),
            "torus" => Some(Topology::Torus),
            "ring" => Some(Topology::Ring),
            "chain" => Some(Topology::Chain),
            _ => None,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub j: f64,
    pub orientation: Orientation,
    /// Coordinates of the anchor site `a`.
    pub x: usize,
    pub y: usize,
}

/// A square plaquette, given by its four bond indices:
/// left vertical, right vertical, bottom horizontal, top horizontal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Plaquette {
    pub x: usize,
    pub y: usize,
    pub bonds: [usize; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    lx: usize,
    ly: usize,
    j1: f64,
    j2: f64,
    model: ModelKind,
    topology: Topology,
    bonds: Vec<Bond>,
}

/// Builds the cylinder used throughout: open along x, periodic along y.
///
/// The vertical bond between `(x, y)` and `(x, y + 1)` carries `j2` when
/// `x + y` is even and `j1` otherwise; all horizontal bonds carry `j1`.
pub fn build_cylinder(lx: usize, ly: usize, j1: f64, j2: f64) -> Result<Lattice, LatticeError> {
    Lattice::planar(lx, ly, j1, j2, Topology::Cylinder)
}

/// Same coupler pattern as [`build_cylinder`] with periodic boundaries in x too.
pub fn build_torus(lx: usize, ly: usize, j1: f64, j2: f64) -> Result<Lattice, LatticeError> {
    if lx % 2 != 0 {
        return Err(LatticeError::OddTorusWidth(lx));
    }
    Lattice::planar(lx, ly, j1, j2, Topology::Torus)
}

impl Lattice {
    fn planar(
        lx: usize,
        ly: usize,
        j1: f64,
        j2: f64,
        topology: Topology,
    ) -> Result<Lattice, LatticeError> {
        let min_lx = if topology == Topology::Torus { 4 } else { 2 };
        if lx < min_lx {
            return Err(LatticeError::WidthTooSmall { lx, min: min_lx });
        }
        if ly % 2 != 0 {
            return Err(LatticeError::OddPeriodicExtent(ly));
        }
        if ly < 4 {
            return Err(LatticeError::HeightTooSmall { ly, min: 4 });
        }
        let n = lx * ly;
        let hcols = if topology == Topology::Torus { lx } else { lx - 1 };
        let mut bonds = Vec::with_capacity(n + hcols * ly);
        for x in 0..lx {
            for y in 0..ly {
                let j = if (x + y) % 2 == 0 { j2 } else { j1 };
                bonds.push(Bond {
                    a: x * ly + y,
                    b: x * ly + (y + 1) % ly,
                    j,
                    orientation: Orientation::Vertical,
                    x,
                    y,
                });
            }
        }
        for x in 0..hcols {
            for y in 0..ly {
                bonds.push(Bond {
                    a: x * ly + y,
                    b: ((x + 1) % lx) * ly + y,
                    j: j1,
                    orientation: Orientation::Horizontal,
                    x,
                    y,
                });
            }
        }
        Ok(Lattice {
            lx,
            ly,
            j1,
            j2,
            model: ModelKind::from_couplers(j1, j2),
            topology,
            bonds,
        })
    }

    /// A periodic ring of `n` spins with uniform coupler `j`.
    pub fn ring(n: usize, j: f64) -> Result<Lattice, LatticeError> {
        if n < 3 {
            return Err(LatticeError::HeightTooSmall { ly: n, min: 3 });
        }
        Ok(Self::column(n, j, Topology::Ring))
    }

    /// An open chain of `n` spins with uniform coupler `j`.
    pub fn chain(n: usize, j: f64) -> Result<Lattice, LatticeError> {
        if n < 2 {
            return Err(LatticeError::HeightTooSmall { ly: n, min: 2 });
        }
        Ok(Self::column(n, j, Topology::Chain))
    }

    fn column(n: usize, j: f64, topology: Topology) -> Lattice {
        let count = if topology == Topology::Ring { n } else { n - 1 };
        let bonds = (0..count)
            .map(|y| Bond {
                a: y,
                b: (y + 1) % n,
                j,
                orientation: Orientation::Vertical,
                x: 0,
                y,
            })
            .collect();
        Lattice {
            lx: 1,
            ly: n,
            j1: j,
            j2: j,
            model: ModelKind::Custom { j1: j, j2: j },
            topology,
            bonds,
        }
    }

    pub fn lx(&self) -> usize {
        self.lx
    }

    pub fn ly(&self) -> usize {
        self.ly
    }

    pub fn j1(&self) -> f64 {
        self.j1
    }

    pub fn j2(&self) -> f64 {
        self.j2
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn num_sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn site_index(&self, x: usize, y: usize) -> usize {
        x * self.ly + y
    }

    pub fn site_coords(&self, site: usize) -> (usize, usize) {
        (site / self.ly, site % self.ly)
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.topology, Topology::Cylinder | Topology::Torus)
    }

    /// Index of the vertical bond anchored at `(x, y)`.
    pub fn vertical_bond(&self, x: usize, y: usize) -> usize {
        x * self.ly + y
    }

    /// Index of the horizontal bond anchored at `(x, y)`, if it exists.
    pub fn horizontal_bond(&self, x: usize, y: usize) -> Option<usize> {
        let hcols = match self.topology {
            Topology::Cylinder => self.lx - 1,
            Topology::Torus => self.lx,
            _ => 0,
        };
        (x < hcols).then(|| self.lx * self.ly + x * self.ly + y)
    }

    /// Square plaquettes; empty for rings and chains.
    pub fn plaquettes(&self) -> Vec<Plaquette> {
        if !self.is_planar() {
            return Vec::new();
        }
        let pcols = if self.topology == Topology::Torus {
            self.lx
        } else {
            self.lx - 1
        };
        let mut out = Vec::with_capacity(pcols * self.ly);
        for x in 0..pcols {
            for y in 0..self.ly {
                out.push(Plaquette {
                    x,
                    y,
                    bonds: [
                        self.vertical_bond(x, y),
                        self.vertical_bond((x + 1) % self.lx, y),
                        self.horizontal_bond(x, y).expect("plaquette column has horizontals"),
                        self.horizontal_bond(x, (y + 1) % self.ly)
                            .expect("plaquette column has horizontals"),
                    ],
                });
            }
        }
        out
    }

    /// Whether the plaquette has an odd number of antiferromagnetic couplers.
    pub fn is_frustrated(&self, p: &Plaquette) -> bool {
        p.bonds.iter().filter(|&&b| self.bonds[b].j > 0.0).count() % 2 == 1
    }

    /// Replaces the coupler values, keeping geometry. Used to apply shimmed couplers.
    pub fn with_couplers(&self, couplers: &[f64]) -> Lattice {
        assert_eq!(couplers.len(), self.bonds.len(), "one coupler per bond");
        let mut out = self.clone();
        for (bond, &j) in out.bonds.iter_mut().zip(couplers) {
            bond.j = j;
        }
        out
    }

    /// Writes the versioned text format: a header line, a parameter line
    /// `lx ly j1 j2 model_kind topology`, then one `a b J` line per bond.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "frustsim-lattice v1")?;
        writeln!(
            w,
            "{} {} {} {} {} {}",
            self.lx, self.ly, self.j1, self.j2, self.model, self.topology
        )?;
        for b in &self.bonds {
            writeln!(w, "{} {} {}", b.a, b.b, b.j)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Lattice, LatticeError> {
        let parse_err = |line: usize, reason: String| LatticeError::Parse { line, reason };
        let mut lines = r.lines().enumerate();
        let mut next = || -> Result<Option<(usize, String)>, LatticeError> {
            match lines.next() {
                None => Ok(None),
                Some((i, Ok(l))) => Ok(Some((i + 1, l))),
                Some((_, Err(e))) => Err(LatticeError::Io(e.to_string())),
            }
        };
        let (_, version) = next()?.ok_or_else(|| parse_err(1, "empty file".into()))?;
        if version.trim() != "frustsim-lattice v1" {
            return Err(parse_err(1, format!("unknown header {version:?}")));
        }
        let (ln, header) = next()?.ok_or_else(|| parse_err(2, "missing parameter line".into()))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 6 {
            return Err(parse_err(ln, "expected `lx ly j1 j2 model_kind topology`".into()));
        }
        let num = |s: &str| -> Result<f64, LatticeError> {
            s.parse::<f64>()
                .map_err(|e| parse_err(ln, format!("bad number {s:?}: {e}")))
        };
        let int = |s: &str| -> Result<usize, LatticeError> {
            s.parse::<usize>()
                .map_err(|e| parse_err(ln, format!("bad integer {s:?}: {e}")))
        };
        let (lx, ly, j1, j2) = (int(toks[0])?, int(toks[1])?, num(toks[2])?, num(toks[3])?);
        let topology = Topology::parse(toks[5])
            .ok_or_else(|| parse_err(ln, format!("unknown topology {:?}", toks[5])))?;
        let mut lattice = match topology {
            Topology::Cylinder => build_cylinder(lx, ly, j1, j2)?,
            Topology::Torus => build_torus(lx, ly, j1, j2)?,
            Topology::Ring => Lattice::ring(ly, j1)?,
            Topology::Chain => Lattice::chain(ly, j1)?,
        };
        let mut count = 0;
        while let Some((ln, line)) = next()? {
            if line.trim().is_empty() {
                continue;
            }
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return Err(parse_err(ln, "expected `a b J`".into()));
            }
            let bond = lattice
                .bonds
                .get_mut(count)
                .ok_or_else(|| parse_err(ln, "more bonds than the geometry allows".into()))?;
            let a: usize = t[0].parse().map_err(|_| parse_err(ln, "bad site".into()))?;
            let b: usize = t[1].parse().map_err(|_| parse_err(ln, "bad site".into()))?;
            if a != bond.a || b != bond.b {
                return Err(parse_err(
                    ln,
                    format!("bond {count} joins {}-{}, file says {a}-{b}", bond.a, bond.b),
                ));
            }
            bond.j = t[2].parse().map_err(|_| parse_err(ln, "bad coupler".into()))?;
            count += 1;
        }
        if count != lattice.bonds.len() {
            return Err(parse_err(
                0,
                format!("expected {} bonds, found {count}", lattice.bonds.len()),
            ));
        }
        Ok(lattice)
    }
}
