//! Sublattice labelings behind the three order parameters.

use std::fmt;

use super::{Lattice, LatticeError, LogicalLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Two-sublattice checkerboard on physical sites.
    Afm,
    /// Three sublattices on logical (triangular) sites.
    Tri,
    /// Four translate classes on physical sites.
    Vil,
}

impl Scheme {
    pub fn num_labels(self) -> usize {
        match self {
            Scheme::Afm => 2,
            Scheme::Tri => 3,
            Scheme::Vil => 4,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Afm => "AFM",
            Scheme::Tri => "Tri",
            Scheme::Vil => "Vil",
        })
    }
}

/// Per-site sublattice labels. For [`Scheme::Tri`] the labels index logical
/// sites, otherwise physical sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublatticeMap {
    scheme: Scheme,
    labels: Vec<u8>,
}

impl SublatticeMap {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.scheme.num_labels()];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// Mean spin of every class.
    pub fn magnetizations(&self, spins: &[i8]) -> Vec<f64> {
        assert_eq!(spins.len(), self.labels.len());
        let k = self.scheme.num_labels();
        let mut sum = vec![0i64; k];
        let mut count = vec![0usize; k];
        for (&s, &l) in spins.iter().zip(&self.labels) {
            sum[l as usize] += s as i64;
            count[l as usize] += 1;
        }
        sum.iter()
            .zip(&count)
            .map(|(&s, &c)| if c == 0 { 0.0 } else { s as f64 / c as f64 })
            .collect()
    }
}

fn require(
    scheme: Scheme,
    axis: &'static str,
    value: usize,
    multiple: usize,
) -> Result<(), LatticeError> {
    if value % multiple == 0 {
        Ok(())
    } else {
        Err(LatticeError::Divisibility {
            scheme,
            axis,
            multiple,
            value,
        })
    }
}

/// Canonical labelings anchored at site (0, 0):
///
/// * AFM: `(x + y) mod 2`.
/// * Tri: `m mod 3` for the logical site with lower row `m`; every logical
///   triangle spans rows `m, m + 1, m + 2` and so sees all three labels.
///   Needs `lx` and `ly / 2` to be multiples of 3.
/// * Vil: `(x + y) mod 4`; class `c + 1` is class `c` shifted by one column.
///   Needs `lx` and `ly` to be multiples of 4.
pub fn assign_sublattices(lattice: &Lattice, scheme: Scheme) -> Result<SublatticeMap, LatticeError> {
    if !lattice.is_planar() {
        return Err(LatticeError::NotPlanar(lattice.topology()));
    }
    let (lx, ly) = (lattice.lx(), lattice.ly());
    let labels = match scheme {
        Scheme::Afm => (0..lattice.num_sites())
            .map(|i| {
                let (x, y) = lattice.site_coords(i);
                ((x + y) % 2) as u8
            })
            .collect(),
        Scheme::Tri => {
            require(scheme, "lx", lx, 3)?;
            require(scheme, "ly/2", ly / 2, 3)?;
            let logical = LogicalLattice::from_lattice(lattice)?;
            logical.sites().iter().map(|s| (s.m % 3) as u8).collect()
        }
        Scheme::Vil => {
            require(scheme, "lx", lx, 4)?;
            require(scheme, "ly", ly, 4)?;
            (0..lattice.num_sites())
                .map(|i| {
                    let (x, y) = lattice.site_coords(i);
                    ((x + y) % 4) as u8
                })
                .collect()
        }
    };
    Ok(SublatticeMap { scheme, labels })
}
