//! Symmetry orbits of couplers.
//!
//! Two bonds share an orbit when a lattice translation that preserves every
//! coupler value maps one onto the other. Candidate translations are unit
//! and double shifts along the periodic directions; a shift is kept only if
//! it maps the coupler pattern onto itself.

use std::collections::HashMap;

use super::{Lattice, Orientation, Topology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    orbit_of: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl OrbitPartition {
    pub fn orbit_of(&self, bond: usize) -> usize {
        self.orbit_of[bond]
    }

    pub fn num_orbits(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, orbit: usize) -> &[usize] {
        &self.members[orbit]
    }

    pub fn orbits(&self) -> impl Iterator<Item = &[usize]> {
        self.members.iter().map(Vec::as_slice)
    }

    pub fn num_bonds(&self) -> usize {
        self.orbit_of.len()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn translate(lattice: &Lattice, bond: usize, dx: usize, dy: usize) -> Option<usize> {
    let b = lattice.bonds()[bond];
    let (lx, ly) = (lattice.lx(), lattice.ly());
    let x = (b.x + dx) % lx;
    let y = (b.y + dy) % ly;
    match b.orientation {
        Orientation::Vertical => Some(lattice.vertical_bond(x, y)),
        Orientation::Horizontal => lattice.horizontal_bond(x, y),
    }
}

pub fn compute_orbits(lattice: &Lattice) -> OrbitPartition {
    let n = lattice.bonds().len();
    let mut shifts: Vec<(usize, usize)> = Vec::new();
    match lattice.topology() {
        Topology::Chain => {}
        Topology::Ring | Topology::Cylinder => shifts.extend([(0, 1), (0, 2)]),
        Topology::Torus => shifts.extend([(0, 1), (0, 2), (1, 0), (2, 0), (1, 1)]),
    }
    let mut uf = UnionFind((0..n).collect());
    for (dx, dy) in shifts {
        let image: Option<Vec<usize>> = (0..n).map(|b| translate(lattice, b, dx, dy)).collect();
        let Some(image) = image else { continue };
        let preserves = image
            .iter()
            .enumerate()
            .all(|(b, &t)| lattice.bonds()[b].j == lattice.bonds()[t].j);
        if preserves {
            for (b, &t) in image.iter().enumerate() {
                uf.union(b, t);
            }
        }
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut orbit_of = Vec::with_capacity(n);
    let mut members: Vec<Vec<usize>> = Vec::new();
    for b in 0..n {
        let root = uf.find(b);
        let id = *ids.entry(root).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        orbit_of.push(id);
        members[id].push(b);
    }
    OrbitPartition { orbit_of, members }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cylinder, build_torus};

    #[test]
    fn ferromagnetic_ring_is_one_orbit() {
        let ring = Lattice::ring(16, -1.0).unwrap();
        let orbits = compute_orbits(&ring);
        assert_eq!(orbits.num_orbits(), 1);
        assert_eq!(orbits.members(0).len(), 16);
    }

    #[test]
    fn small_cylinder_orbits_by_column_parity() {
        let l = build_cylinder(2, 4, 0.9, -2.0).unwrap();
        let orbits = compute_orbits(&l);
        // per column: one j2 orbit and one j1 orbit; horizontals split by row parity
        assert_eq!(orbits.num_orbits(), 2 * 2 + 2);
        for o in orbits.orbits() {
            let first = l.bonds()[o[0]];
            assert_eq!(o.len(), 2);
            for &b in o {
                let bond = l.bonds()[b];
                assert_eq!(bond.j, first.j);
                assert_eq!(bond.x, first.x);
                assert_eq!(bond.y % 2, first.y % 2);
                assert_eq!(bond.orientation, first.orientation);
            }
        }
    }

    #[test]
    fn orbits_cover_all_bonds() {
        for l in [
            build_cylinder(12, 12, 0.9, -2.0).unwrap(),
            build_torus(8, 12, 0.9, -0.9).unwrap(),
            Lattice::chain(5, -1.0).unwrap(),
        ] {
            let orbits = compute_orbits(&l);
            let total: usize = orbits.orbits().map(<[usize]>::len).sum();
            assert_eq!(total, l.bonds().len());
        }
        assert_eq!(compute_orbits(&Lattice::chain(5, -1.0).unwrap()).num_orbits(), 4);
    }

    #[test]
    fn shifting_two_rows_stays_in_orbit() {
        let l = build_cylinder(6, 12, 0.9, -2.0).unwrap();
        let orbits = compute_orbits(&l);
        for b in 0..l.bonds().len() {
            let t = translate(&l, b, 0, 2).unwrap();
            assert_eq!(orbits.orbit_of(b), orbits.orbit_of(t));
        }
        // a single-row shift changes the coupler and therefore the orbit
        let v = l.vertical_bond(0, 0);
        assert_ne!(orbits.orbit_of(v), orbits.orbit_of(l.vertical_bond(0, 1)));
    }

    #[test]
    fn uniform_square_lattice_merges_rows() {
        let l = build_cylinder(3, 4, 1.0, 1.0).unwrap();
        let orbits = compute_orbits(&l);
        assert_eq!(orbits.num_orbits(), 3 + 2);
    }
}
