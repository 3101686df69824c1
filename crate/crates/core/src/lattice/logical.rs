//! Contraction of the cylinder into a triangular lattice of logical spins.
//!
//! Each `j2` bond joins two physical spins into one logical site. A logical
//! site is addressed by its column `x` and the row `m` of its lower member,
//! with `m ≡ x (mod 2)`; its members are `(x, m)` and `(x, m + 1 mod ly)`.
//!
//! Between columns `s` and `s + 1` the logical sites interleave: every row
//! `p` belongs to column `s` when `p ≡ s (mod 2)` and to column `s + 1`
//! otherwise. Triangle `(s, m)` is formed by the sites at rows `m`, `m + 1`
//! and `m + 2` of that strip, so every strip holds `ly` triangles.

use super::{Lattice, LatticeError, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalSite {
    pub x: usize,
    /// Row of the lower physical member.
    pub m: usize,
    pub members: [usize; 2],
}

/// The six triangles around an interior logical site, counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualFace {
    pub center: usize,
    pub faces: [usize; 6],
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalLattice {
    lx: usize,
    ly: usize,
    periodic_x: bool,
    sites: Vec<LogicalSite>,
    neighbors: Vec<Vec<usize>>,
    faces: Vec<[usize; 3]>,
    face_neighbors: Vec<Vec<usize>>,
    dual_faces: Vec<DualFace>,
}

/// Identifies every `j2`-joined pair as one logical spin.
pub fn contract_to_triangular(lattice: &Lattice) -> Result<LogicalLattice, LatticeError> {
    LogicalLattice::from_lattice(lattice)
}

impl LogicalLattice {
    pub fn from_lattice(lattice: &Lattice) -> Result<Self, LatticeError> {
        let periodic_x = match lattice.topology() {
            Topology::Cylinder => false,
            Topology::Torus => true,
            other => return Err(LatticeError::NotPlanar(other)),
        };
        let (lx, ly) = (lattice.lx(), lattice.ly());
        let half = ly / 2;

        let mut sites = Vec::with_capacity(lx * half);
        for x in 0..lx {
            for k in 0..half {
                let m = (2 * k + x % 2) % ly;
                sites.push(LogicalSite {
                    x,
                    m,
                    members: [lattice.site_index(x, m), lattice.site_index(x, (m + 1) % ly)],
                });
            }
        }

        let mut out = LogicalLattice {
            lx,
            ly,
            periodic_x,
            sites,
            neighbors: Vec::new(),
            faces: Vec::new(),
            face_neighbors: Vec::new(),
            dual_faces: Vec::new(),
        };

        let strips = out.num_strips();
        for s in 0..strips {
            for m in 0..ly {
                let tri = [m, m + 1, m + 2].map(|p| {
                    let p = p % ly;
                    let col = if p % 2 == s % 2 { s } else { (s + 1) % lx };
                    out.id(col, p)
                });
                out.faces.push(tri);
            }
        }

        out.neighbors = (0..out.sites.len())
            .map(|id| {
                let LogicalSite { x, m, .. } = out.sites[id];
                let mut nb = vec![out.id(x, (m + 2) % ly), out.id(x, (m + ly - 2) % ly)];
                for col in [out.column(x as isize - 1), out.column(x as isize + 1)]
                    .into_iter()
                    .flatten()
                {
                    nb.push(out.id(col, (m + 1) % ly));
                    nb.push(out.id(col, (m + ly - 1) % ly));
                }
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();

        out.face_neighbors = (0..strips)
            .flat_map(|s| (0..ly).map(move |m| (s, m)))
            .map(|(s, m)| {
                let mut nb = vec![
                    out.face_id(s, (m + ly - 1) % ly).unwrap(),
                    out.face_id(s, (m + 1) % ly).unwrap(),
                ];
                // the same-column edge (rows m, m + 2) borders the next strip over
                let across = if m % 2 == s % 2 {
                    out.strip(s as isize - 1)
                } else {
                    out.strip(s as isize + 1)
                };
                if let Some(t) = across {
                    nb.push(out.face_id(t, m).unwrap());
                }
                nb
            })
            .collect();

        for id in 0..out.sites.len() {
            let LogicalSite { x, m, .. } = out.sites[id];
            let (Some(left), Some(right)) = (out.strip(x as isize - 1), out.strip(x as isize))
            else {
                continue;
            };
            let f = |s: usize, dm: usize| out.face_id(s, (m + ly - dm) % ly).unwrap();
            out.dual_faces.push(DualFace {
                center: id,
                faces: [
                    f(right, 0),
                    f(left, 0),
                    f(left, 1),
                    f(left, 2),
                    f(right, 2),
                    f(right, 1),
                ],
            });
        }
        Ok(out)
    }

    fn num_strips(&self) -> usize {
        if self.periodic_x {
            self.lx
        } else {
            self.lx - 1
        }
    }

    fn column(&self, x: isize) -> Option<usize> {
        let lx = self.lx as isize;
        if self.periodic_x {
            Some(x.rem_euclid(lx) as usize)
        } else {
            (0..lx).contains(&x).then_some(x as usize)
        }
    }

    fn strip(&self, s: isize) -> Option<usize> {
        let n = self.num_strips() as isize;
        if self.periodic_x {
            Some(s.rem_euclid(n) as usize)
        } else {
            (0..n).contains(&s).then_some(s as usize)
        }
    }

    /// Logical id of the site in column `x` whose lower member sits on row `m`.
    pub fn id(&self, x: usize, m: usize) -> usize {
        debug_assert_eq!(m % 2, x % 2);
        let half = self.ly / 2;
        x * half + ((m + self.ly - x % 2) % self.ly) / 2
    }

    pub fn face_id(&self, strip: usize, m: usize) -> Option<usize> {
        (strip < self.num_strips() && m < self.ly).then(|| strip * self.ly + m)
    }

    /// Physical extents of the parent lattice.
    pub fn physical_dims(&self) -> (usize, usize) {
        (self.lx, self.ly)
    }

    /// Logical extents: `lx` columns of `ly / 2` sites.
    pub fn dims(&self) -> (usize, usize) {
        (self.lx, self.ly / 2)
    }

    pub fn is_periodic_x(&self) -> bool {
        self.periodic_x
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[LogicalSite] {
        &self.sites
    }

    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.neighbors[id]
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Faces sharing an edge with `face`.
    pub fn face_neighbors(&self, face: usize) -> &[usize] {
        &self.face_neighbors[face]
    }

    pub fn dual_faces(&self) -> &[DualFace] {
        &self.dual_faces
    }

    /// Logical spin values of a physical read: the lower member of each pair.
    pub fn spins(&self, read: &[i8]) -> Vec<i8> {
        self.sites.iter().map(|s| read[s.members[0]]).collect()
    }

    /// Position used for momentum space: `(x, m / 2)`, so the periodic
    /// direction has length `ly / 2`.
    pub fn position(&self, id: usize) -> (f64, f64) {
        let s = self.sites[id];
        (s.x as f64, s.m as f64 / 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cylinder, build_torus, Orientation};
    use std::collections::HashSet;

    #[test]
    fn two_by_four_has_four_logical_sites() {
        let l = build_cylinder(2, 4, 0.9, -2.0).unwrap();
        let g = contract_to_triangular(&l).unwrap();
        assert_eq!(g.num_sites(), 4);
        assert_eq!(g.dims(), (2, 2));
    }

    #[test]
    fn logical_count_is_half_physical() {
        for (lx, ly) in [(2, 4), (3, 6), (4, 8), (6, 12), (5, 10)] {
            let l = build_cylinder(lx, ly, 0.9, -2.0).unwrap();
            assert_eq!(contract_to_triangular(&l).unwrap().num_sites(), lx * ly / 2);
        }
    }

    #[test]
    fn members_partition_sites_and_are_joined_by_j2() {
        let l = build_cylinder(4, 8, 0.9, -2.0).unwrap();
        let g = contract_to_triangular(&l).unwrap();
        let mut seen = HashSet::new();
        for s in g.sites() {
            for m in s.members {
                assert!(seen.insert(m));
            }
        }
        assert_eq!(seen.len(), l.num_sites());
        let pairs: HashSet<(usize, usize)> = g
            .sites()
            .iter()
            .map(|s| (s.members[0], s.members[1]))
            .collect();
        for b in l.bonds() {
            let joined = pairs.contains(&(b.a, b.b));
            if b.j == -2.0 {
                assert!(joined, "j2 bond {}-{} crosses logical sites", b.a, b.b);
            } else {
                assert!(!joined);
            }
        }
    }

    // adjacency from the physical j1 bonds, independent of the closed-form neighbour rule
    fn adjacency_from_bonds(l: &Lattice, g: &LogicalLattice) -> Vec<HashSet<usize>> {
        let mut owner = vec![0; l.num_sites()];
        for (id, s) in g.sites().iter().enumerate() {
            owner[s.members[0]] = id;
            owner[s.members[1]] = id;
        }
        let mut adj = vec![HashSet::new(); g.num_sites()];
        for b in l.bonds() {
            let (p, q) = (owner[b.a], owner[b.b]);
            if p != q {
                adj[p].insert(q);
                adj[q].insert(p);
            }
        }
        adj
    }

    #[test]
    fn three_by_six_adjacency_matches_enumeration() {
        let l = build_cylinder(3, 6, 0.9, -2.0).unwrap();
        let g = contract_to_triangular(&l).unwrap();
        let adj = adjacency_from_bonds(&l, &g);
        for id in 0..g.num_sites() {
            let mine: HashSet<usize> = g.neighbors(id).iter().copied().collect();
            assert_eq!(mine, adj[id], "site {id}");
            let expect = if g.sites()[id].x == 1 { 6 } else { 4 };
            assert_eq!(mine.len(), expect);
        }
    }

    #[test]
    fn bulk_coordination_is_six() {
        let l = build_cylinder(6, 12, 0.9, -2.0).unwrap();
        let g = contract_to_triangular(&l).unwrap();
        let adj = adjacency_from_bonds(&l, &g);
        for (id, s) in g.sites().iter().enumerate() {
            if s.x > 0 && s.x < 5 {
                assert_eq!(adj[id].len(), 6);
            }
        }
        let t = build_torus(6, 12, 0.9, -2.0).unwrap();
        let gt = contract_to_triangular(&t).unwrap();
        let adj = adjacency_from_bonds(&t, &gt);
        assert!(adj.iter().all(|a| a.len() == 6));
    }

    #[test]
    fn faces_are_mutually_adjacent_triples() {
        for l in [
            build_cylinder(4, 8, 0.9, -2.0).unwrap(),
            build_torus(6, 12, 0.9, -2.0).unwrap(),
        ] {
            let g = contract_to_triangular(&l).unwrap();
            let adj = adjacency_from_bonds(&l, &g);
            let strips = if l.topology() == Topology::Torus { l.lx() } else { l.lx() - 1 };
            assert_eq!(g.faces().len(), strips * l.ly());
            for f in g.faces() {
                assert!(adj[f[0]].contains(&f[1]));
                assert!(adj[f[1]].contains(&f[2]));
                assert!(adj[f[0]].contains(&f[2]));
            }
        }
    }

    #[test]
    fn face_neighbors_share_two_sites() {
        let l = build_torus(6, 12, 0.9, -2.0).unwrap();
        let g = contract_to_triangular(&l).unwrap();
        for (f, tri) in g.faces().iter().enumerate() {
            assert_eq!(g.face_neighbors(f).len(), 3);
            for &n in g.face_neighbors(f) {
                let shared = tri.iter().filter(|s| g.faces()[n].contains(s)).count();
                assert_eq!(shared, 2);
            }
        }
    }

    #[test]
    fn dual_faces_ring_their_center() {
        let l = build_torus(6, 12, 0.9, -2.0).unwrap();
        let g = contract_to_triangular(&l).unwrap();
        assert_eq!(g.dual_faces().len(), g.num_sites());
        for d in g.dual_faces() {
            for (k, &f) in d.faces.iter().enumerate() {
                assert!(g.faces()[f].contains(&d.center));
                // consecutive triangles share an edge
                let next = g.faces()[d.faces[(k + 1) % 6]];
                let shared = g.faces()[f].iter().filter(|s| next.contains(s)).count();
                assert_eq!(shared, 2);
            }
        }
        let c = build_cylinder(3, 6, 0.9, -2.0).unwrap();
        let gc = contract_to_triangular(&c).unwrap();
        assert_eq!(gc.dual_faces().len(), 3);
        assert!(gc.dual_faces().iter().all(|d| gc.sites()[d.center].x == 1));
    }

    #[test]
    fn rings_have_no_logical_view() {
        let r = Lattice::ring(8, -1.0).unwrap();
        assert!(contract_to_triangular(&r).is_err());
        let l = build_cylinder(2, 4, 0.9, -2.0).unwrap();
        assert!(l.bonds().iter().any(|b| b.orientation == Orientation::Horizontal));
    }
}
