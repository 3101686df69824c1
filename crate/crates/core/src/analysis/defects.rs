//! Plaquette pseudospins and their vortices.
//!
//! Each logical triangle with spins `s_a, s_b, s_c` on sublattices 0, 1, 2
//! carries `ψ = (s_a + ω s_b + ω² s_c) / √3`. For ±1 spins `ψ` is either 0
//! (all three equal) or has modulus `2/√3` and a phase that is a multiple of
//! `π/3`. Windings are summed around the six triangles sharing a logical site.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::AnalysisError;
use crate::lattice::LogicalLattice;

#[derive(Debug, Clone, PartialEq)]
pub struct DefectField {
    /// Pseudospin phase per logical triangle, in `[0, 2π)`.
    pub phases: Vec<f64>,
    /// Triangles whose three spins agree, so `ψ = 0`; their phase is
    /// copied from a bordering non-degenerate triangle.
    pub degenerate: Vec<bool>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DefectOptions {
    /// Skip every loop that passes through a degenerate triangle. Off by
    /// default: the copied phases keep vortex and antivortex counts equal on
    /// periodic lattices, which skipping loops does not.
    pub skip_degenerate_loops: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectCount {
    /// Winding of every dual face; `None` where the loop was skipped.
    pub windings: Vec<Option<i32>>,
    pub n_vortex: usize,
    pub n_antivortex: usize,
    pub loops: usize,
}

impl DefectCount {
    /// `(n_v + n_av) / loops`.
    pub fn density(&self) -> f64 {
        if self.loops == 0 {
            0.0
        } else {
            (self.n_vortex + self.n_antivortex) as f64 / self.loops as f64
        }
    }
}

/// Sublattice of a logical site, `m mod 3`, the same canonical labeling as
/// the Tri sublattice map.
fn label(logical: &LogicalLattice, site: usize) -> usize {
    logical.sites()[site].m % 3
}

pub fn pseudospin_field(read: &[i8], logical: &LogicalLattice) -> Result<DefectField, AnalysisError> {
    let (_, ly) = logical.physical_dims();
    if ly % 3 != 0 {
        return Err(AnalysisError::Mismatch(format!(
            "pseudospins need ly divisible by 3 (got {ly})"
        )));
    }
    let spins = logical.spins(read);
    let faces = logical.faces();
    let mut phases = vec![0.0; faces.len()];
    let mut degenerate = vec![false; faces.len()];
    let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
    for (f, tri) in faces.iter().enumerate() {
        let psi: Complex64 = tri
            .iter()
            .map(|&s| omega(label(logical, s)) * spins[s] as f64)
            .sum::<Complex64>()
            / 3f64.sqrt();
        if psi.norm() < 0.5 {
            degenerate[f] = true;
        } else {
            debug_assert!((psi.norm() - 2.0 / 3f64.sqrt()).abs() < 1e-12);
            let sector = (psi.arg() / (PI / 3.0)).round().rem_euclid(6.0);
            phases[f] = sector * PI / 3.0;
        }
    }
    fill_degenerate(logical, &mut phases, &degenerate);
    Ok(DefectField { phases, degenerate })
}

/// Each connected cluster of degenerate triangles takes one phase, that of
/// the lowest-id non-degenerate triangle bordering it (zero if none), so a
/// loop inside a cluster never winds.
fn fill_degenerate(logical: &LogicalLattice, phases: &mut [f64], degenerate: &[bool]) {
    let mut seen = vec![false; phases.len()];
    let mut cluster = Vec::new();
    for start in 0..phases.len() {
        if !degenerate[start] || seen[start] {
            continue;
        }
        cluster.clear();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut source: Option<usize> = None;
        while let Some(f) = queue.pop_front() {
            cluster.push(f);
            for &g in logical.face_neighbors(f) {
                if !degenerate[g] {
                    source = Some(source.map_or(g, |s| s.min(g)));
                } else if !seen[g] {
                    seen[g] = true;
                    queue.push_back(g);
                }
            }
        }
        let phase = source.map_or(0.0, |s| phases[s]);
        for &f in &cluster {
            phases[f] = phase;
        }
    }
}

/// Phase step from face `a` to face `b` wrapped to `(−π, π)`; an exact
/// half turn is `+π` going to the higher face id and `−π` coming back, so
/// every edge cancels between the two loops that share it.
fn step(phases: &[f64], a: usize, b: usize) -> f64 {
    let d = (phases[b] - phases[a]).rem_euclid(2.0 * PI);
    let d = if d > PI { d - 2.0 * PI } else { d };
    if (d.abs() - PI).abs() < 1e-9 {
        if b > a {
            PI
        } else {
            -PI
        }
    } else {
        d
    }
}

pub fn count_defects(field: &DefectField, logical: &LogicalLattice) -> Result<DefectCount, AnalysisError> {
    count_defects_with(field, logical, DefectOptions::default())
}

pub fn count_defects_with(
    field: &DefectField,
    logical: &LogicalLattice,
    options: DefectOptions,
) -> Result<DefectCount, AnalysisError> {
    if field.phases.len() != logical.faces().len() {
        return Err(AnalysisError::Mismatch(format!(
            "{} phases for {} triangles",
            field.phases.len(),
            logical.faces().len()
        )));
    }
    let mut out = DefectCount {
        windings: Vec::with_capacity(logical.dual_faces().len()),
        n_vortex: 0,
        n_antivortex: 0,
        loops: 0,
    };
    for (i, dual) in logical.dual_faces().iter().enumerate() {
        if options.skip_degenerate_loops && dual.faces.iter().any(|&f| field.degenerate[f]) {
            out.windings.push(None);
            continue;
        }
        let total: f64 = (0..6)
            .map(|k| step(&field.phases, dual.faces[k], dual.faces[(k + 1) % 6]))
            .sum();
        let w = (total / (2.0 * PI)).round() as i32;
        if w.abs() > 1 {
            return Err(AnalysisError::Winding { face: i, winding: w });
        }
        match w {
            1 => out.n_vortex += 1,
            -1 => out.n_antivortex += 1,
            _ => {}
        }
        out.loops += 1;
        out.windings.push(Some(w));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{assign_sublattices, build_cylinder, build_torus, Scheme};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn read_from_logical(logical: &LogicalLattice, spins: &[i8]) -> Vec<i8> {
        let n = 2 * logical.num_sites();
        let mut read = vec![1; n];
        for (s, site) in logical.sites().iter().enumerate() {
            read[site.members[0]] = spins[s];
            read[site.members[1]] = spins[s];
        }
        read
    }

    #[test]
    fn labels_match_tri_sublattices() {
        let l = build_cylinder(6, 12, 0.9, -2.0).unwrap();
        let g = LogicalLattice::from_lattice(&l).unwrap();
        let map = assign_sublattices(&l, Scheme::Tri).unwrap();
        for s in 0..g.num_sites() {
            assert_eq!(label(&g, s), map.labels()[s] as usize);
        }
    }

    #[test]
    fn pseudospin_examples() {
        let l = build_cylinder(3, 6, 0.9, -2.0).unwrap();
        let g = LogicalLattice::from_lattice(&l).unwrap();
        // sublattice 0 up, others down: every triangle reads (+1, −1, −1)
        let spins: Vec<i8> = (0..g.num_sites()).map(|s| if label(&g, s) == 0 { 1 } else { -1 }).collect();
        let field = pseudospin_field(&read_from_logical(&g, &spins), &g).unwrap();
        assert!(field.phases.iter().all(|&p| p == 0.0));
        assert!(field.degenerate.iter().all(|d| !d));
        let flipped: Vec<i8> = spins.iter().map(|s| -s).collect();
        let field = pseudospin_field(&read_from_logical(&g, &flipped), &g).unwrap();
        assert!(field.phases.iter().all(|&p| (p - PI).abs() < 1e-12));
    }

    #[test]
    fn all_equal_triangle_is_degenerate() {
        let l = build_cylinder(3, 6, 0.9, -2.0).unwrap();
        let g = LogicalLattice::from_lattice(&l).unwrap();
        let field = pseudospin_field(&vec![1; 18], &g).unwrap();
        assert!(field.degenerate.iter().all(|&d| d));
        assert!(field.phases.iter().all(|&p| p == 0.0));
        let count = count_defects(&field, &g).unwrap();
        assert_eq!((count.n_vortex, count.n_antivortex), (0, 0));
    }

    #[test]
    fn uniform_phase_has_no_defects() {
        let l = build_torus(6, 12, 0.9, -2.0).unwrap();
        let g = LogicalLattice::from_lattice(&l).unwrap();
        let field = DefectField {
            phases: vec![1.0; g.faces().len()],
            degenerate: vec![false; g.faces().len()],
        };
        let c = count_defects(&field, &g).unwrap();
        assert_eq!((c.n_vortex, c.n_antivortex, c.loops), (0, 0, 36));
    }

    fn planted(g: &LogicalLattice, loop_id: usize, sense: i32) -> DefectField {
        // phases 0, π/3, ..., 5π/3 around the loop, rotated so the two
        // triangles shared with each neighbouring loop sit within π/3 of
        // the zero background
        let dual = g.dual_faces()[loop_id];
        let mut phases = vec![0.0; g.faces().len()];
        for (k, &f) in dual.faces.iter().enumerate() {
            let step = (sense * (k as i32 - 2)).rem_euclid(6);
            phases[f] = step as f64 * PI / 3.0;
        }
        DefectField {
            phases,
            degenerate: vec![false; g.faces().len()],
        }
    }

    #[test]
    fn planted_single_vortex() {
        for ly in [6, 12] {
            let l = build_cylinder(3, ly, 0.9, -2.0).unwrap();
            let g = LogicalLattice::from_lattice(&l).unwrap();
            let c = count_defects(&planted(&g, 1, 1), &g).unwrap();
            assert_eq!((c.n_vortex, c.n_antivortex), (1, 0));
            assert_eq!(c.windings[1], Some(1));
            let c = count_defects(&planted(&g, 1, -1), &g).unwrap();
            assert_eq!((c.n_vortex, c.n_antivortex), (0, 1));
        }
    }

    #[test]
    fn periodic_lattice_conserves_windings() {
        let l = build_torus(6, 12, 0.9, -2.0).unwrap();
        let g = LogicalLattice::from_lattice(&l).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut total = 0;
        // biased reads give large all-equal clusters, whose loops must not wind
        for _ in 0..20000 {
            let p: f64 = rng.gen();
            let read: Vec<i8> = (0..l.num_sites()).map(|_| if rng.gen::<f64>() < p { 1 } else { -1 }).collect();
            let field = pseudospin_field(&read, &g).unwrap();
            let c = count_defects(&field, &g).unwrap();
            assert_eq!(c.n_vortex, c.n_antivortex);
            total += c.n_vortex;
        }
        assert!(total > 0);
    }

    #[test]
    fn skipping_degenerate_loops() {
        let l = build_torus(6, 12, 0.9, -2.0).unwrap();
        let g = LogicalLattice::from_lattice(&l).unwrap();
        let field = pseudospin_field(&vec![1; l.num_sites()], &g).unwrap();
        let c = count_defects_with(&field, &g, DefectOptions { skip_degenerate_loops: true }).unwrap();
        assert_eq!(c.loops, 0);
        assert!(c.windings.iter().all(Option::is_none));
        assert_abs_diff_eq!(c.density(), 0.0);
    }
}
