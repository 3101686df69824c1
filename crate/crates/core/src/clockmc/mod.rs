//! Absorbing Monte Carlo coarsening of the six-state clock model on a
//! periodic honeycomb lattice.

mod coarsen;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::fft::Fft2;
use crate::rng::{self, Rng};

pub use coarsen::{run_coarsening, write_summary_csv, CoarseningParams, CoarseningRun, StepSummary};

pub const STATES: u8 = 6;

/// `2 cos(2π d / 6)` for `d = 0..6`, so energies stay integral.
const COS2: [i32; 6] = [2, 1, -1, -2, -1, 1];

#[inline]
fn bond2(a: u8, b: u8) -> i32 {
    COS2[((a + STATES - b) % STATES) as usize]
}

#[derive(Debug, Error, PartialEq)]
pub enum ClockError {
    #[error("honeycomb size l = {0} must be even and at least 4")]
    Size(usize),
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("angle index {0} is off the six-state grid")]
    State(u8),
    #[error("configuration has {got} sites, lattice has {expected}")]
    Mismatch { expected: usize, got: usize },
    #[error("{0}")]
    Param(String),
}

/// Brick-wall honeycomb on an `l × l` periodic square grid. Every
/// horizontal edge is kept; the vertical edge above `(x, y)` only when
/// `x + y` is even. Site `(x, y)` has index `x * l + y`.
#[derive(Debug, Clone)]
pub struct HoneycombLattice {
    l: usize,
    edges: Vec<(u32, u32)>,
    neighbors: Vec<[u32; 3]>,
}

impl HoneycombLattice {
    pub fn new(l: usize) -> Result<Self, ClockError> {
        if l < 4 || l % 2 != 0 {
            return Err(ClockError::Size(l));
        }
        let n = l * l;
        let id = |x: usize, y: usize| ((x % l) * l + y % l) as u32;
        let mut edges = Vec::with_capacity(3 * n / 2);
        for x in 0..l {
            for y in 0..l {
                edges.push((id(x, y), id(x + 1, y)));
                if (x + y) % 2 == 0 {
                    edges.push((id(x, y), id(x, y + 1)));
                }
            }
        }
        let mut adj: Vec<Vec<u32>> = vec![Vec::with_capacity(3); n];
        for &(a, b) in &edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        let neighbors = adj
            .into_iter()
            .map(|v| [v[0], v[1], v[2]])
            .collect();
        Ok(HoneycombLattice { l, edges, neighbors })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn num_sites(&self) -> usize {
        self.l * self.l
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, site: usize) -> &[u32; 3] {
        &self.neighbors[site]
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site / self.l, site % self.l)
    }

    /// Minimum-image euclidean distance in the grid embedding.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        let wrap = |d: usize| d.min(self.l - d) as f64;
        wrap(ax.abs_diff(bx)).hypot(wrap(ay.abs_diff(by)))
    }
}

/// Six-state angle field `θ_i = 2π q_i / 6` with its own generator.
#[derive(Debug, Clone)]
pub struct ClockConfig {
    q: Vec<u8>,
    rng: Rng,
    step: u64,
    edge_order: Vec<u32>,
    site_order: Vec<u32>,
}

impl ClockConfig {
    /// Uniformly random angles drawn from `rng::stream(seed, stream)`.
    pub fn random(lattice: &HoneycombLattice, seed: u64, stream: u64) -> Self {
        let mut rng = rng::stream(seed, stream);
        let q = (0..lattice.num_sites()).map(|_| rng.gen_range(0..STATES)).collect();
        Self::with_rng(lattice, q, rng)
    }

    pub fn from_states(lattice: &HoneycombLattice, q: Vec<u8>, seed: u64) -> Result<Self, ClockError> {
        if q.len() != lattice.num_sites() {
            return Err(ClockError::Mismatch {
                expected: lattice.num_sites(),
                got: q.len(),
            });
        }
        if let Some(&bad) = q.iter().find(|&&s| s >= STATES) {
            return Err(ClockError::State(bad));
        }
        Ok(Self::with_rng(lattice, q, rng::stream(seed, 0)))
    }

    fn with_rng(lattice: &HoneycombLattice, q: Vec<u8>, rng: Rng) -> Self {
        ClockConfig {
            q,
            rng,
            step: 0,
            edge_order: (0..lattice.edges.len() as u32).collect(),
            site_order: (0..lattice.num_sites() as u32).collect(),
        }
    }

    pub fn states(&self) -> &[u8] {
        &self.q
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        self.q.iter().map(|&s| 2.0 * PI * s as f64 / STATES as f64)
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// `|N⁻¹ Σ (cos θ_i, sin θ_i)|`.
    pub fn magnetization(&self) -> f64 {
        let mut counts = [0usize; STATES as usize];
        for &s in &self.q {
            counts[s as usize] += 1;
        }
        let sum: Complex64 = counts
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / STATES as f64))
            .sum();
        sum.norm() / self.q.len() as f64
    }
}

/// Doubled energy `−Σ 2 cos(θ_i − θ_j)`, exact in integers.
pub fn energy2(config: &ClockConfig, lattice: &HoneycombLattice) -> i64 {
    lattice
        .edges
        .iter()
        .map(|&(a, b)| -bond2(config.q[a as usize], config.q[b as usize]) as i64)
        .sum()
}

/// `H = −Σ_⟨ij⟩ cos(θ_i − θ_j)`.
pub fn energy(config: &ClockConfig, lattice: &HoneycombLattice) -> f64 {
    energy2(config, lattice) as f64 / 2.0
}

/// Doubled bond sum of `site` at state `s`, skipping neighbour `skip`.
#[inline]
fn local2(q: &[u8], lattice: &HoneycombLattice, site: usize, s: u8, skip: u32) -> i32 {
    lattice.neighbors[site]
        .iter()
        .filter(|&&k| k != skip)
        .map(|&k| bond2(s, q[k as usize]))
        .sum()
}

/// One time step: every edge in random order with a uniform proposal for
/// both endpoints, then every site in random order with a one-site
/// proposal. A proposal is accepted iff it does not raise the energy.
pub fn sweep(config: &mut ClockConfig, lattice: &HoneycombLattice) {
    let ClockConfig {
        q,
        rng,
        edge_order,
        site_order,
        ..
    } = config;
    edge_order.shuffle(rng);
    for &e in edge_order.iter() {
        let (a, b) = lattice.edges[e as usize];
        let (ia, ib) = (a as usize, b as usize);
        let (na, nb) = (rng.gen_range(0..STATES), rng.gen_range(0..STATES));
        let old = local2(q, lattice, ia, q[ia], b) + local2(q, lattice, ib, q[ib], a) + bond2(q[ia], q[ib]);
        let new = local2(q, lattice, ia, na, b) + local2(q, lattice, ib, nb, a) + bond2(na, nb);
        if new >= old {
            q[ia] = na;
            q[ib] = nb;
        }
    }
    site_order.shuffle(rng);
    for &i in site_order.iter() {
        let i = i as usize;
        let s = rng.gen_range(0..STATES);
        if local2(q, lattice, i, s, u32::MAX) >= local2(q, lattice, i, q[i], u32::MAX) {
            q[i] = s;
        }
    }
    config.step += 1;
}

/// Distance-binned correlation `C(r) = ⟨cos(θ_i − θ_j)⟩` over all pairs
/// whose rounded minimum-image distance is `r`, for `r = 0..=r_max`,
/// computed through the FFT autocorrelation of `e^{iθ}`.
pub struct Correlator {
    l: usize,
    fft: Fft2,
    bin: Vec<u16>,
    counts: Vec<usize>,
    buf: Vec<Complex64>,
}

impl Correlator {
    pub fn new(lattice: &HoneycombLattice, r_max: usize) -> Self {
        let l = lattice.l;
        let mut bin = vec![u16::MAX; l * l];
        let mut counts = vec![0; r_max + 1];
        for dx in 0..l {
            for dy in 0..l {
                let r = lattice.distance(0, dx * l + dy).round() as usize;
                if r <= r_max {
                    bin[dx * l + dy] = r as u16;
                    counts[r] += 1;
                }
            }
        }
        Correlator {
            l,
            fft: Fft2::new(l, l),
            bin,
            counts,
            buf: vec![Complex64::new(0.0, 0.0); l * l],
        }
    }

    pub fn r_max(&self) -> usize {
        self.counts.len() - 1
    }

    /// Writes `C(0..=r_max)` into `out`; bins no displacement reaches are NaN.
    pub fn compute(&mut self, config: &ClockConfig, out: &mut [f64]) {
        let table: Vec<Complex64> = (0..STATES)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / STATES as f64))
            .collect();
        for (z, &s) in self.buf.iter_mut().zip(&config.q) {
            *z = table[s as usize];
        }
        self.fft.forward(&mut self.buf);
        for z in self.buf.iter_mut() {
            *z = Complex64::new(z.norm_sqr(), 0.0);
        }
        self.fft.inverse(&mut self.buf);
        out.iter_mut().for_each(|v| *v = 0.0);
        for (z, &b) in self.buf.iter().zip(&self.bin) {
            if b != u16::MAX {
                out[b as usize] += z.re;
            }
        }
        let n2 = (self.l * self.l) as f64 * (self.l * self.l) as f64;
        for (v, &c) in out.iter_mut().zip(&self.counts) {
            *v = if c == 0 { f64::NAN } else { *v / (c as f64 * n2) };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honeycomb_coordination_and_edge_count() {
        for l in [4, 6, 10] {
            let h = HoneycombLattice::new(l).unwrap();
            assert_eq!(h.edges().len(), 3 * h.num_sites() / 2);
            let mut deg = vec![0; h.num_sites()];
            for &(a, b) in h.edges() {
                assert_ne!(a, b);
                deg[a as usize] += 1;
                deg[b as usize] += 1;
            }
            assert!(deg.iter().all(|&d| d == 3));
        }
        assert_eq!(HoneycombLattice::new(5).unwrap_err(), ClockError::Size(5));
        assert!(HoneycombLattice::new(2).is_err());
    }

    #[test]
    fn honeycomb_is_bipartite_with_hexagons() {
        // a brick wall is bipartite by (x + y) parity; its faces are 6-cycles
        let h = HoneycombLattice::new(6).unwrap();
        for &(a, b) in h.edges() {
            let (ax, ay) = h.coords(a as usize);
            let (bx, by) = h.coords(b as usize);
            assert_ne!((ax + ay) % 2, (bx + by) % 2);
        }
    }

    #[test]
    fn aligned_energy_is_minimal() {
        let h = HoneycombLattice::new(6).unwrap();
        let c = ClockConfig::from_states(&h, vec![4; 36], 0).unwrap();
        assert_eq!(energy(&c, &h), -1.5 * 36.0);
        assert_eq!(c.magnetization(), 1.0);
    }

    #[test]
    fn antiparallel_bond_costs_plus_one() {
        let h = HoneycombLattice::new(4).unwrap();
        let (a, b) = h.edges()[0];
        let mut q = vec![0; 16];
        q[a as usize] = 3;
        let c = ClockConfig::from_states(&h, q, 0).unwrap();
        let contrib = -(bond2(c.q[a as usize], c.q[b as usize]) as f64) / 2.0;
        assert_eq!(contrib, 1.0);
        // the flipped site touches three bonds, each moving from −1 to +1
        assert_eq!(energy(&c, &h), -24.0 + 6.0);
    }

    #[test]
    fn energy_matches_naive_pair_loop() {
        let h = HoneycombLattice::new(8).unwrap();
        let c = ClockConfig::random(&h, 11, 0);
        let th: Vec<f64> = c.angles().collect();
        let n = h.num_sites();
        let mut e = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                if h.neighbors(i).contains(&(j as u32)) {
                    e -= (th[i] - th[j]).cos();
                }
            }
        }
        assert!((energy(&c, &h) - e).abs() < 1e-9);
    }

    #[test]
    fn sweeps_never_raise_energy() {
        let h = HoneycombLattice::new(12).unwrap();
        let mut c = ClockConfig::random(&h, 3, 0);
        let mut e = energy2(&c, &h);
        let floor = -3 * h.num_sites() as i64;
        for _ in 0..50 {
            sweep(&mut c, &h);
            let e2 = energy2(&c, &h);
            assert!(e2 <= e && e2 >= floor);
            e = e2;
        }
        assert_eq!(c.step(), 50);
    }

    #[test]
    fn aligned_state_is_absorbing() {
        let h = HoneycombLattice::new(6).unwrap();
        let mut c = ClockConfig::from_states(&h, vec![2; 36], 9).unwrap();
        for _ in 0..5 {
            sweep(&mut c, &h);
        }
        assert!(c.states().iter().all(|&s| s == 2));
    }

    #[test]
    fn single_defect_heals_quickly() {
        let h = HoneycombLattice::new(6).unwrap();
        let mut q = vec![0; 36];
        q[14] = 3;
        let mut c = ClockConfig::from_states(&h, q, 5).unwrap();
        // a leftover 60° twist is fixed by a given sweep with probability ≥ 1/6
        for _ in 0..60 {
            sweep(&mut c, &h);
        }
        assert_eq!(energy2(&c, &h), -3 * 36);
    }

    #[test]
    fn sweeps_are_deterministic() {
        let h = HoneycombLattice::new(8).unwrap();
        let mut a = ClockConfig::random(&h, 42, 3);
        let mut b = ClockConfig::random(&h, 42, 3);
        for _ in 0..20 {
            sweep(&mut a, &h);
            sweep(&mut b, &h);
        }
        assert_eq!(a.states(), b.states());
        assert_ne!(ClockConfig::random(&h, 42, 4).states(), ClockConfig::random(&h, 42, 3).states());
    }

    #[test]
    fn correlator_matches_pair_sum() {
        let h = HoneycombLattice::new(8).unwrap();
        let c = ClockConfig::random(&h, 1, 0);
        let th: Vec<f64> = c.angles().collect();
        let r_max = 5;
        let mut corr = Correlator::new(&h, r_max);
        let mut out = vec![0.0; r_max + 1];
        corr.compute(&c, &mut out);
        let mut sum = vec![0.0; r_max + 1];
        let mut cnt = vec![0usize; r_max + 1];
        for i in 0..64 {
            for j in 0..64 {
                let r = h.distance(i, j).round() as usize;
                if r <= r_max {
                    sum[r] += (th[i] - th[j]).cos();
                    cnt[r] += 1;
                }
            }
        }
        for r in 0..=r_max {
            assert!((out[r] - sum[r] / cnt[r] as f64).abs() < 1e-12, "r = {r}");
        }
        assert!((out[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_start_magnetization_is_small() {
        let h = HoneycombLattice::new(40).unwrap();
        let m: f64 = (0..20).map(|k| ClockConfig::random(&h, 8, k).magnetization()).sum::<f64>() / 20.0;
        // E|m| = √(π/4N) for an isotropic 2D random walk
        assert!((m - (PI / (4.0 * 1600.0)).sqrt()).abs() < 0.01, "{m}");
    }
}
