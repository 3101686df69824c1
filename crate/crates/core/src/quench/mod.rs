//! Exact state-vector evolution of the transverse-field Ising model
//!
//! `H(s) = −Γ(s) Σ σx_i + 𝒥(s) (Σ J_ij σz_i σz_j − Σ h_i σz_i)`
//!
//! from the uniform superposition, followed by measurement sampling.
//!
//! Basis index bit `i` holds qubit `i`; a clear bit is spin `+1` (↑), a set
//! bit is spin `−1` (↓).

mod ground;
mod samples;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::Lattice;
use crate::schedule::Schedule;

pub use ground::{exact_ground_state, GroundState};
pub use samples::{sample, SampleMeta, SampleSet, SampleSetError};

pub const MAX_QUBITS: usize = 24;
pub const DEFAULT_DT: f64 = 0.05;
pub const NORM_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum QuenchError {
    #[error("{0} qubits is outside 1..={MAX_QUBITS}; use the clock Monte Carlo for large lattices")]
    QubitCount(usize),
    #[error("state has {state} qubits but the problem has {problem}")]
    SizeMismatch { state: usize, problem: usize },
    #[error("invalid quench parameter: {0}")]
    Param(String),
    #[error("dt = {dt} exceeds the anneal duration T = {t}")]
    StepTooLarge { dt: f64, t: f64 },
    #[error("norm drifted by {drift:e} at step {step}")]
    NormDrift { step: usize, drift: f64 },
    #[error("ground-state solver did not converge (residual {0:e})")]
    NoConvergence(f64),
}

/// Diagonal Ising problem: bonds `(a, b, J)` and longitudinal fields `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingProblem {
    pub n: usize,
    pub bonds: Vec<(usize, usize, f64)>,
    pub fields: Vec<f64>,
}

impl IsingProblem {
    pub fn new(n: usize, bonds: Vec<(usize, usize, f64)>) -> Self {
        IsingProblem {
            n,
            bonds,
            fields: vec![0.0; n],
        }
    }

    pub fn from_lattice(lattice: &Lattice) -> Self {
        let bonds = lattice.bonds().iter().map(|b| (b.a, b.b, b.j)).collect();
        IsingProblem::new(lattice.num_sites(), bonds)
    }

    pub fn with_fields(mut self, fields: Vec<f64>) -> Self {
        assert_eq!(fields.len(), self.n);
        self.fields = fields;
        self
    }

    /// `Σ J s_a s_b − Σ h s_i` for ±1 spins.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = 0.0;
        for &(a, b, j) in &self.bonds {
            e += j * (spins[a] * spins[b]) as f64;
        }
        for (h, &s) in self.fields.iter().zip(spins) {
            e -= h * s as f64;
        }
        e
    }

    /// Energy of computational basis state `index`.
    pub fn basis_energy(&self, index: usize) -> f64 {
        let spin = |i: usize| if index >> i & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for &(a, b, j) in &self.bonds {
            e += j * spin(a) * spin(b);
        }
        for (i, h) in self.fields.iter().enumerate() {
            e -= h * spin(i);
        }
        e
    }
}

impl From<&Lattice> for IsingProblem {
    fn from(l: &Lattice) -> Self {
        IsingProblem::from_lattice(l)
    }
}

pub fn spins_of(index: usize, n: usize) -> Vec<i8> {
    (0..n).map(|i| if index >> i & 1 == 0 { 1 } else { -1 }).collect()
}

pub fn index_of(spins: &[i8]) -> usize {
    spins
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &s)| if s < 0 { acc | 1 << i } else { acc })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

/// The uniform superposition, ground state of `−Σ σx`.
pub fn init_state(n: usize) -> Result<StateVector, QuenchError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(QuenchError::QubitCount(n));
    }
    let dim = 1usize << n;
    let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(StateVector {
        n,
        amps: vec![a; dim],
    })
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QuenchError> {
        let dim = amps.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(QuenchError::Param(format!("{dim} amplitudes is not 2^n")));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(QuenchError::QubitCount(n));
        }
        Ok(StateVector { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, QuenchError> {
        let mut s = init_state(n)?;
        s.amps.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `⟨H(Γ, 𝒥)⟩`.
    pub fn energy(&self, problem: &IsingProblem, gamma: f64, jcal: f64) -> f64 {
        let mut e = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            e += jcal * problem.basis_energy(i) * a.norm_sqr();
            for q in 0..self.n {
                e -= gamma * (a.conj() * self.amps[i ^ (1 << q)]).re;
            }
        }
        e
    }

    /// `exp(iθ σx)` on every qubit: `a0 ← c a0 + i s a1`, `a1 ← c a1 + i s a0`.
    fn rotate_x(&mut self, theta: f64) {
        let (s, c) = theta.sin_cos();
        let is = Complex64::new(0.0, s);
        for q in 0..self.n {
            rotate_qubit(&mut self.amps, 1 << q, c, is);
        }
    }

    fn apply_phases(&mut self, levels: &EnergyLevels, angle: f64) {
        let phases: Vec<Complex64> = levels
            .energies
            .iter()
            .map(|e| Complex64::from_polar(1.0, -angle * e))
            .collect();
        apply_level_phases(&mut self.amps, &levels.level_of, &phases);
    }
}

#[cfg(feature = "parallel")]
const PAR_CHUNK: usize = 1 << 12;

#[cfg(feature = "parallel")]
fn rotate_qubit(amps: &mut [Complex64], bit: usize, c: f64, is: Complex64) {
    use rayon::prelude::*;
    let block = 2 * bit;
    if block >= PAR_CHUNK {
        for chunk in amps.chunks_mut(block) {
            let (lo, hi) = chunk.split_at_mut(bit);
            lo.par_chunks_mut(PAR_CHUNK / 2)
                .zip(hi.par_chunks_mut(PAR_CHUNK / 2))
                .for_each(|(l, h)| rotate_pairs(l, h, c, is));
        }
    } else {
        amps.par_chunks_mut(PAR_CHUNK).for_each(|chunk| {
            for b in chunk.chunks_mut(block) {
                let (l, h) = b.split_at_mut(bit);
                rotate_pairs(l, h, c, is);
            }
        });
    }
}

#[cfg(not(feature = "parallel"))]
fn rotate_qubit(amps: &mut [Complex64], bit: usize, c: f64, is: Complex64) {
    for b in amps.chunks_mut(2 * bit) {
        let (l, h) = b.split_at_mut(bit);
        rotate_pairs(l, h, c, is);
    }
}

#[inline]
fn rotate_pairs(lo: &mut [Complex64], hi: &mut [Complex64], c: f64, is: Complex64) {
    for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x0, x1) = (*a0, *a1);
        *a0 = x0 * c + is * x1;
        *a1 = x1 * c + is * x0;
    }
}

#[cfg(feature = "parallel")]
fn apply_level_phases(amps: &mut [Complex64], level_of: &[u32], phases: &[Complex64]) {
    use rayon::prelude::*;
    amps.par_chunks_mut(PAR_CHUNK)
        .zip(level_of.par_chunks(PAR_CHUNK))
        .for_each(|(a, l)| {
            for (x, &k) in a.iter_mut().zip(l) {
                *x *= phases[k as usize];
            }
        });
}

#[cfg(not(feature = "parallel"))]
fn apply_level_phases(amps: &mut [Complex64], level_of: &[u32], phases: &[Complex64]) {
    for (x, &k) in amps.iter_mut().zip(level_of) {
        *x *= phases[k as usize];
    }
}

/// Distinct diagonal energies and the level of every basis state, so each
/// step evaluates one complex exponential per level instead of per state.
struct EnergyLevels {
    energies: Vec<f64>,
    level_of: Vec<u32>,
}

impl EnergyLevels {
    fn new(problem: &IsingProblem) -> Self {
        use std::collections::HashMap;
        let dim = 1usize << problem.n;
        let mut index: HashMap<i64, u32> = HashMap::new();
        let mut energies = Vec::new();
        let level_of = (0..dim)
            .map(|i| {
                let e = problem.basis_energy(i);
                let key = (e * 1e9).round() as i64;
                *index.entry(key).or_insert_with(|| {
                    energies.push(e);
                    (energies.len() - 1) as u32
                })
            })
            .collect();
        EnergyLevels { energies, level_of }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchParams {
    /// Anneal time; the simulated duration is `T = π t_a`.
    pub t_a: f64,
    pub dt: f64,
    pub seed: u64,
    pub reads: usize,
}

impl QuenchParams {
    pub fn new(t_a: f64, seed: u64, reads: usize) -> Self {
        QuenchParams {
            t_a,
            dt: DEFAULT_DT,
            seed,
            reads,
        }
    }

    pub fn duration(&self) -> f64 {
        PI * self.t_a
    }

    pub fn validate(&self) -> Result<(), QuenchError> {
        if !(self.t_a > 0.0 && self.t_a.is_finite()) {
            return Err(QuenchError::Param(format!("t_a must be positive, got {}", self.t_a)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(QuenchError::Param(format!("dt must be positive, got {}", self.dt)));
        }
        if self.reads == 0 {
            return Err(QuenchError::Param("reads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveReport {
    pub steps: usize,
    /// Actual step, `T / steps ≤ dt`.
    pub step: f64,
    pub max_norm_drift: f64,
}

/// Number of steps so the actual step never exceeds `dt`.
fn step_count(t: f64, dt: f64) -> usize {
    ((t / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Integrates `i dψ/dt = H(t/T) ψ` over `[0, T]`, `T = π t_a`, with the
/// symmetric splitting `D(h/2) X(h) D(h/2)` per step, evaluating the
/// schedule at each step's midpoint. Adjacent half-steps of the diagonal
/// part are fused.
pub fn evolve(
    state: &mut StateVector,
    problem: &IsingProblem,
    schedule: &Schedule,
    params: &QuenchParams,
) -> Result<EvolveReport, QuenchError> {
    params.validate()?;
    if state.n != problem.n {
        return Err(QuenchError::SizeMismatch {
            state: state.n,
            problem: problem.n,
        });
    }
    let t = params.duration();
    if params.dt > t {
        return Err(QuenchError::StepTooLarge { dt: params.dt, t });
    }
    let steps = step_count(t, params.dt);
    let h = t / steps as f64;
    let coeffs: Vec<(f64, f64)> = (0..steps)
        .map(|k| {
            let s = ((k as f64 + 0.5) / steps as f64).min(1.0);
            schedule.evaluate(s).expect("midpoints lie in [0, 1]")
        })
        .collect();
    run_split(state, problem, &coeffs, h)
}

/// Evolves under the fixed `H(Γ, 𝒥)` for `duration`.
pub fn evolve_fixed(
    state: &mut StateVector,
    problem: &IsingProblem,
    gamma: f64,
    jcal: f64,
    duration: f64,
    dt: f64,
) -> Result<EvolveReport, QuenchError> {
    if !(duration > 0.0 && dt > 0.0) {
        return Err(QuenchError::Param("duration and dt must be positive".into()));
    }
    if state.n != problem.n {
        return Err(QuenchError::SizeMismatch {
            state: state.n,
            problem: problem.n,
        });
    }
    let steps = step_count(duration, dt);
    let coeffs = vec![(gamma, jcal); steps];
    run_split(state, problem, &coeffs, duration / steps as f64)
}

fn run_split(
    state: &mut StateVector,
    problem: &IsingProblem,
    coeffs: &[(f64, f64)],
    h: f64,
) -> Result<EvolveReport, QuenchError> {
    let levels = EnergyLevels::new(problem);
    let mut max_drift: f64 = 0.0;
    let mut pending = 0.5 * coeffs[0].1 * h;
    for (k, &(gamma, jcal)) in coeffs.iter().enumerate() {
        state.apply_phases(&levels, pending);
        state.rotate_x(gamma * h);
        pending = 0.5 * jcal * h + coeffs.get(k + 1).map_or(0.0, |c| 0.5 * c.1 * h);
        let drift = (state.norm_sqr() - 1.0).abs();
        max_drift = max_drift.max(drift);
        if drift > NORM_TOL {
            return Err(QuenchError::NormDrift { step: k, drift });
        }
    }
    state.apply_phases(&levels, pending);
    Ok(EvolveReport {
        steps: coeffs.len(),
        step: h,
        max_norm_drift: max_drift,
    })
}

/// Runs one anneal on `lattice` and samples `params.reads` reads.
pub fn quench(
    lattice: &Lattice,
    schedule: &Schedule,
    params: &QuenchParams,
) -> Result<SampleSet, QuenchError> {
    let problem = IsingProblem::from_lattice(lattice);
    let mut state = init_state(problem.n)?;
    evolve(&mut state, &problem, schedule, params)?;
    let mut set = sample(&state, params.reads, params.seed);
    set.meta = SampleMeta::for_lattice(lattice, Some(params.t_a), params.seed, params.reads);
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cylinder, Lattice};
    use crate::schedule::default_schedule;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn dense_h(p: &IsingProblem, gamma: f64, jcal: f64) -> DMatrix<f64> {
        let dim = 1 << p.n;
        let mut h = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            h[(i, i)] = jcal * p.basis_energy(i);
            for q in 0..p.n {
                h[(i, i ^ (1 << q))] -= gamma;
            }
        }
        h
    }

    #[test]
    fn init_state_amplitudes() {
        let s = init_state(1).unwrap();
        for a in s.amplitudes() {
            assert_abs_diff_eq!(a.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        }
        let s = init_state(2).unwrap();
        assert!(s.amplitudes().iter().all(|a| (a.re - 0.5).abs() < 1e-15 && a.im == 0.0));
        for n in 1..12 {
            assert_abs_diff_eq!(init_state(n).unwrap().norm_sqr(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(init_state(0), Err(QuenchError::QubitCount(0)));
        assert_eq!(init_state(25), Err(QuenchError::QubitCount(25)));
    }

    #[test]
    fn spin_index_round_trip() {
        for i in 0..64 {
            assert_eq!(index_of(&spins_of(i, 6)), i);
        }
        assert_eq!(spins_of(0, 2), vec![1, 1]);
        assert_eq!(spins_of(1, 2), vec![-1, 1]);
    }

    #[test]
    fn zero_duration_keeps_product_state() {
        let l = build_cylinder(2, 4, 0.9, -2.0).unwrap();
        let p = IsingProblem::from_lattice(&l);
        let t_a = 1e-4;
        let params = QuenchParams {
            t_a,
            dt: PI * t_a,
            seed: 0,
            reads: 1,
        };
        let mut s = init_state(p.n).unwrap();
        let rep = evolve(&mut s, &p, &default_schedule(), &params).unwrap();
        assert_eq!(rep.steps, 1);
        assert!(s.fidelity(&init_state(p.n).unwrap()) > 1.0 - 1e-6);
    }

    #[test]
    fn rejects_step_longer_than_anneal() {
        let p = IsingProblem::new(2, vec![(0, 1, -1.0)]);
        let mut s = init_state(2).unwrap();
        let params = QuenchParams {
            t_a: 0.01,
            dt: 0.05,
            seed: 0,
            reads: 1,
        };
        assert!(matches!(
            evolve(&mut s, &p, &default_schedule(), &params),
            Err(QuenchError::StepTooLarge { .. })
        ));
        let mut s3 = init_state(3).unwrap();
        assert!(matches!(
            evolve(&mut s3, &p, &default_schedule(), &QuenchParams::new(1.0, 0, 1)),
            Err(QuenchError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn adiabatic_ferromagnetic_pair() {
        let p = IsingProblem::new(2, vec![(0, 1, -1.0)]);
        let mut s = init_state(2).unwrap();
        evolve(&mut s, &p, &default_schedule(), &QuenchParams::new(20.0, 0, 1)).unwrap();
        let probs = s.probabilities();
        assert!(probs[0] + probs[3] >= 0.99, "aligned weight {}", probs[0] + probs[3]);
    }

    #[test]
    fn matches_dense_propagator_for_fixed_h() {
        // exact exp(-iHt) through the eigendecomposition of the dense matrix
        let p = IsingProblem::new(3, vec![(0, 1, 0.7), (1, 2, -1.3), (0, 2, 0.4)])
            .with_fields(vec![0.2, 0.0, -0.1]);
        let (gamma, jcal, t) = (0.8, 0.6, 2.0);
        let eig = dense_h(&p, gamma, jcal).symmetric_eigen();
        let psi0 = init_state(3).unwrap();
        let mut exact = vec![Complex64::new(0.0, 0.0); 8];
        for k in 0..8 {
            let v = eig.eigenvectors.column(k);
            let overlap: Complex64 = (0..8).map(|i| psi0.amplitudes()[i] * v[i]).sum();
            let phase = Complex64::from_polar(1.0, -eig.eigenvalues[k] * t);
            for i in 0..8 {
                exact[i] += phase * overlap * v[i];
            }
        }
        let exact = StateVector::from_amplitudes(exact).unwrap();
        let mut s = init_state(3).unwrap();
        evolve_fixed(&mut s, &p, gamma, jcal, t, 0.002).unwrap();
        assert!(s.fidelity(&exact) > 1.0 - 1e-8);
    }

    #[test]
    fn fixed_hamiltonian_conserves_energy() {
        let l = build_cylinder(2, 4, 0.9, -2.0).unwrap();
        let p = IsingProblem::from_lattice(&l);
        let mut s = init_state(p.n).unwrap();
        // leave the eigenstate first so the check is not vacuous
        evolve_fixed(&mut s, &p, 0.0, 1.0, 0.3, 0.05).unwrap();
        let e0 = s.energy(&p, 0.5, 0.5);
        evolve_fixed(&mut s, &p, 0.5, 0.5, 10.0, 0.01).unwrap();
        assert_abs_diff_eq!(s.energy(&p, 0.5, 0.5), e0, epsilon = 1e-3);
    }

    #[test]
    fn norm_drift_stays_tiny() {
        let l = Lattice::ring(8, -1.0).unwrap();
        let p = IsingProblem::from_lattice(&l);
        let mut s = init_state(8).unwrap();
        let rep = evolve(&mut s, &p, &default_schedule(), &QuenchParams::new(4.0, 0, 1)).unwrap();
        assert!(rep.max_norm_drift < 1e-10);
        assert_eq!(rep.steps, 252);
    }

    #[test]
    fn deterministic_evolution() {
        let l = build_cylinder(2, 4, 0.9, -0.9).unwrap();
        let a = quench(&l, &default_schedule(), &QuenchParams::new(2.0, 5, 50)).unwrap();
        let b = quench(&l, &default_schedule(), &QuenchParams::new(2.0, 5, 50)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.meta().t_a, Some(2.0));
    }

    #[test]
    fn energy_levels_compress() {
        let l = build_cylinder(2, 4, 0.9, -2.0).unwrap();
        let p = IsingProblem::from_lattice(&l);
        let lv = EnergyLevels::new(&p);
        assert!(lv.energies.len() < 64);
        for i in 0..(1 << p.n) {
            assert_abs_diff_eq!(lv.energies[lv.level_of[i] as usize], p.basis_energy(i), epsilon = 1e-9);
        }
    }
}
