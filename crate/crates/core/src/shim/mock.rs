use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Controls, ShimError};
use crate::lattice::Lattice;
use crate::quench::{self, spins_of, IsingProblem, QuenchParams, SampleMeta, SampleSet};
use crate::rng;
use crate::schedule::default_schedule;

/// Largest problem the enumeration-based ensemble accepts.
pub const MAX_EXACT_QUBITS: usize = 20;

/// Something that turns control settings into spin samples of one fixed lattice.
pub trait Sampler: Sync {
    fn lattice(&self) -> &Lattice;
    fn sample(&self, controls: &Controls, reads: usize, seed: u64) -> Result<SampleSet, ShimError>;
}

/// Device imperfections the mock hides from the shim loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenErrors {
    /// Effective longitudinal field per qubit.
    pub bias: Vec<f64>,
    /// Multiplicative gain per bond.
    pub gain: Vec<f64>,
    /// Timing error per anneal line.
    pub line_timing: Vec<f64>,
}

impl HiddenErrors {
    pub fn none(qubits: usize, bonds: usize, lines: usize) -> Self {
        HiddenErrors {
            bias: vec![0.0; qubits],
            gain: vec![1.0; bonds],
            line_timing: vec![0.0; lines],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BaseSampler {
    /// Heat-bath Gibbs chains, one per read, `sweeps` sweeps from a random start.
    Gibbs { sweeps: usize },
    /// Direct draws from the enumerated Boltzmann distribution.
    Exact,
    /// A coherent anneal of duration `π t_a` under the default schedule.
    Quench { t_a: f64 },
}

/// Thermal stand-in for an annealer. Controls enter the Ising problem it samples as
///
/// `J_eff = g · J · (1 − λ (τ_a + τ_b) / 2)` with `τ = line_timing + offset` of each endpoint's line,
/// `h = b + κ φ`.
#[derive(Debug, Clone)]
pub struct MockSampler {
    lattice: Lattice,
    pub hidden: HiddenErrors,
    pub beta: f64,
    /// `κ`: field per unit flux bias.
    pub flux_gain: f64,
    /// `λ`: fractional coupler change per unit line delay.
    pub offset_gain: f64,
    pub base: BaseSampler,
}

pub fn line_of(qubit: usize, lines: usize) -> usize {
    qubit % lines
}

impl MockSampler {
    pub const DEFAULT_FLUX_GAIN: f64 = 1000.0;
    pub const DEFAULT_OFFSET_GAIN: f64 = 1.0;

    pub fn new(lattice: Lattice, hidden: HiddenErrors, beta: f64, base: BaseSampler) -> Result<Self, ShimError> {
        if hidden.bias.len() != lattice.num_sites() || hidden.gain.len() != lattice.bonds().len() {
            return Err(ShimError::Size(format!(
                "hidden errors cover {} qubits and {} bonds, lattice has {} and {}",
                hidden.bias.len(),
                hidden.gain.len(),
                lattice.num_sites(),
                lattice.bonds().len()
            )));
        }
        if hidden.line_timing.is_empty() {
            return Err(ShimError::Size("at least one anneal line is required".into()));
        }
        if !(beta > 0.0) {
            return Err(ShimError::Size(format!("inverse temperature must be positive, got {beta}")));
        }
        let exact_ok = lattice.num_sites() <= MAX_EXACT_QUBITS;
        match base {
            BaseSampler::Exact if !exact_ok => {
                return Err(ShimError::TooManyQubits {
                    qubits: lattice.num_sites(),
                    max: MAX_EXACT_QUBITS,
                })
            }
            BaseSampler::Quench { .. } if !exact_ok => {
                return Err(ShimError::TooManyQubits {
                    qubits: lattice.num_sites(),
                    max: MAX_EXACT_QUBITS,
                })
            }
            _ => {}
        }
        Ok(MockSampler {
            lattice,
            hidden,
            beta,
            flux_gain: Self::DEFAULT_FLUX_GAIN,
            offset_gain: Self::DEFAULT_OFFSET_GAIN,
            base,
        })
    }

    pub fn lines(&self) -> usize {
        self.hidden.line_timing.len()
    }

    /// The Ising problem actually sampled under `controls`.
    pub fn effective_problem(&self, controls: &Controls) -> Result<IsingProblem, ShimError> {
        controls.check(&self.lattice, self.lines())?;
        let lines = self.lines();
        let tau: Vec<f64> = (0..lines)
            .map(|l| self.hidden.line_timing[l] + controls.offsets[l])
            .collect();
        let bonds = self
            .lattice
            .bonds()
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let delay = (tau[line_of(b.a, lines)] + tau[line_of(b.b, lines)]) / 2.0;
                (b.a, b.b, self.hidden.gain[k] * controls.couplers[k] * (1.0 - self.offset_gain * delay))
            })
            .collect();
        let fields = (0..self.lattice.num_sites())
            .map(|i| self.hidden.bias[i] + self.flux_gain * controls.flux[i])
            .collect();
        Ok(IsingProblem::new(self.lattice.num_sites(), bonds).with_fields(fields))
    }

    /// Exact thermal `⟨s_i⟩` and bond frustrations (signs from `controls`).
    pub fn exact_statistics(&self, controls: &Controls) -> Result<(Vec<f64>, Vec<f64>), ShimError> {
        let problem = self.effective_problem(controls)?;
        let ens = ThermalEnsemble::new(&problem, self.beta)?;
        let n = problem.n;
        let mut m = vec![0.0; n];
        let mut corr = vec![0.0; problem.bonds.len()];
        for (idx, &p) in ens.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (i, mi) in m.iter_mut().enumerate() {
                *mi += p * spin_bit(idx, i) as f64;
            }
            for (k, &(a, b, _)) in problem.bonds.iter().enumerate() {
                corr[k] += p * (spin_bit(idx, a) * spin_bit(idx, b)) as f64;
            }
        }
        let f = corr
            .iter()
            .zip(&controls.couplers)
            .map(|(c, j)| (j.signum() * c + 1.0) / 2.0)
            .collect();
        Ok((m, f))
    }
}

#[inline]
fn spin_bit(idx: usize, i: usize) -> i8 {
    if idx >> i & 1 == 0 {
        1
    } else {
        -1
    }
}

impl Sampler for MockSampler {
    fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    fn sample(&self, controls: &Controls, reads: usize, seed: u64) -> Result<SampleSet, ShimError> {
        let problem = self.effective_problem(controls)?;
        let meta = SampleMeta::for_lattice(&self.lattice, None, seed, reads);
        let n = problem.n;
        match &self.base {
            BaseSampler::Gibbs { sweeps } => {
                let reads: Vec<Vec<i8>> = gibbs_reads(&problem, self.beta, *sweeps, reads, seed);
                Ok(SampleSet::from_reads(meta, &reads))
            }
            BaseSampler::Exact => {
                let ens = ThermalEnsemble::new(&problem, self.beta)?;
                let reads: Vec<Vec<i8>> = (0..reads)
                    .map(|r| spins_of(ens.draw(&mut rng::stream(seed, r as u64)), n))
                    .collect();
                Ok(SampleSet::from_reads(meta, &reads))
            }
            BaseSampler::Quench { t_a } => {
                let params = QuenchParams::new(*t_a, seed, reads);
                let mut state = quench::init_state(n).map_err(|e| ShimError::Sampler(e.to_string()))?;
                quench::evolve(&mut state, &problem, &default_schedule(), &params)
                    .map_err(|e| ShimError::Sampler(e.to_string()))?;
                let mut out = quench::sample(&state, reads, seed);
                out.meta = meta;
                Ok(out)
            }
        }
    }
}

/// Boltzmann distribution over all `2^n` basis states, enumerated in Gray-code order.
pub struct ThermalEnsemble {
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl ThermalEnsemble {
    pub fn new(problem: &IsingProblem, beta: f64) -> Result<Self, ShimError> {
        let n = problem.n;
        if n > MAX_EXACT_QUBITS {
            return Err(ShimError::TooManyQubits {
                qubits: n,
                max: MAX_EXACT_QUBITS,
            });
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b, j) in &problem.bonds {
            adj[a].push((b, j));
            adj[b].push((a, j));
        }
        let size = 1usize << n;
        let mut energy = vec![0.0; size];
        let mut spins = vec![1i8; n];
        let mut e = problem.energy(&spins);
        let mut idx = 0usize;
        energy[0] = e;
        for k in 1..size {
            let i = k.trailing_zeros() as usize;
            // flipping s_i changes E by −2 s_i (Σ J s_j − h_i)
            let local: f64 = adj[i].iter().map(|&(j, c)| c * spins[j] as f64).sum::<f64>() - problem.fields[i];
            e -= 2.0 * spins[i] as f64 * local;
            spins[i] = -spins[i];
            idx ^= 1 << i;
            energy[idx] = e;
        }
        let emin = energy.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut probs: Vec<f64> = energy.iter().map(|&e| (-beta * (e - emin)).exp()).collect();
        let z: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= z);
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(ThermalEnsemble { probs, cdf })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn draw(&self, r: &mut rng::Rng) -> usize {
        let u = r.gen::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// Independent heat-bath chains, read `r` drawing from `rng::stream(seed, r)`.
pub fn gibbs_reads(problem: &IsingProblem, beta: f64, sweeps: usize, reads: usize, seed: u64) -> Vec<Vec<i8>> {
    let n = problem.n;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(a, b, j) in &problem.bonds {
        adj[a].push((b, j));
        adj[b].push((a, j));
    }
    let chain = |r: usize| -> Vec<i8> {
        let mut g = rng::stream(seed, r as u64);
        let mut s: Vec<i8> = (0..n).map(|_| if g.gen::<bool>() { 1 } else { -1 }).collect();
        for _ in 0..sweeps {
            for i in 0..n {
                let local: f64 = adj[i].iter().map(|&(j, c)| c * s[j] as f64).sum::<f64>() - problem.fields[i];
                // P(s_i = +1) = 1 / (1 + e^{2β local})
                let p_up = 1.0 / (1.0 + (2.0 * beta * local).exp());
                s[i] = if g.gen::<f64>() < p_up { 1 } else { -1 };
            }
        }
        s
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..reads).into_par_iter().map(chain).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..reads).map(chain).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_cylinder;
    use crate::quench::index_of;

    fn problem() -> IsingProblem {
        IsingProblem::new(4, vec![(0, 1, -1.0), (1, 2, 0.5), (2, 3, -0.7), (3, 0, 1.2)]).with_fields(vec![0.1, -0.3, 0.0, 0.2])
    }

    #[test]
    fn ensemble_matches_direct_boltzmann() {
        let p = problem();
        let beta = 0.8;
        let ens = ThermalEnsemble::new(&p, beta).unwrap();
        let w: Vec<f64> = (0..16).map(|k| (-beta * p.basis_energy(k)).exp()).collect();
        let z: f64 = w.iter().sum();
        for k in 0..16 {
            assert!((ens.probabilities()[k] - w[k] / z).abs() < 1e-12);
        }
    }

    #[test]
    fn gibbs_reaches_the_ensemble() {
        let p = problem();
        let ens = ThermalEnsemble::new(&p, 0.8).unwrap();
        let reads = gibbs_reads(&p, 0.8, 20, 40_000, 3);
        let mut hist = vec![0.0; 16];
        for r in &reads {
            hist[index_of(r)] += 1.0 / reads.len() as f64;
        }
        for k in 0..16 {
            assert!((hist[k] - ens.probabilities()[k]).abs() < 0.01, "state {k}");
        }
    }

    #[test]
    fn zero_errors_reproduce_the_base_sampler() {
        let lat = build_cylinder(2, 4, 1.0, -2.0).unwrap();
        let hidden = HiddenErrors::none(8, lat.bonds().len(), 8);
        let mock = MockSampler::new(lat.clone(), hidden, 0.7, BaseSampler::Gibbs { sweeps: 10 }).unwrap();
        let controls = Controls::nominal(&lat, 8);
        let got = mock.sample(&controls, 50, 9).unwrap();
        let direct = gibbs_reads(&IsingProblem::from_lattice(&lat).with_fields(vec![0.0; 8]), 0.7, 10, 50, 9);
        for (r, d) in got.reads().zip(&direct) {
            assert_eq!(r, d.as_slice());
        }
    }

    #[test]
    fn hidden_errors_enter_the_effective_problem() {
        let lat = Lattice::ring(8, -1.0).unwrap();
        let mut hidden = HiddenErrors::none(8, 8, 2);
        hidden.bias[3] = 0.05;
        hidden.gain[0] = 0.9;
        hidden.line_timing[1] = 0.1;
        let mut mock = MockSampler::new(lat.clone(), hidden, 1.0, BaseSampler::Exact).unwrap();
        mock.flux_gain = 100.0;
        let mut c = Controls::nominal(&lat, 2);
        c.flux[3] = -1e-4;
        let p = mock.effective_problem(&c).unwrap();
        assert!((p.fields[3] - 0.04).abs() < 1e-12);
        // bond 0 joins lines 0 and 1: mean delay 0.05
        assert!((p.bonds[0].2 - 0.9 * -1.0 * 0.95).abs() < 1e-12);
        assert!((p.bonds[2].2 - -0.95).abs() < 1e-12);
    }

    #[test]
    fn exact_base_refuses_large_lattices() {
        let lat = build_cylinder(4, 6, 1.0, -2.0).unwrap();
        let hidden = HiddenErrors::none(24, lat.bonds().len(), 8);
        assert!(matches!(
            MockSampler::new(lat, hidden, 1.0, BaseSampler::Exact),
            Err(ShimError::TooManyQubits { qubits: 24, .. })
        ));
    }
}
