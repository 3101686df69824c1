//! Iterative calibration of a sampler: flux-bias zeroing, orbit-wise
//! coupler balancing and anneal-line offset equalization.

mod mock;

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{compute_orbits, Lattice, OrbitPartition};
use crate::quench::SampleSet;
use crate::rng;

pub use mock::{gibbs_reads, line_of, BaseSampler, HiddenErrors, MockSampler, Sampler, ThermalEnsemble, MAX_EXACT_QUBITS};

pub const DELTA_PHI: f64 = 2e-6;
pub const DELTA_F: f64 = 2.5e-3;
pub const DELTA_O: f64 = 1e-3;
pub const NUM_LINES: usize = 8;

#[derive(Debug, Error)]
pub enum ShimError {
    #[error("sampler failed: {0}")]
    Sampler(String),
    #[error("sampler failed at iteration {iteration}: {reason}")]
    Iteration { iteration: usize, reason: String },
    #[error("{0}")]
    Size(String),
    #[error("{qubits} qubits exceed the exact-ensemble limit of {max}; use the Gibbs base sampler")]
    TooManyQubits { qubits: usize, max: usize },
    #[error("io error on {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShimParams {
    pub delta_phi: f64,
    pub delta_f: f64,
    pub delta_o: f64,
}

impl Default for ShimParams {
    fn default() -> Self {
        ShimParams {
            delta_phi: DELTA_PHI,
            delta_f: DELTA_F,
            delta_o: DELTA_O,
        }
    }
}

/// Everything the shim loop is allowed to set on the sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    pub flux: Vec<f64>,
    pub couplers: Vec<f64>,
    pub offsets: Vec<f64>,
}

impl Controls {
    /// Zero flux and offsets, couplers at their nominal lattice values.
    pub fn nominal(lattice: &Lattice, lines: usize) -> Self {
        Controls {
            flux: vec![0.0; lattice.num_sites()],
            couplers: lattice.bonds().iter().map(|b| b.j).collect(),
            offsets: vec![0.0; lines],
        }
    }

    pub(crate) fn check(&self, lattice: &Lattice, lines: usize) -> Result<(), ShimError> {
        if self.flux.len() != lattice.num_sites() || self.couplers.len() != lattice.bonds().len() || self.offsets.len() != lines {
            return Err(ShimError::Size(format!(
                "controls have {} flux, {} coupler and {} offset entries; expected {}, {} and {}",
                self.flux.len(),
                self.couplers.len(),
                self.offsets.len(),
                lattice.num_sites(),
                lattice.bonds().len(),
                lines
            )));
        }
        Ok(())
    }
}

/// `f = (sign(J) ⟨s_a s_b⟩ + 1) / 2` over the reads.
pub fn frustration_probability(samples: &SampleSet, a: usize, b: usize, j: f64) -> f64 {
    let f = (j.signum() * samples.correlation(a, b) + 1.0) / 2.0;
    f.clamp(0.0, 1.0)
}

pub fn frustrations(samples: &SampleSet, lattice: &Lattice, couplers: &[f64]) -> Vec<f64> {
    lattice
        .bonds()
        .iter()
        .zip(couplers)
        .map(|(b, &j)| frustration_probability(samples, b.a, b.b, j))
        .collect()
}

/// `φ_i ← φ_i − δ_φ ⟨m⟩_i`.
pub fn flux_shim_step(flux: &[f64], magnetizations: &[f64], delta_phi: f64) -> Vec<f64> {
    flux.iter()
        .zip(magnetizations)
        .map(|(phi, m)| phi - delta_phi * m)
        .collect()
}

/// `J ← J + sign(J) δ_f (f − f_orbit)`. A step that would cross zero is
/// skipped so couplers keep their sign.
pub fn coupler_shim_step(couplers: &[f64], frustrations: &[f64], orbits: &OrbitPartition, delta_f: f64) -> Vec<f64> {
    let mut mean = vec![0.0; orbits.num_orbits()];
    for (o, members) in orbits.orbits().enumerate() {
        mean[o] = members.iter().map(|&b| frustrations[b]).sum::<f64>() / members.len() as f64;
    }
    couplers
        .iter()
        .enumerate()
        .map(|(b, &j)| {
            let next = j + j.signum() * delta_f * (frustrations[b] - mean[orbits.orbit_of(b)]);
            if next * j > 0.0 {
                next
            } else {
                j
            }
        })
        .collect()
}

/// Mean frustration of the bonds touching each line, a bond counting once
/// for each endpoint's line.
pub fn per_line_frustration(frustrations: &[f64], lattice: &Lattice, lines: usize) -> Vec<f64> {
    let mut sum = vec![0.0; lines];
    let mut cnt = vec![0usize; lines];
    for (b, &f) in lattice.bonds().iter().zip(frustrations) {
        for q in [b.a, b.b] {
            sum[line_of(q, lines)] += f;
            cnt[line_of(q, lines)] += 1;
        }
    }
    sum.iter()
        .zip(&cnt)
        .map(|(s, &c)| if c == 0 { f64::NAN } else { s / c as f64 })
        .collect()
}

/// `o_l ← o_l − δ_o (f_l − mean f)`, then re-centred so `Σ o_l = 0`.
/// Lines with no statistics (NaN) are left alone.
pub fn offset_shim_step(offsets: &[f64], line_frustration: &[f64], delta_o: f64) -> Vec<f64> {
    let known: Vec<f64> = line_frustration.iter().copied().filter(|f| f.is_finite()).collect();
    if known.is_empty() {
        return offsets.to_vec();
    }
    let mean = known.iter().sum::<f64>() / known.len() as f64;
    let mut next: Vec<f64> = offsets
        .iter()
        .zip(line_frustration)
        .map(|(&o, &f)| if f.is_finite() { o - delta_o * (f - mean) } else { o })
        .collect();
    let centre = next.iter().sum::<f64>() / next.len() as f64;
    next.iter_mut().for_each(|o| *o -= centre);
    next
}

/// Statistics measured in one iteration under the controls of the previous one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub magnetizations: Vec<f64>,
    pub frustrations: Vec<f64>,
    /// Per-line frustration of the offset-calibration ring, when one is used.
    pub line_frustration: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub stats: IterationStats,
    /// Controls after applying this iteration's updates.
    pub controls: Controls,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShimState {
    pub iteration: usize,
    pub params: ShimParams,
    pub initial: Controls,
    pub controls: Controls,
    pub history: Vec<IterationRecord>,
}

impl ShimState {
    pub fn new(initial: Controls, params: ShimParams) -> Self {
        ShimState {
            iteration: 0,
            params,
            controls: initial.clone(),
            initial,
            history: Vec::new(),
        }
    }

    /// Applies the three controller laws to the current controls. Pure in
    /// `(controls, stats)`: replaying recorded stats reproduces the history.
    pub fn next_controls(&self, stats: &IterationStats, orbits: &OrbitPartition) -> Controls {
        let c = &self.controls;
        let p = &self.params;
        Controls {
            flux: flux_shim_step(&c.flux, &stats.magnetizations, p.delta_phi),
            couplers: coupler_shim_step(&c.couplers, &stats.frustrations, orbits, p.delta_f),
            offsets: match &stats.line_frustration {
                Some(lf) => offset_shim_step(&c.offsets, lf, p.delta_o),
                None => c.offsets.clone(),
            },
        }
    }

    pub fn advance(&mut self, stats: IterationStats, orbits: &OrbitPartition) {
        let next = self.next_controls(&stats, orbits);
        self.iteration += 1;
        self.history.push(IterationRecord {
            iteration: self.iteration,
            stats,
            controls: next.clone(),
        });
        self.controls = next;
    }

    pub fn save_json(&self, path: &Path) -> Result<(), ShimError> {
        let io = |e: std::io::Error| ShimError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        };
        let text = serde_json::to_string(self).map_err(|e| ShimError::Checkpoint(e.to_string()))?;
        // write-then-rename so an interrupted save never truncates the checkpoint
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text).map_err(io)?;
        fs::rename(&tmp, path).map_err(io)
    }

    pub fn load_json(path: &Path) -> Result<Self, ShimError> {
        let text = fs::read_to_string(path).map_err(|e| ShimError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| ShimError::Checkpoint(e.to_string()))
    }

    /// `iteration,q0,q1,…` flux biases after each iteration.
    pub fn write_flux_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        self.write_series(w, "q", |c| &c.flux)
    }

    /// `iteration,l0,l1,…` line offsets after each iteration.
    pub fn write_offsets_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        self.write_series(w, "line", |c| &c.offsets)
    }

    fn write_series<W: Write>(&self, w: W, prefix: &str, get: impl Fn(&Controls) -> &Vec<f64>) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let width = get(&self.initial).len();
        let mut header = vec!["iteration".to_string()];
        header.extend((0..width).map(|i| format!("{prefix}{i}")));
        out.write_record(&header)?;
        let rows = std::iter::once((0, &self.initial)).chain(self.history.iter().map(|r| (r.iteration, &r.controls)));
        for (it, c) in rows {
            let mut rec = vec![it.to_string()];
            rec.extend(get(c).iter().map(|v| v.to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Long format `iteration,orbit,bond,coupler,frustration`, one row per
    /// bond per iteration, rows grouped by orbit.
    pub fn write_couplers_csv<W: Write>(&self, w: W, orbits: &OrbitPartition) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iteration", "orbit", "bond", "coupler", "frustration"])?;
        for r in &self.history {
            for (o, members) in orbits.orbits().enumerate() {
                for &b in members {
                    out.write_record(&[
                        r.iteration.to_string(),
                        o.to_string(),
                        b.to_string(),
                        r.controls.couplers[b].to_string(),
                        r.stats.frustrations[b].to_string(),
                    ])?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShimRunConfig {
    pub iterations: usize,
    pub samples_per_iter: usize,
    pub seed: u64,
}

/// An optional 1D ferromagnetic ring on the same anneal lines, sampled each
/// iteration to drive the offset controller.
pub struct OffsetRing<'a> {
    pub sampler: &'a dyn Sampler,
    pub lines: usize,
}

fn sample_at(sampler: &dyn Sampler, controls: &Controls, reads: usize, seed: u64, iteration: usize) -> Result<SampleSet, ShimError> {
    sampler.sample(controls, reads, seed).map_err(|e| ShimError::Iteration {
        iteration,
        reason: e.to_string(),
    })
}

/// Runs iterations `state.iteration + 1 ..= config.iterations`. Iteration
/// `k` draws with seeds derived from `(config.seed, k)` only, so a resumed
/// run matches an uninterrupted one exactly.
pub fn resume_shim(
    mut state: ShimState,
    sampler: &dyn Sampler,
    ring: Option<&OffsetRing<'_>>,
    config: &ShimRunConfig,
    mut on_iteration: impl FnMut(&ShimState) -> Result<(), ShimError>,
) -> Result<ShimState, ShimError> {
    let lattice = sampler.lattice();
    let orbits = compute_orbits(lattice);
    let lines = state.controls.offsets.len();
    if let Some(r) = ring {
        if r.lines != lines {
            return Err(ShimError::Size(format!(
                "ring uses {} lines, controls carry {}",
                r.lines, lines
            )));
        }
    }
    let ring_controls = ring.map(|r| Controls::nominal(r.sampler.lattice(), r.lines));
    while state.iteration < config.iterations {
        let k = state.iteration + 1;
        let samples = sample_at(sampler, &state.controls, config.samples_per_iter, rng::derive(config.seed, 2 * k as u64), k)?;
        let line_frustration = match (ring, &ring_controls) {
            (Some(r), Some(rc)) => {
                let rc = Controls {
                    offsets: state.controls.offsets.clone(),
                    ..rc.clone()
                };
                let rs = sample_at(r.sampler, &rc, config.samples_per_iter, rng::derive(config.seed, 2 * k as u64 + 1), k)?;
                let f = frustrations(&rs, r.sampler.lattice(), &rc.couplers);
                Some(per_line_frustration(&f, r.sampler.lattice(), r.lines))
            }
            _ => None,
        };
        let stats = IterationStats {
            magnetizations: samples.magnetizations(),
            frustrations: frustrations(&samples, lattice, &state.controls.couplers),
            line_frustration,
        };
        state.advance(stats, &orbits);
        on_iteration(&state)?;
    }
    Ok(state)
}

/// Shims `sampler` from nominal controls for `config.iterations` iterations.
pub fn run_shim(
    sampler: &dyn Sampler,
    ring: Option<&OffsetRing<'_>>,
    config: &ShimRunConfig,
    params: ShimParams,
) -> Result<ShimState, ShimError> {
    let lines = ring.map_or(NUM_LINES, |r| r.lines);
    let state = ShimState::new(Controls::nominal(sampler.lattice(), lines), params);
    resume_shim(state, sampler, ring, config, |_| Ok(()))
}

/// Largest within-orbit range `max f − min f` over all orbits.
pub fn orbit_spread(frustrations: &[f64], orbits: &OrbitPartition) -> f64 {
    orbits
        .orbits()
        .map(|m| {
            let (lo, hi) = m
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &b| (lo.min(frustrations[b]), hi.max(frustrations[b])));
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Per-quantity means over the last `window` recorded iterations.
pub fn trailing_means(state: &ShimState, window: usize) -> (Vec<f64>, Vec<f64>) {
    let recs = &state.history[state.history.len().saturating_sub(window)..];
    let n = recs.len().max(1) as f64;
    let q = state.controls.flux.len();
    let b = state.controls.couplers.len();
    let mut m = vec![0.0; q];
    let mut f = vec![0.0; b];
    for r in recs {
        m.iter_mut().zip(&r.stats.magnetizations).for_each(|(a, x)| *a += x / n);
        f.iter_mut().zip(&r.stats.frustrations).for_each(|(a, x)| *a += x / n);
    }
    (m, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_cylinder;
    use crate::quench::SampleMeta;

    fn two_spin(reads: &[[i8; 2]]) -> SampleSet {
        let lat = Lattice::chain(2, 1.0).unwrap();
        let rows: Vec<Vec<i8>> = reads.iter().map(|r| r.to_vec()).collect();
        SampleSet::from_reads(SampleMeta::for_lattice(&lat, None, 0, rows.len()), &rows)
    }

    #[test]
    fn frustration_examples() {
        let aligned = two_spin(&[[1, 1], [-1, -1]]);
        assert_eq!(frustration_probability(&aligned, 0, 1, -1.0), 0.0);
        assert_eq!(frustration_probability(&aligned, 0, 1, 1.0), 1.0);
        let mixed = two_spin(&[[1, 1], [1, -1], [-1, 1], [-1, -1]]);
        assert_eq!(frustration_probability(&mixed, 0, 1, 1.0), 0.5);
    }

    #[test]
    fn flux_step_arithmetic() {
        let phi = vec![0.0; 4];
        assert_eq!(flux_shim_step(&phi, &[0.0; 4], DELTA_PHI), phi);
        let up = flux_shim_step(&phi, &[0.1; 4], DELTA_PHI);
        assert!(up.iter().all(|v| (v + 2e-7).abs() < 1e-20));
        let alt = flux_shim_step(&phi, &[0.1, -0.1, 0.1, -0.1], DELTA_PHI);
        assert!((alt[0] + 2e-7).abs() < 1e-20 && (alt[1] - 2e-7).abs() < 1e-20);
    }

    #[test]
    fn coupler_step_arithmetic() {
        let ring = Lattice::ring(4, 1.0).unwrap();
        let orbits = compute_orbits(&ring);
        let j = vec![1.0; 4];
        assert_eq!(coupler_shim_step(&j, &[0.3; 4], &orbits, DELTA_F), j);
        let next = coupler_shim_step(&j, &[0.6, 0.4, 0.5, 0.5], &orbits, DELTA_F);
        assert!((next[0] - (1.0 + 2.5e-4)).abs() < 1e-15);
        assert!((next[1] - (1.0 - 2.5e-4)).abs() < 1e-15);
        // FM bonds move the other way in J but the same way in |J|
        let fm = coupler_shim_step(&[-1.0; 4], &[0.6, 0.4, 0.5, 0.5], &orbits, DELTA_F);
        assert!((fm[0] + (1.0 + 2.5e-4)).abs() < 1e-15);
    }

    #[test]
    fn coupler_step_keeps_sign() {
        let ring = Lattice::ring(4, 1.0).unwrap();
        let orbits = compute_orbits(&ring);
        let next = coupler_shim_step(&[1e-4, 1.0, 1.0, 1.0], &[0.0, 1.0, 1.0, 1.0], &orbits, DELTA_F);
        assert_eq!(next[0], 1e-4);
    }

    #[test]
    fn offset_step_arithmetic() {
        let o = vec![0.0; 8];
        assert_eq!(offset_shim_step(&o, &[0.3; 8], DELTA_O), o);
        let mut f = vec![0.3; 8];
        f[2] = 0.3 + 0.02 * 8.0 / 7.0; // 0.02 above the mean of all lines
        let next = offset_shim_step(&o, &f, DELTA_O);
        let mean = f.iter().sum::<f64>() / 8.0;
        assert!((f[2] - mean - 0.02).abs() < 1e-12);
        // the pinned mean is zero, so the raised line moves by the full amount
        // minus its share of the re-centring
        assert!(next.iter().sum::<f64>().abs() < 1e-15);
        assert!((next[2] - next[0] + 1e-3 * 0.02 * 8.0 / 7.0).abs() < 1e-15);
        assert!(next[2] < 0.0);
    }

    #[test]
    fn per_line_counts_each_endpoint() {
        let ring = Lattice::ring(4, -1.0).unwrap();
        let lf = per_line_frustration(&[1.0, 0.0, 0.0, 0.0], &ring, 2);
        // bond 0 joins qubits 0 (line 0) and 1 (line 1)
        assert_eq!(lf, vec![0.25, 0.25]);
    }

    fn mock(lat: &Lattice, hidden: HiddenErrors) -> MockSampler {
        MockSampler::new(lat.clone(), hidden, 1.0, BaseSampler::Exact).unwrap()
    }

    #[test]
    fn replaying_stats_reproduces_history() {
        let lat = build_cylinder(2, 4, 1.0, -2.0).unwrap();
        let mut hidden = HiddenErrors::none(8, lat.bonds().len(), NUM_LINES);
        hidden.bias[2] = 0.05;
        let s = mock(&lat, hidden);
        let cfg = ShimRunConfig {
            iterations: 20,
            samples_per_iter: 50,
            seed: 3,
        };
        let state = run_shim(&s, None, &cfg, ShimParams::default()).unwrap();
        let orbits = compute_orbits(&lat);
        let mut replay = ShimState::new(state.initial.clone(), state.params);
        for r in &state.history {
            replay.advance(r.stats.clone(), &orbits);
        }
        assert_eq!(replay, state);
    }

    #[test]
    fn resumed_run_matches_uninterrupted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("shim.json");
        let lat = build_cylinder(2, 4, 1.0, -2.0).unwrap();
        let ring_lat = Lattice::ring(8, -1.0).unwrap();
        let mut hidden = HiddenErrors::none(8, lat.bonds().len(), NUM_LINES);
        hidden.line_timing[1] = 0.1;
        let s = mock(&lat, hidden.clone());
        let rs = mock(&ring_lat, HiddenErrors { bias: vec![0.0; 8], gain: vec![1.0; 8], ..hidden });
        let ring = OffsetRing { sampler: &rs, lines: NUM_LINES };
        let full_cfg = ShimRunConfig {
            iterations: 12,
            samples_per_iter: 40,
            seed: 8,
        };
        let full = run_shim(&s, Some(&ring), &full_cfg, ShimParams::default()).unwrap();
        let half_cfg = ShimRunConfig { iterations: 5, ..full_cfg };
        let half = run_shim(&s, Some(&ring), &half_cfg, ShimParams::default()).unwrap();
        half.save_json(&path).unwrap();
        let loaded = ShimState::load_json(&path).unwrap();
        assert_eq!(loaded, half);
        let resumed = resume_shim(loaded, &s, Some(&ring), &full_cfg, |_| Ok(())).unwrap();
        assert_eq!(resumed, full);
    }

    #[test]
    fn offsets_stay_centred() {
        let ring_lat = Lattice::ring(16, -1.0).unwrap();
        let mut hidden = HiddenErrors::none(16, 16, NUM_LINES);
        hidden.line_timing = vec![0.2, -0.1, 0.0, 0.05, 0.0, 0.0, -0.15, 0.0];
        let rs = mock(&ring_lat, hidden);
        let ring = OffsetRing { sampler: &rs, lines: NUM_LINES };
        let cfg = ShimRunConfig {
            iterations: 30,
            samples_per_iter: 100,
            seed: 1,
        };
        let st = run_shim(&rs, Some(&ring), &cfg, ShimParams::default()).unwrap();
        for r in &st.history {
            assert!(r.controls.offsets.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn history_csvs_have_expected_shape() {
        let lat = build_cylinder(2, 4, 1.0, -2.0).unwrap();
        let s = mock(&lat, HiddenErrors::none(8, lat.bonds().len(), NUM_LINES));
        let cfg = ShimRunConfig {
            iterations: 3,
            samples_per_iter: 10,
            seed: 0,
        };
        let st = run_shim(&s, None, &cfg, ShimParams::default()).unwrap();
        let mut flux = Vec::new();
        st.write_flux_csv(&mut flux).unwrap();
        let flux = String::from_utf8(flux).unwrap();
        // header, the initial controls, then one row per iteration
        assert_eq!(flux.lines().count(), 5);
        assert!(flux.starts_with("iteration,q0,q1,"));
        let mut cp = Vec::new();
        st.write_couplers_csv(&mut cp, &compute_orbits(&lat)).unwrap();
        assert_eq!(String::from_utf8(cp).unwrap().lines().count(), 1 + 3 * lat.bonds().len());
        let mut off = Vec::new();
        st.write_offsets_csv(&mut off).unwrap();
        assert!(String::from_utf8(off).unwrap().starts_with("iteration,line0,"));
    }

    #[test]
    fn sampler_errors_carry_the_iteration() {
        struct Broken(Lattice);
        impl Sampler for Broken {
            fn lattice(&self) -> &Lattice {
                &self.0
            }
            fn sample(&self, _: &Controls, _: usize, _: u64) -> Result<SampleSet, ShimError> {
                Err(ShimError::Sampler("offline".into()))
            }
        }
        let b = Broken(Lattice::ring(4, -1.0).unwrap());
        let cfg = ShimRunConfig {
            iterations: 2,
            samples_per_iter: 1,
            seed: 0,
        };
        let err = run_shim(&b, None, &cfg, ShimParams::default()).unwrap_err();
        assert!(matches!(err, ShimError::Iteration { iteration: 1, .. }));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn couplers_keep_sign_and_bounded_steps(
                j in prop::collection::vec(prop_oneof![-3.0f64..-0.01, 0.01f64..3.0], 8),
                f in prop::collection::vec(0.0f64..1.0, 8),
            ) {
                let ring = Lattice::ring(8, 1.0).unwrap();
                let orbits = compute_orbits(&ring);
                let next = coupler_shim_step(&j, &f, &orbits, DELTA_F);
                for (a, b) in j.iter().zip(&next) {
                    prop_assert!(a.signum() == b.signum());
                    prop_assert!((a - b).abs() <= DELTA_F + 1e-15);
                }
            }

            #[test]
            fn frustration_in_unit_interval(reads in prop::collection::vec(prop::array::uniform2(prop_oneof![Just(1i8), Just(-1i8)]), 1..40), j in -2.0f64..2.0) {
                let f = frustration_probability(&two_spin(&reads), 0, 1, j);
                prop_assert!((0.0..=1.0).contains(&f));
            }
        }
    }
}
