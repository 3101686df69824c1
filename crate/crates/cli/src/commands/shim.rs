use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use frustsim::lattice::{compute_orbits, Lattice, OrbitPartition};
use frustsim::rng;
use frustsim::shim::{
    orbit_spread, resume_shim, BaseSampler, Controls, HiddenErrors, MockSampler, OffsetRing, Sampler, ShimParams,
    ShimRunConfig, ShimState, NUM_LINES,
};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ensure_dir, write_csv, write_file, LatticeArgs, RunConfig};
use crate::error::CliError;
use crate::plot::{bin_counts, histogram, Plot, Series, Style};

const HIDDEN_TAG: u64 = 0x5eed_0001;
const EVAL_TAG: u64 = 0x5eed_0002;
const HIST_BINS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseArg {
    /// Heat-bath chains from random starts.
    Gibbs,
    /// Exact Boltzmann draws; at most 20 qubits.
    Exact,
    /// Coherent anneals; at most 20 qubits.
    Quench,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(mut_arg("lx", |a| a.default_value("12")), mut_arg("ly", |a| a.default_value("12")))]
pub struct ShimArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long, default_value_t = 1500)]
    pub iterations: usize,
    /// Reads drawn per iteration.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inverse temperature of the mock sampler.
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = BaseArg::Gibbs)]
    pub sampler: BaseArg,
    /// Gibbs sweeps per read.
    #[arg(long, default_value_t = 32)]
    pub sweeps: usize,
    /// Anneal time of the quench base sampler.
    #[arg(long, default_value_t = 1.0)]
    pub ta: f64,
    /// Hidden per-qubit biases are uniform in `±bias_max`.
    #[arg(long, default_value_t = 0.05)]
    pub bias_max: f64,
    /// Fractional gain error on one intra-column coupler.
    #[arg(long, default_value_t = 0.1)]
    pub gain_error: f64,
    /// Hidden per-line timing errors are uniform in `±timing_max`.
    #[arg(long, default_value_t = 0.0)]
    pub timing_max: f64,
    /// Field per unit flux bias in the mock.
    #[arg(long, default_value_t = MockSampler::DEFAULT_FLUX_GAIN)]
    pub flux_gain: f64,
    /// Calibrate line offsets on a ferromagnetic ring of this many qubits (0 = off).
    #[arg(long, default_value_t = 0)]
    pub ring: usize,
    /// Reads for the before/after magnetization report.
    #[arg(long, default_value_t = 1000)]
    pub eval_samples: usize,
    /// Save `shim_state.json` every this many iterations (0 = only at the end).
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub checkpoint_every: usize,
    /// Continue from a saved `shim_state.json`.
    #[arg(long)]
    #[serde(skip)]
    pub resume: Option<PathBuf>,
}

/// Hidden device errors, fixed by the seed and the lattice.
pub fn hidden_errors(args: &ShimArgs, lattice: &Lattice) -> HiddenErrors {
    let mut r = rng::stream(rng::derive(args.seed, HIDDEN_TAG), 0);
    let mut h = HiddenErrors::none(lattice.num_sites(), lattice.bonds().len(), NUM_LINES);
    for b in h.bias.iter_mut() {
        *b = args.bias_max * (2.0 * r.gen::<f64>() - 1.0);
    }
    for t in h.line_timing.iter_mut() {
        *t = args.timing_max * (2.0 * r.gen::<f64>() - 1.0);
    }
    let j1 = lattice.j1();
    let candidates: Vec<usize> = (0..lattice.bonds().len()).filter(|&k| lattice.bonds()[k].j == j1).collect();
    if !candidates.is_empty() && args.gain_error != 0.0 {
        let k = candidates[r.gen_range(0..candidates.len())];
        h.gain[k] = 1.0 - args.gain_error;
    }
    h
}

fn base(args: &ShimArgs) -> BaseSampler {
    match args.sampler {
        BaseArg::Gibbs => BaseSampler::Gibbs { sweeps: args.sweeps },
        BaseArg::Exact => BaseSampler::Exact,
        BaseArg::Quench => BaseSampler::Quench { t_a: args.ta },
    }
}

fn mock(args: &ShimArgs, lattice: Lattice, hidden: HiddenErrors) -> Result<MockSampler, CliError> {
    let mut s = MockSampler::new(lattice, hidden, args.beta, base(args))?;
    s.flux_gain = args.flux_gain;
    Ok(s)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn mean_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum::<f64>() / v.len().max(1) as f64
}

/// Per-qubit magnetizations and bond frustrations from `eval_samples` reads.
fn evaluate(sampler: &MockSampler, controls: &Controls, args: &ShimArgs) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let set = sampler.sample(controls, args.eval_samples, rng::derive(args.seed, EVAL_TAG))?;
    let f = frustsim::shim::frustrations(&set, sampler.lattice(), &controls.couplers);
    Ok((set.magnetizations(), f))
}

fn write_outputs(
    out: &Path,
    state: &ShimState,
    orbits: &OrbitPartition,
    before: &(Vec<f64>, Vec<f64>),
    after: &(Vec<f64>, Vec<f64>),
) -> Result<(), CliError> {
    let save = |name: &str, fill: &dyn Fn(&mut Vec<u8>) -> csv::Result<()>| -> Result<(), CliError> {
        let path = out.join(name);
        let mut buf = Vec::new();
        fill(&mut buf).map_err(|e| CliError::io(&path, e))?;
        write_file(&path, &buf)
    };
    save("flux.csv", &|b| state.write_flux_csv(b))?;
    save("offsets.csv", &|b| state.write_offsets_csv(b))?;
    save("couplers.csv", &|b| state.write_couplers_csv(b, orbits))?;

    write_csv(&out.join("shim_history.csv"), |w| {
        w.write_record(["iteration", "max_abs_m", "mean_abs_m", "orbit_spread"])?;
        for r in &state.history {
            let s = &r.stats;
            w.write_record(&[
                r.iteration.to_string(),
                max_abs(&s.magnetizations).to_string(),
                mean_abs(&s.magnetizations).to_string(),
                orbit_spread(&s.frustrations, orbits).to_string(),
            ])?;
        }
        Ok(())
    })?;
    write_csv(&out.join("magnetizations.csv"), |w| {
        w.write_record(["qubit", "before", "after"])?;
        for (q, (a, b)) in before.0.iter().zip(&after.0).enumerate() {
            w.write_record(&[q.to_string(), a.to_string(), b.to_string()])?;
        }
        Ok(())
    })?;

    let span = max_abs(&before.0).max(max_abs(&after.0)).max(1e-3);
    let edges: Vec<f64> = (0..=HIST_BINS)
        .map(|k| -span + 2.0 * span * k as f64 / HIST_BINS as f64)
        .collect();
    let hb = bin_counts(&before.0, -span, span, HIST_BINS);
    let ha = bin_counts(&after.0, -span, span, HIST_BINS);
    write_csv(&out.join("magnetization_hist.csv"), |w| {
        w.write_record(["bin_lo", "bin_hi", "before", "after"])?;
        for k in 0..HIST_BINS {
            w.write_record(&[edges[k].to_string(), edges[k + 1].to_string(), hb[k].to_string(), ha[k].to_string()])?;
        }
        Ok(())
    })?;
    let svg = histogram(
        "Qubit magnetization before and after shimming",
        "<m_i>",
        &edges,
        &[("before", hb), ("after", ha)],
    );
    write_file(&out.join("magnetization_hist.svg"), svg.as_bytes())?;

    let it: Vec<f64> = state.history.iter().map(|r| r.iteration as f64).collect();
    let conv = Plot {
        title: "Shim convergence".into(),
        x_label: "iteration".into(),
        y_label: "per-iteration estimate".into(),
        log_x: false,
        log_y: false,
        series: vec![
            Series::new(
                "max |<m_i>|",
                it.iter().zip(&state.history).map(|(x, r)| (*x, max_abs(&r.stats.magnetizations))).collect(),
                Style::Line,
            ),
            Series::new(
                "orbit spread",
                it.iter().zip(&state.history).map(|(x, r)| (*x, orbit_spread(&r.stats.frustrations, orbits))).collect(),
                Style::Line,
            ),
        ],
    };
    write_file(&out.join("shim_convergence.svg"), conv.to_svg().as_bytes())?;
    Ok(())
}

pub fn run(args: &ShimArgs, out: &Path) -> Result<String, CliError> {
    if args.samples == 0 || args.eval_samples == 0 {
        return Err(CliError::Config("--samples and --eval-samples must be at least 1".into()));
    }
    let lattice = args.lattice.build()?;
    let orbits = compute_orbits(&lattice);
    let hidden = hidden_errors(args, &lattice);
    let sampler = mock(args, lattice.clone(), hidden.clone())?;
    let ring_sampler = if args.ring > 0 {
        let ring = Lattice::ring(args.ring, -1.0)?;
        let h = HiddenErrors {
            bias: vec![0.0; args.ring],
            gain: vec![1.0; ring.bonds().len()],
            line_timing: hidden.line_timing.clone(),
        };
        Some(mock(args, ring, h)?)
    } else {
        None
    };
    let ring = ring_sampler.as_ref().map(|s| OffsetRing {
        sampler: s as &dyn Sampler,
        lines: NUM_LINES,
    });

    ensure_dir(out)?;
    RunConfig::Shim(args).write(out)?;
    let state = match &args.resume {
        Some(path) => {
            let s = ShimState::load_json(path)?;
            if s.initial != Controls::nominal(&lattice, NUM_LINES) || s.params != ShimParams::default() {
                return Err(CliError::Config(format!(
                    "{} was saved for a different lattice or controller",
                    path.display()
                )));
            }
            if s.iteration > args.iterations {
                return Err(CliError::Config(format!(
                    "{} is already at iteration {}, past --iterations {}",
                    path.display(),
                    s.iteration,
                    args.iterations
                )));
            }
            s
        }
        None => ShimState::new(Controls::nominal(&lattice, NUM_LINES), ShimParams::default()),
    };
    let config = ShimRunConfig {
        iterations: args.iterations,
        samples_per_iter: args.samples,
        seed: args.seed,
    };
    let checkpoint = out.join("shim_state.json");
    let every = args.checkpoint_every;
    let state = resume_shim(state, &sampler, ring.as_ref(), &config, |s| {
        if every > 0 && s.iteration % every == 0 {
            s.save_json(&checkpoint)?;
        }
        Ok(())
    })?;
    state.save_json(&checkpoint)?;

    let before = evaluate(&sampler, &state.initial, args)?;
    let after = evaluate(&sampler, &state.controls, args)?;
    write_outputs(out, &state, &orbits, &before, &after)?;
    Ok(format!(
        "{} iterations on {} qubits: max |<m_i>| {:.4} -> {:.4}, orbit spread {:.4} -> {:.4}",
        state.iteration,
        lattice.num_sites(),
        max_abs(&before.0),
        max_abs(&after.0),
        orbit_spread(&before.1, &orbits),
        orbit_spread(&after.1, &orbits)
    ))
}
