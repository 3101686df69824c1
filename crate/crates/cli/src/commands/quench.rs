use std::path::{Path, PathBuf};

use clap::Args;
use frustsim::quench::{quench, QuenchParams, DEFAULT_DT, MAX_QUBITS};
use frustsim::rng;
use frustsim::schedule::{default_schedule, load_schedule};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ensure_dir, write_csv, write_file, LatticeArgs, RunConfig, Sweep};
use crate::error::CliError;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct QuenchArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Anneal times as `start:stop:count`, geometrically spaced, or one value.
    #[arg(long, default_value = "1:32:8")]
    pub ta_sweep: Sweep,
    #[arg(long, default_value_t = 1000)]
    pub reads: usize,
    /// Largest integration step.
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    /// `s,gamma,jcal` CSV; the built-in trigonometric schedule if absent.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn sample_file_name(index: usize) -> String {
    format!("samples_{index:03}.txt")
}

pub fn run(args: &QuenchArgs, out: &Path) -> Result<String, CliError> {
    let schedule = match &args.schedule {
        Some(p) => load_schedule(p)?,
        None => default_schedule(),
    };
    let lattice = args.lattice.build()?;
    if lattice.num_sites() > MAX_QUBITS {
        return Err(CliError::Config(format!(
            "a {}x{} lattice has {} qubits, above the state-vector limit of {MAX_QUBITS}; \
             use `frustsim coarsen` to study coarsening on large lattices",
            args.lattice.lx,
            args.lattice.ly,
            lattice.num_sites()
        )));
    }
    if args.reads == 0 {
        return Err(CliError::Config("--reads must be at least 1".into()));
    }
    ensure_dir(out)?;
    let hash = RunConfig::Quench(args).write(out)?;
    let t_as = args.ta_sweep.values();
    let sets: Vec<_> = t_as
        .par_iter()
        .enumerate()
        .map(|(i, &t_a)| {
            let params = QuenchParams {
                t_a,
                dt: args.dt,
                seed: rng::derive(args.seed, i as u64),
                reads: args.reads,
            };
            quench(&lattice, &schedule, &params)
        })
        .collect::<Result<_, _>>()?;
    for (i, mut set) in sets.into_iter().enumerate() {
        let mut meta = set.meta().clone();
        meta.config_hash = Some(hash.clone());
        set.set_meta(meta);
        let path = out.join(sample_file_name(i));
        let mut buf = Vec::new();
        set.write(&mut buf)?;
        write_file(&path, &buf)?;
    }
    write_csv(&out.join("quench_index.csv"), |w| {
        w.write_record(["file", "t_a", "seed", "reads"])?;
        for (i, t_a) in t_as.iter().enumerate() {
            w.write_record(&[
                sample_file_name(i),
                t_a.to_string(),
                rng::derive(args.seed, i as u64).to_string(),
                args.reads.to_string(),
            ])?;
        }
        Ok(())
    })?;
    Ok(format!(
        "wrote {} sample files ({} reads each) to {}",
        t_as.len(),
        args.reads,
        out.display()
    ))
}
