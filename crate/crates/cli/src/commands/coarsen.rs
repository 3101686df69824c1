use std::path::Path;

use clap::Args;
use frustsim::analysis::{PowerLawFit, BOOTSTRAP_RESAMPLES};
use frustsim::clockmc::{run_coarsening, write_summary_csv, CoarseningParams, StepSummary};
use serde::{Deserialize, Serialize};

use crate::config::{ensure_dir, write_csv, write_file, Range, RunConfig};
use crate::error::CliError;
use crate::plot::{Plot, Series, Style};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CoarsenArgs {
    /// Side of the periodic honeycomb grid.
    #[arg(long, default_value_t = 120)]
    pub l: usize,
    #[arg(long, default_value_t = 100)]
    pub replicas: usize,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Time window of the power-law fits.
    #[arg(long, default_value = "10:300")]
    pub window: Range,
    /// Distances of the exponential fit to C(r).
    #[arg(long, default_value = "5:20")]
    pub fit_r: Range,
    #[arg(long, default_value_t = BOOTSTRAP_RESAMPLES)]
    pub bootstrap: usize,
}

impl CoarsenArgs {
    fn params(&self) -> Result<CoarseningParams, CliError> {
        let (a, b) = (self.fit_r.lo, self.fit_r.hi);
        if a < 0.0 || a.fract() != 0.0 || b.fract() != 0.0 {
            return Err(CliError::Config(format!("--fit-r needs whole distances, got {}", self.fit_r)));
        }
        let mut p = CoarseningParams::new(self.l, self.replicas, self.steps, self.seed);
        p.window = (self.window.lo, self.window.hi);
        p.fit_r = (a as usize, b as usize);
        p.bootstrap = self.bootstrap;
        p.validate()?;
        Ok(p)
    }
}

fn fit_row(name: &str, fit: &PowerLawFit) -> Vec<String> {
    vec![
        name.to_string(),
        fit.exponent.to_string(),
        fit.prefactor.to_string(),
        fit.ci.lo.to_string(),
        fit.ci.hi.to_string(),
        fit.window.0.to_string(),
        fit.window.1.to_string(),
    ]
}

fn plot(rows: &[StepSummary], fits: &[(&str, Option<PowerLawFit>)]) -> String {
    let mut series = vec![
        Series::new("<|m|>", rows.iter().map(|r| (r.step as f64, r.m_mean)).collect(), Style::Line),
        Series::new("xi", rows.iter().map(|r| (r.step as f64, r.xi)).collect(), Style::Line),
    ];
    for (name, fit) in fits {
        if let Some(f) = fit {
            let line = [f.window.0, f.window.1]
                .iter()
                .map(|&t| (t, f.prefactor * t.powf(f.exponent)))
                .collect();
            series.push(Series::new(format!("{name} ~ t^{:.3}", f.exponent), line, Style::Dashed));
        }
    }
    Plot {
        title: "Clock-model coarsening".into(),
        x_label: "MC step".into(),
        y_label: "<|m|>, xi".into(),
        log_x: true,
        log_y: true,
        series,
    }
    .to_svg()
}

pub fn run(args: &CoarsenArgs, out: &Path) -> Result<String, CliError> {
    let params = args.params()?;
    ensure_dir(out)?;
    RunConfig::Coarsen(args).write(out)?;
    let run = run_coarsening(&params)?;
    let summary = run.summary();
    // step 0 is the random start; the series begins after the first sweep
    let rows = &summary[1..];
    let path = out.join("coarsening.csv");
    let mut buf = Vec::new();
    write_summary_csv(rows, &mut buf).map_err(|e| CliError::io(&path, e))?;
    write_file(&path, &buf)?;

    let mut notes = Vec::new();
    let mut fits = Vec::new();
    for (name, fit) in [("m", run.m_exponent()), ("xi", run.xi_exponent())] {
        match fit {
            Ok(f) => fits.push((name, Some(f))),
            Err(e) => {
                notes.push(format!("no {name} exponent: {e}"));
                fits.push((name, None));
            }
        }
    }
    write_csv(&out.join("exponents.csv"), |w| {
        w.write_record(["quantity", "exponent", "prefactor", "ci_lo", "ci_hi", "window_lo", "window_hi"])?;
        for (name, fit) in &fits {
            if let Some(f) = fit {
                w.write_record(fit_row(name, f))?;
            }
        }
        Ok(())
    })?;
    write_file(&out.join("coarsening.svg"), plot(rows, &fits).as_bytes())?;
    let mut msg = format!("{} steps x {} replicas on l = {}", args.steps, args.replicas, args.l);
    for (name, fit) in &fits {
        if let Some(f) = fit {
            msg.push_str(&format!("; {name} ~ t^{:.3} [{:.3}, {:.3}]", f.exponent, f.ci.lo, f.ci.hi));
        }
    }
    for n in notes {
        msg.push_str(&format!("\nwarning: {n}"));
    }
    Ok(msg)
}
