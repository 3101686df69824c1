use std::io::Write;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{sweep, ClockConfig, ClockError, Correlator, HoneycombLattice};
use crate::analysis::{bootstrap_mean_ci, fit_exponential, fit_power_law, percentile, AnalysisError, Interval, PowerLawFit};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseningParams {
    pub l: usize,
    pub replicas: usize,
    pub steps: usize,
    pub seed: u64,
    /// Inclusive distance range of the exponential `C(r)` fit.
    pub fit_r: (usize, usize),
    /// Inclusive step range of the power-law fits.
    pub window: (f64, f64),
    pub bootstrap: usize,
}

impl CoarseningParams {
    pub fn new(l: usize, replicas: usize, steps: usize, seed: u64) -> Self {
        CoarseningParams {
            l,
            replicas,
            steps,
            seed,
            fit_r: (5, 20),
            window: (10.0, 300.0),
            bootstrap: crate::analysis::BOOTSTRAP_RESAMPLES,
        }
    }

    pub fn validate(&self) -> Result<(), ClockError> {
        HoneycombLattice::new(self.l)?;
        if self.replicas == 0 {
            return Err(ClockError::Zero("replicas"));
        }
        if self.fit_r.0 >= self.fit_r.1 {
            return Err(ClockError::Param(format!(
                "correlation fit range {}..={} is empty",
                self.fit_r.0, self.fit_r.1
            )));
        }
        if self.fit_r.1 > self.l / 2 {
            return Err(ClockError::Param(format!(
                "correlation fit reaches r = {} but l = {} only resolves r ≤ {}",
                self.fit_r.1,
                self.l,
                self.l / 2
            )));
        }
        if !(self.window.0 > 0.0 && self.window.0 < self.window.1) {
            return Err(ClockError::Param(format!(
                "scaling window {:?} must be positive and increasing",
                self.window
            )));
        }
        Ok(())
    }
}

/// Replica-resolved time series of one coarsening run. Index 0 is the
/// random initial configuration, index `t` the state after `t` sweeps.
#[derive(Debug, Clone)]
pub struct CoarseningRun {
    params: CoarseningParams,
    m: Vec<f64>,
    corr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub step: usize,
    pub m_mean: f64,
    pub m_ci: Interval,
    /// NaN where the correlation function is too short-ranged to fit.
    pub xi: f64,
    pub xi_ci: Interval,
}

fn run_replica(params: &CoarseningParams, lattice: &HoneycombLattice, replica: usize) -> (Vec<f64>, Vec<f64>) {
    let nr = params.fit_r.1 + 1;
    let mut config = ClockConfig::random(lattice, params.seed, replica as u64);
    let mut corr = Correlator::new(lattice, params.fit_r.1);
    let mut m = Vec::with_capacity(params.steps + 1);
    let mut c = vec![0.0; (params.steps + 1) * nr];
    for t in 0..=params.steps {
        if t > 0 {
            sweep(&mut config, lattice);
        }
        m.push(config.magnetization());
        corr.compute(&config, &mut c[t * nr..(t + 1) * nr]);
    }
    (m, c)
}

/// Runs `replicas` independent chains from random starts, replica `k`
/// drawing from `rng::stream(seed, k)`.
pub fn run_coarsening(params: &CoarseningParams) -> Result<CoarseningRun, ClockError> {
    params.validate()?;
    let lattice = HoneycombLattice::new(params.l)?;
    #[cfg(feature = "parallel")]
    let per: Vec<(Vec<f64>, Vec<f64>)> = {
        use rayon::prelude::*;
        (0..params.replicas)
            .into_par_iter()
            .map(|k| run_replica(params, &lattice, k))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per: Vec<(Vec<f64>, Vec<f64>)> = (0..params.replicas)
        .map(|k| run_replica(params, &lattice, k))
        .collect();
    let mut m = Vec::with_capacity(params.replicas * (params.steps + 1));
    let mut corr = Vec::new();
    for (mk, ck) in per {
        m.extend(mk);
        corr.extend(ck);
    }
    Ok(CoarseningRun {
        params: params.clone(),
        m,
        corr,
    })
}

impl CoarseningRun {
    pub fn params(&self) -> &CoarseningParams {
        &self.params
    }

    fn nt(&self) -> usize {
        self.params.steps + 1
    }

    fn nr(&self) -> usize {
        self.params.fit_r.1 + 1
    }

    /// `|m|` of one replica at every step.
    pub fn replica_m(&self, replica: usize) -> &[f64] {
        &self.m[replica * self.nt()..(replica + 1) * self.nt()]
    }

    /// `C(0..=r_max)` of one replica at one step.
    pub fn replica_correlation(&self, replica: usize, step: usize) -> &[f64] {
        let off = (replica * self.nt() + step) * self.nr();
        &self.corr[off..off + self.nr()]
    }

    /// Replica-averaged `C(r)` at `step` over the replicas in `which`.
    fn mean_correlation(&self, step: usize, which: impl Iterator<Item = usize>) -> Vec<f64> {
        let mut acc = vec![0.0; self.nr()];
        let mut n = 0;
        for k in which {
            for (a, c) in acc.iter_mut().zip(self.replica_correlation(k, step)) {
                *a += c;
            }
            n += 1;
        }
        acc.iter().map(|a| a / n as f64).collect()
    }

    fn fit_xi(&self, c: &[f64]) -> f64 {
        let pts: Vec<(f64, f64)> = (self.params.fit_r.0..=self.params.fit_r.1)
            .map(|r| (r as f64, c[r]))
            .collect();
        // mostly non-positive data means no measurable decay yet
        if pts.iter().filter(|p| p.1 > 0.0).count() < pts.len() / 2 + 1 {
            return f64::NAN;
        }
        match fit_exponential(&pts) {
            // a fit pinned near its upper bound means C(r) is flat noise
            Ok((_, xi)) if xi < 1e5 => xi,
            _ => f64::NAN,
        }
    }

    pub fn mean_m(&self, step: usize) -> f64 {
        (0..self.params.replicas).map(|k| self.replica_m(k)[step]).sum::<f64>() / self.params.replicas as f64
    }

    /// Correlation length from the replica-averaged `C(r)` at `step`.
    pub fn xi(&self, step: usize) -> f64 {
        self.fit_xi(&self.mean_correlation(step, 0..self.params.replicas))
    }

    /// Per-step means with bootstrap 95% intervals over replicas.
    pub fn summary(&self) -> Vec<StepSummary> {
        let reps = self.params.replicas;
        let b = self.params.bootstrap;
        (0..self.nt())
            .map(|t| {
                let ms: Vec<f64> = (0..reps).map(|k| self.replica_m(k)[t]).collect();
                let (m_mean, m_ci) = bootstrap_mean_ci(&ms, b, rng::derive(self.params.seed, 2 * t as u64));
                let xi = self.xi(t);
                let xi_ci = if xi.is_finite() && reps > 1 {
                    let mut r = rng::stream(rng::derive(self.params.seed, 2 * t as u64 + 1), 0);
                    let mut draws: Vec<f64> = (0..b)
                        .map(|_| {
                            let pick: Vec<usize> = (0..reps).map(|_| r.gen_range(0..reps)).collect();
                            self.fit_xi(&self.mean_correlation(t, pick.into_iter()))
                        })
                        .filter(|v| v.is_finite())
                        .collect();
                    draws.sort_by(f64::total_cmp);
                    if draws.is_empty() {
                        Interval::closed(f64::NAN, f64::NAN)
                    } else {
                        Interval::closed(percentile(&draws, 2.5).min(xi), percentile(&draws, 97.5).max(xi))
                    }
                } else {
                    Interval::closed(xi, xi)
                };
                StepSummary {
                    step: t,
                    m_mean,
                    m_ci,
                    xi,
                    xi_ci,
                }
            })
            .collect()
    }

    fn window_points(&self, value: impl Fn(usize) -> f64) -> Vec<(f64, f64)> {
        let (lo, hi) = self.params.window;
        (1..self.nt())
            .filter(|&t| t as f64 >= lo && t as f64 <= hi)
            .map(|t| (t as f64, value(t)))
            .filter(|p| p.1.is_finite())
            .collect()
    }

    /// Power law `⟨m⟩ ∝ t^k` over the scaling window.
    pub fn m_exponent(&self) -> Result<PowerLawFit, AnalysisError> {
        let pts = self.window_points(|t| self.mean_m(t));
        fit_power_law(&pts, self.params.bootstrap, rng::derive(self.params.seed, u64::MAX))
    }

    /// Power law `ξ ∝ t^k` over the scaling window.
    pub fn xi_exponent(&self) -> Result<PowerLawFit, AnalysisError> {
        let pts = self.window_points(|t| self.xi(t));
        fit_power_law(&pts, self.params.bootstrap, rng::derive(self.params.seed, u64::MAX - 1))
    }
}

/// `step,m_mean,m_ci_lo,m_ci_hi,xi,xi_ci_lo,xi_ci_hi`.
pub fn write_summary_csv<W: Write>(rows: &[StepSummary], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["step", "m_mean", "m_ci_lo", "m_ci_hi", "xi", "xi_ci_lo", "xi_ci_hi"])?;
    for s in rows {
        out.write_record(&[
            s.step.to_string(),
            s.m_mean.to_string(),
            s.m_ci.lo.to_string(),
            s.m_ci.hi.to_string(),
            s.xi.to_string(),
            s.xi_ci.lo.to_string(),
            s.xi_ci.hi.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
