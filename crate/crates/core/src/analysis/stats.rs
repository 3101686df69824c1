use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::AnalysisError;
use crate::rng;

pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// A confidence interval; an open side means the search never crossed the
/// threshold and the bound is only the edge of the scanned range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Linear-interpolated percentile of sorted data, `p ∈ [0, 100]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = (p / 100.0) * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    let t = pos - i as f64;
    sorted[i] + t * (sorted[j] - sorted[i])
}

/// Sample mean and percentile 95% bootstrap interval of the mean.
pub fn bootstrap_mean_ci(values: &[f64], resamples: usize, seed: u64) -> (f64, Interval) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut r = rng::stream(seed, 0);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[r.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let ci = Interval::closed(
        percentile(&means, 2.5).min(mean),
        percentile(&means, 97.5).max(mean),
    );
    (mean, ci)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub bootstrap_mean: f64,
    pub ci: Interval,
    /// Smallest and largest abscissa used.
    pub window: (f64, f64),
    pub resamples: usize,
}

/// Ordinary least squares `(slope, intercept)`; `None` if all `x` coincide.
fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// `y = A x^k` by least squares on `(ln x, ln y)`, with a bootstrap over
/// points: `resamples` draws with replacement (draws whose abscissae all
/// coincide are redrawn), reporting their mean and 2.5/97.5 percentiles.
pub fn fit_power_law(points: &[(f64, f64)], resamples: usize, seed: u64) -> Result<PowerLawFit, AnalysisError> {
    if points.len() < 3 {
        return Err(AnalysisError::TooFewPoints {
            need: 3,
            got: points.len(),
        });
    }
    for (index, &(x, y)) in points.iter().enumerate() {
        for value in [x, y] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(AnalysisError::NonPositive { index, value });
            }
        }
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (exponent, intercept) = ols(&lx, &ly).ok_or_else(|| AnalysisError::Fit("all abscissae coincide".into()))?;
    let n = points.len();
    let mut r = rng::stream(seed, 0);
    let mut slopes = Vec::with_capacity(resamples);
    let (mut bx, mut by) = (vec![0.0; n], vec![0.0; n]);
    while slopes.len() < resamples {
        for k in 0..n {
            let i = r.gen_range(0..n);
            bx[k] = lx[i];
            by[k] = ly[i];
        }
        if let Some((s, _)) = ols(&bx, &by) {
            slopes.push(s);
        }
    }
    let (bootstrap_mean, ci) = if slopes.is_empty() {
        (exponent, Interval::closed(exponent, exponent))
    } else {
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        slopes.sort_by(f64::total_cmp);
        let ci = Interval::closed(
            percentile(&slopes, 2.5).min(exponent),
            percentile(&slopes, 97.5).max(exponent),
        );
        (mean, ci)
    };
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.0), b.max(p.0)));
    Ok(PowerLawFit {
        exponent,
        prefactor: intercept.exp(),
        bootstrap_mean,
        ci,
        window: (lo, hi),
        resamples,
    })
}

/// `F = (χ²_f / χ²_0 − 1) (N − P) / P_fix`.
pub fn f_statistic(chi2_fixed: f64, chi2_null: f64, n_points: usize, n_params: usize, p_fix: usize) -> f64 {
    (chi2_fixed / chi2_null - 1.0) * (n_points - n_params) as f64 / p_fix as f64
}

/// Critical value of `F(p_fix, dof)` at confidence `level`.
pub fn f_critical(p_fix: usize, dof: usize, level: f64) -> f64 {
    FisherSnedecor::new(p_fix as f64, dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(level)
}

/// 95% interval for one parameter from its χ² profile `(value, χ²_fixed)`.
///
/// Walks outward from the profile minimum on each side until `F` exceeds
/// the critical value of `F(1, N − P)` and interpolates the crossing.
pub fn f_test_interval(
    chi2_null: f64,
    n_points: usize,
    n_params: usize,
    profile: &[(f64, f64)],
) -> Result<Interval, AnalysisError> {
    if !(chi2_null > 0.0) {
        return Err(AnalysisError::Fit("null χ² must be positive".into()));
    }
    if n_points <= n_params {
        return Err(AnalysisError::TooFewPoints {
            need: n_params + 1,
            got: n_points,
        });
    }
    if profile.is_empty() {
        return Err(AnalysisError::TooFewPoints { need: 1, got: 0 });
    }
    let mut prof = profile.to_vec();
    prof.sort_by(|a, b| a.0.total_cmp(&b.0));
    let crit = f_critical(1, n_points - n_params, 0.95);
    let f: Vec<f64> = prof
        .iter()
        .map(|p| f_statistic(p.1, chi2_null, n_points, n_params, 1))
        .collect();
    let best = (0..prof.len())
        .min_by(|&a, &b| prof[a].1.total_cmp(&prof[b].1))
        .expect("nonempty");
    let crossing = |i: usize, j: usize| -> f64 {
        // F rises from f[i] ≤ crit to f[j] > crit
        let t = (crit - f[i]) / (f[j] - f[i]);
        prof[i].0 + t * (prof[j].0 - prof[i].0)
    };
    let (mut lo, mut lo_open) = (prof[0].0, true);
    for i in (0..best).rev() {
        if f[i] > crit {
            lo = crossing(i + 1, i);
            lo_open = false;
            break;
        }
    }
    let (mut hi, mut hi_open) = (prof[prof.len() - 1].0, true);
    for j in best + 1..prof.len() {
        if f[j] > crit {
            hi = crossing(j - 1, j);
            hi_open = false;
            break;
        }
    }
    Ok(Interval {
        lo,
        hi,
        lo_open,
        hi_open,
    })
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}
