//! Bounded Levenberg–Marquardt least squares and the model fits built on it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::stats::{f_test_interval, Interval};
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq)]
pub struct LmOptions {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Parameters held at their starting value.
    pub fixed: Vec<bool>,
    pub max_iter: usize,
    /// Relative χ² change below which the fit counts as converged.
    pub tol: f64,
}

impl LmOptions {
    pub fn unbounded(n: usize) -> Self {
        LmOptions {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
            fixed: vec![false; n],
            max_iter: 500,
            tol: 1e-12,
        }
    }

    pub fn bounded(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let n = lower.len();
        LmOptions {
            lower,
            upper,
            ..LmOptions::unbounded(n)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmResult {
    pub params: Vec<f64>,
    pub chi2: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual count, for degrees of freedom.
    pub n_points: usize,
}

fn chi2(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn clamp(p: &mut [f64], opts: &LmOptions) {
    for (i, v) in p.iter_mut().enumerate() {
        *v = v.clamp(opts.lower[i], opts.upper[i]);
    }
}

/// Forward-difference Jacobian over the free parameters, stepping inward at
/// an upper bound.
fn jacobian(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    p: &[f64],
    r0: &[f64],
    free: &[usize],
    opts: &LmOptions,
) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(r0.len(), free.len());
    let mut q = p.to_vec();
    for (c, &i) in free.iter().enumerate() {
        let mut h = 1e-7 * p[i].abs().max(1e-4);
        if p[i] + h > opts.upper[i] {
            h = -h;
        }
        q[i] = p[i] + h;
        let r1 = f(&q);
        for k in 0..r0.len() {
            j[(k, c)] = (r1[k] - r0[k]) / h;
        }
        q[i] = p[i];
    }
    j
}

/// Minimizes `Σ r_k(p)²` from `p0` within the box bounds.
pub fn least_squares(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    p0: &[f64],
    opts: &LmOptions,
) -> LmResult {
    let mut p = p0.to_vec();
    clamp(&mut p, opts);
    let free: Vec<usize> = (0..p.len()).filter(|&i| !opts.fixed[i]).collect();
    let mut r = f(&p);
    let mut c = chi2(&r);
    let n_points = r.len();
    let mut lambda = 1e-3;
    let mut converged = free.is_empty();
    let mut iterations = 0;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let j = jacobian(f, &p, &r, &free, opts);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * DVector::from_column_slice(&r);
        if g.amax() < 1e-300 {
            converged = true;
            break;
        }
        let mut improved = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for d in 0..free.len() {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(delta) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = p.clone();
            for (d, &i) in free.iter().enumerate() {
                trial[i] += delta[d];
            }
            clamp(&mut trial, opts);
            let rt = f(&trial);
            let ct = chi2(&rt);
            if ct.is_finite() && ct <= c {
                let rel = (c - ct) / c.max(1e-300);
                let moved = trial
                    .iter()
                    .zip(&p)
                    .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()));
                p = trial;
                r = rt;
                c = ct;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if rel < opts.tol || moved || c < 1e-300 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // no downhill step at any damping: a (bounded) minimum
            converged = true;
        }
    }
    LmResult {
        params: p,
        chi2: c,
        iterations,
        converged,
        n_points,
    }
}

/// Profile confidence interval for parameter `param`: refit with it pinned
/// on a grid around the optimum and find where the F statistic crosses its
/// 95% critical value.
pub fn profile_interval(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    best: &LmResult,
    opts: &LmOptions,
    param: usize,
    half_width: f64,
    steps: usize,
) -> Result<Interval, AnalysisError> {
    let n_params = opts.fixed.iter().filter(|x| !**x).count();
    let center = best.params[param];
    let mut profile = Vec::with_capacity(2 * steps + 1);
    let mut pinned = opts.clone();
    pinned.fixed[param] = true;
    for k in -(steps as isize)..=(steps as isize) {
        let v = center + half_width * k as f64 / steps as f64;
        if v < opts.lower[param] || v > opts.upper[param] {
            continue;
        }
        let mut start = best.params.clone();
        start[param] = v;
        let fit = least_squares(f, &start, &pinned);
        profile.push((v, fit.chi2.max(best.chi2)));
    }
    f_test_interval(best.chi2, best.n_points, n_params, &profile)
}

/// `V(x) = A [η G(x) + (1 − η) L(x)]` with unit-area Gaussian
/// (`σ = Γ / 2√(2 ln 2)`) and Lorentzian of the same FWHM `Γ`.
pub fn pseudo_voigt(x: f64, amplitude: f64, x0: f64, fwhm: f64, eta: f64) -> f64 {
    let sigma = fwhm / (2.0 * (2.0 * 2f64.ln()).sqrt());
    let d = x - x0;
    let g = (-d * d / (2.0 * sigma * sigma)).exp() / ((2.0 * PI).sqrt() * sigma);
    let hw = fwhm / 2.0;
    let l = hw / (PI * (d * d + hw * hw));
    amplitude * (eta * g + (1.0 - eta) * l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakFit {
    pub amplitude: f64,
    pub x0: f64,
    pub fwhm: f64,
    pub eta: f64,
    /// `1 / Γ`.
    pub xi: f64,
    pub chi2: f64,
    /// `η` ended on 0 or 1.
    pub eta_at_bound: bool,
}

/// Crude FWHM from the half-maximum crossings around the maximum.
fn half_max_width(x: &[f64], y: &[f64], imax: usize) -> Option<f64> {
    let half = y[imax] / 2.0;
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = imax;
        for i in range {
            if y[i] <= half {
                let t = (y[prev] - half) / (y[prev] - y[i]);
                return Some(x[prev] + t * (x[i] - x[prev]));
            }
            prev = i;
        }
        None
    };
    let left = cross(&mut (0..imax).rev());
    let right = cross(&mut (imax + 1..x.len()));
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        (Some(l), None) => Some(2.0 * (x[imax] - l)),
        (None, Some(r)) => Some(2.0 * (r - x[imax])),
        (None, None) => None,
    }
}

pub fn fit_pseudo_voigt(points: &[(f64, f64)]) -> Result<PeakFit, AnalysisError> {
    if points.len() < 5 {
        return Err(AnalysisError::TooFewPoints {
            need: 5,
            got: points.len(),
        });
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let (imax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    if !(ymax - ymin > 1e-12 * ymax.abs().max(1e-300)) {
        return Err(AnalysisError::Fit("flat data has no peak".into()));
    }
    if imax == 0 || imax == x.len() - 1 {
        return Err(AnalysisError::Fit("maximum lies on the edge of the slice".into()));
    }
    let span = x[x.len() - 1] - x[0];
    let spacing = span / (x.len() - 1) as f64;
    let gamma0 = half_max_width(&x, &y, imax).unwrap_or(2.0 * spacing).max(spacing / 4.0);
    let eta0 = 0.5;
    let a0 = ymax / pseudo_voigt(0.0, 1.0, 0.0, gamma0, eta0);
    let model = |p: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(&y)
            .map(|(&xi, &yi)| pseudo_voigt(xi, p[0], p[1], p[2], p[3]) - yi)
            .collect()
    };
    let opts = LmOptions::bounded(
        vec![0.0, x[0], spacing * 1e-3, 0.0],
        vec![f64::INFINITY, x[x.len() - 1], span * 10.0, 1.0],
    );
    // from both line shapes, keep the better optimum
    let fits = [eta0, 0.05, 0.95].map(|eta| least_squares(&model, &[a0, x[imax], gamma0, eta], &opts));
    let best = fits
        .iter()
        .min_by(|a, b| a.chi2.total_cmp(&b.chi2))
        .expect("three fits");
    if !best.converged {
        return Err(AnalysisError::Fit(format!(
            "no convergence after {} iterations",
            best.iterations
        )));
    }
    let p = &best.params;
    Ok(PeakFit {
        amplitude: p[0],
        x0: p[1],
        fwhm: p[2],
        eta: p[3],
        xi: 1.0 / p[2],
        chi2: best.chi2,
        eta_at_bound: p[3] <= 0.0 || p[3] >= 1.0,
    })
}

pub fn exponential_decay(r: f64, amplitude: f64, xi: f64) -> f64 {
    amplitude * (-r / xi).exp()
}

/// Fits `C(r) = A e^{−r/ξ}`; returns `(A, ξ)`. Starts from a log-linear fit
/// over the positive values, then refines on the linear scale.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<(f64, f64), AnalysisError> {
    let pos: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1 > 0.0).collect();
    if pos.len() < 2 {
        return Err(AnalysisError::TooFewPoints {
            need: 2,
            got: pos.len(),
        });
    }
    let n = pos.len() as f64;
    let mx = pos.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pos.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = pos.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let sxx: f64 = pos.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { -1.0 };
    let xi0 = if slope < 0.0 { -1.0 / slope } else { 1e3 };
    let a0 = (my - slope * mx).exp();
    let model = |p: &[f64]| -> Vec<f64> {
        points
            .iter()
            .map(|&(r, c)| exponential_decay(r, p[0], p[1]) - c)
            .collect()
    };
    let opts = LmOptions::bounded(vec![0.0, 1e-6], vec![f64::INFINITY, 1e6]);
    let fit = least_squares(&model, &[a0, xi0.clamp(1e-3, 1e5)], &opts);
    if !fit.converged || !fit.params[1].is_finite() {
        return Err(AnalysisError::Fit("exponential fit did not converge".into()));
    }
    Ok((fit.params[0], fit.params[1]))
}
