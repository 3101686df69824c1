use num_complex::Complex64;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

/// Planned 2D transforms for one row-major `nx × ny` shape (`x * ny + y`).
pub(crate) struct Fft2 {
    nx: usize,
    ny: usize,
    fwd: [Arc<dyn Fft<f64>>; 2],
    inv: [Arc<dyn Fft<f64>>; 2],
}

impl Fft2 {
    pub(crate) fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            nx,
            ny,
            fwd: [planner.plan_fft_forward(ny), planner.plan_fft_forward(nx)],
            inv: [planner.plan_fft_inverse(ny), planner.plan_fft_inverse(nx)],
        }
    }

    /// `X[k] = Σ x[r] e^{−2πi k·r / n}`.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, &self.fwd);
    }

    /// Unnormalized inverse of [`Fft2::forward`].
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, &self.inv);
    }

    fn apply(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 2]) {
        let (nx, ny) = (self.nx, self.ny);
        assert_eq!(data.len(), nx * ny);
        plans[0].process(data);
        let mut buf = vec![Complex64::new(0.0, 0.0); nx];
        for y in 0..ny {
            for x in 0..nx {
                buf[x] = data[x * ny + y];
            }
            plans[1].process(&mut buf);
            for x in 0..nx {
                data[x * ny + y] = buf[x];
            }
        }
    }
}

pub(crate) fn fft2(data: &mut [Complex64], nx: usize, ny: usize) {
    Fft2::new(nx, ny).forward(data);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_direct_dft() {
        let (nx, ny) = (3, 4);
        let input: Vec<Complex64> = (0..12).map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let mut out = input.clone();
        fft2(&mut out, nx, ny);
        for kx in 0..nx {
            for ky in 0..ny {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..nx {
                    for y in 0..ny {
                        let ph = -2.0 * PI * ((kx * x) as f64 / nx as f64 + (ky * y) as f64 / ny as f64);
                        acc += input[x * ny + y] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((acc - out[kx * ny + ky]).norm() < 1e-10);
            }
        }
        Fft2::new(nx, ny).inverse(&mut out);
        for (a, b) in out.iter().zip(&input) {
            assert!((a / 12.0 - b).norm() < 1e-12);
        }
    }
}
