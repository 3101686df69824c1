use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{IsingProblem, QuenchError, StateVector};

pub const MAX_GROUND_QUBITS: usize = 16;

#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: StateVector,
    pub energy: f64,
    pub degenerate: bool,
}

/// Lowest eigenpair of `H(Γ, 𝒥)`.
///
/// With `Γ = 0` the Hamiltonian is diagonal and the minimum is read off
/// directly; several minimal basis states mark the result degenerate. For
/// `Γ ≠ 0` every pair of basis states is connected by negative off-diagonal
/// elements (after a sign gauge on `σz`), so the ground state is unique and
/// is found by restarted Lanczos from the uniform vector, which overlaps it.
pub fn exact_ground_state(
    problem: &IsingProblem,
    gamma: f64,
    jcal: f64,
) -> Result<GroundState, QuenchError> {
    let n = problem.n;
    if n == 0 || n > MAX_GROUND_QUBITS {
        return Err(QuenchError::QubitCount(n));
    }
    let dim = 1usize << n;
    let diag: Vec<f64> = (0..dim).map(|i| jcal * problem.basis_energy(i)).collect();
    if gamma == 0.0 {
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-12 * (1.0 + min.abs());
        let minima: Vec<usize> = (0..dim).filter(|&i| diag[i] - min <= tol).collect();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[minima[0]] = Complex64::new(1.0, 0.0);
        return Ok(GroundState {
            state: StateVector { n, amps },
            energy: min,
            degenerate: minima.len() > 1,
        });
    }
    let apply = |v: &[f64], out: &mut [f64]| {
        for i in 0..dim {
            let mut acc = diag[i] * v[i];
            for q in 0..n {
                acc -= gamma * v[i ^ (1 << q)];
            }
            out[i] = acc;
        }
    };
    let (energy, vec) = lanczos(dim, apply)?;
    let amps = vec.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    Ok(GroundState {
        state: StateVector { n, amps },
        energy,
        degenerate: false,
    })
}

fn lanczos(dim: usize, apply: impl Fn(&[f64], &mut [f64])) -> Result<(f64, Vec<f64>), QuenchError> {
    const KRYLOV: usize = 60;
    const RESTARTS: usize = 50;
    const TOL: f64 = 1e-10;
    let m = KRYLOV.min(dim);
    let mut x = vec![(dim as f64).sqrt().recip(); dim];
    let mut w = vec![0.0; dim];
    let mut residual = f64::INFINITY;
    for _ in 0..RESTARTS {
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            apply(&basis[j], &mut w);
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // full reorthogonalization, twice for stability
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(&w, v);
                    axpy(-c, v, &mut w);
                }
            }
            let b = dot(&w, &w).sqrt();
            if j + 1 == m || b < 1e-12 {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty Krylov space");
        let y = eig.eigenvectors.column(imin);
        x.iter_mut().for_each(|v| *v = 0.0);
        for (c, v) in y.iter().zip(&basis) {
            axpy(*c, v, &mut x);
        }
        let norm = dot(&x, &x).sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        apply(&x, &mut w);
        axpy(-theta, &x, &mut w);
        residual = dot(&w, &w).sqrt();
        if residual < TOL * (1.0 + theta.abs()) {
            // fix the overall sign so the Perron vector is positive
            if x.iter().sum::<f64>() < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            return Ok((theta, x));
        }
    }
    Err(QuenchError::NoConvergence(residual))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cylinder, Lattice};
    use crate::quench::{init_state, spins_of};
    use approx::assert_abs_diff_eq;

    #[test]
    fn pure_transverse_field_gives_uniform_state() {
        let p = IsingProblem::from_lattice(&Lattice::ring(6, -1.0).unwrap());
        let g = exact_ground_state(&p, 1.0, 0.0).unwrap();
        assert!(g.state.fidelity(&init_state(6).unwrap()) > 1.0 - 1e-12);
        assert_abs_diff_eq!(g.energy, -6.0, epsilon = 1e-9);
        assert!(!g.degenerate);
    }

    #[test]
    fn single_afm_bond_is_degenerate() {
        let p = IsingProblem::new(2, vec![(0, 1, 1.0)]);
        let g = exact_ground_state(&p, 0.0, 1.0).unwrap();
        assert!(g.degenerate);
        assert_eq!(g.energy, -1.0);
        let probs = g.state.probabilities();
        assert!(probs[1] + probs[2] > 1.0 - 1e-15);
    }

    #[test]
    fn villain_cylinder_classical_minimum() {
        let l = build_cylinder(2, 4, 0.9, -0.9).unwrap();
        let p = IsingProblem::from_lattice(&l);
        let brute = (0..256)
            .map(|i| p.energy(&spins_of(i, 8)))
            .fold(f64::INFINITY, f64::min);
        let g = exact_ground_state(&p, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(g.energy, brute, epsilon = 1e-12);
    }

    #[test]
    fn lanczos_matches_dense_eigensolve() {
        let l = build_cylinder(2, 4, 0.9, -2.0).unwrap();
        let p = IsingProblem::from_lattice(&l);
        let (gamma, jcal) = (0.4, 0.7);
        let dim = 256;
        let mut h = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            h[(i, i)] = jcal * p.basis_energy(i);
            for q in 0..8 {
                h[(i, i ^ (1 << q))] -= gamma;
            }
        }
        let eig = h.symmetric_eigen();
        let (k, e0) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let g = exact_ground_state(&p, gamma, jcal).unwrap();
        assert_abs_diff_eq!(g.energy, e0, epsilon = 1e-9);
        let v = eig.eigenvectors.column(k);
        let overlap: f64 = (0..dim).map(|i| v[i] * g.state.amplitudes()[i].re).sum();
        assert_abs_diff_eq!(overlap.abs(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn too_many_qubits() {
        let p = IsingProblem::new(17, vec![]);
        assert!(exact_ground_state(&p, 1.0, 0.0).is_err());
    }
}
