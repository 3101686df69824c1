use std::f64::consts::PI;

use num_complex::Complex64;

use super::AnalysisError;
use crate::lattice::{assign_sublattices, Lattice, LogicalLattice, Scheme};
use crate::quench::SampleSet;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderParamResult {
    pub scheme: Scheme,
    /// Complex order parameter per read (real for AFM).
    pub values: Vec<Complex64>,
    pub magnitudes: Vec<f64>,
    pub mean: f64,
}

/// Combines sublattice magnetizations `m_1..m_k` (index order = label order):
///
/// * AFM: `(m_1 − m_2) / 2`
/// * Tri: `(m_1 + ω m_2 + ω² m_3) / √3`, `ω = e^{2πi/3}`
/// * Vil: `½ Σ_k e^{i(2k−1)π/8} m_k`
pub fn combine(scheme: Scheme, m: &[f64]) -> Complex64 {
    assert_eq!(m.len(), scheme.num_labels());
    match scheme {
        Scheme::Afm => Complex64::new(0.5 * (m[0] - m[1]), 0.0),
        Scheme::Tri => {
            let sum: Complex64 = m
                .iter()
                .enumerate()
                .map(|(k, &mk)| Complex64::from_polar(mk, 2.0 * PI * k as f64 / 3.0))
                .sum();
            sum / 3f64.sqrt()
        }
        Scheme::Vil => {
            let sum: Complex64 = m
                .iter()
                .enumerate()
                .map(|(k, &mk)| Complex64::from_polar(mk, (2 * k + 1) as f64 * PI / 8.0))
                .sum();
            sum * 0.5
        }
    }
}

/// Order parameter of every read. Tri uses the logical (contracted) spins.
pub fn order_parameter(
    samples: &SampleSet,
    lattice: &Lattice,
    scheme: Scheme,
) -> Result<OrderParamResult, AnalysisError> {
    if samples.is_empty() {
        return Err(AnalysisError::Empty);
    }
    if samples.num_sites() != lattice.num_sites() {
        return Err(AnalysisError::Mismatch(format!(
            "reads have {} sites, lattice has {}",
            samples.num_sites(),
            lattice.num_sites()
        )));
    }
    let map = assign_sublattices(lattice, scheme)?;
    let logical = match scheme {
        Scheme::Tri => Some(LogicalLattice::from_lattice(lattice)?),
        _ => None,
    };
    let values: Vec<Complex64> = samples
        .reads()
        .map(|read| {
            let m = match &logical {
                Some(g) => map.magnetizations(&g.spins(read)),
                None => map.magnetizations(read),
            };
            combine(scheme, &m)
        })
        .collect();
    let magnitudes: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let mean = magnitudes.iter().sum::<f64>() / magnitudes.len() as f64;
    Ok(OrderParamResult {
        scheme,
        values,
        magnitudes,
        mean,
    })
}
