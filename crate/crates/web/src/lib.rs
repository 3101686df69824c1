//! wasm-bindgen bindings for the static demo page in `www/`.

use frustsim::analysis::{count_defects, kzm_exponents, order_parameter, pseudospin_field};
use frustsim::clockmc::{sweep, ClockConfig, HoneycombLattice};
use frustsim::lattice::{build_cylinder, LogicalLattice, ModelKind, Scheme};
use frustsim::quench::{quench, QuenchParams};
use frustsim::schedule::default_schedule;
use wasm_bindgen::prelude::*;

/// Largest lattice the page will anneal; bigger states stall the tab.
pub const MAX_DEMO_QUBITS: usize = 18;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct QuenchResult {
    order: f64,
    defect_density: f64,
    vortices: u32,
    antivortices: u32,
    spins: Vec<i8>,
    xy: Vec<f64>,
}

#[wasm_bindgen]
impl QuenchResult {
    /// Mean three-sublattice order parameter over all reads.
    #[wasm_bindgen(getter)]
    pub fn order(&self) -> f64 {
        self.order
    }

    /// Mean vortex plus antivortex density over all reads.
    #[wasm_bindgen(getter, js_name = defectDensity)]
    pub fn defect_density(&self) -> f64 {
        self.defect_density
    }

    #[wasm_bindgen(getter)]
    pub fn vortices(&self) -> u32 {
        self.vortices
    }

    #[wasm_bindgen(getter)]
    pub fn antivortices(&self) -> u32 {
        self.antivortices
    }

    /// Logical spins of the first read.
    #[wasm_bindgen(getter)]
    pub fn spins(&self) -> Vec<i8> {
        self.spins.clone()
    }

    /// Interleaved `x, y` drawing positions of the logical spins.
    #[wasm_bindgen(getter)]
    pub fn positions(&self) -> Vec<f64> {
        self.xy.clone()
    }
}

/// Anneals the triangular model on an `lx × ly` cylinder and summarizes
/// `reads` reads. Defect counts refer to the first read.
#[wasm_bindgen(js_name = quenchTriangular)]
pub fn quench_triangular(lx: usize, ly: usize, t_a: f64, reads: usize, seed: u64) -> Result<QuenchResult, JsError> {
    if lx * ly > MAX_DEMO_QUBITS {
        return Err(JsError::new(&format!(
            "{lx} x {ly} needs {} qubits; the demo stops at {MAX_DEMO_QUBITS}",
            lx * ly
        )));
    }
    let (j1, j2) = ModelKind::Triangular.couplers();
    let lattice = build_cylinder(lx, ly, j1, j2).map_err(js_err)?;
    let logical = LogicalLattice::from_lattice(&lattice).map_err(js_err)?;
    let set = quench(&lattice, &default_schedule(), &QuenchParams::new(t_a, seed, reads)).map_err(js_err)?;
    let order = order_parameter(&set, &lattice, Scheme::Tri).map_err(js_err)?.mean;

    let mut density = 0.0;
    let mut first = None;
    for r in set.reads() {
        let c = count_defects(&pseudospin_field(r, &logical).map_err(js_err)?, &logical).map_err(js_err)?;
        density += c.density();
        first.get_or_insert(c);
    }
    let first = first.expect("at least one read");
    let xy = (0..logical.num_sites())
        .flat_map(|i| {
            let (x, y) = logical.position(i);
            // shear the square embedding into a triangular one
            [x + 0.5 * y, y * 3f64.sqrt() / 2.0]
        })
        .collect();
    Ok(QuenchResult {
        order,
        defect_density: density / set.len() as f64,
        vortices: first.n_vortex as u32,
        antivortices: first.n_antivortex as u32,
        spins: logical.spins(set.read(0)),
        xy,
    })
}

/// Six-state clock model coarsening on an `l × l` honeycomb grid.
#[wasm_bindgen]
pub struct ClockDemo {
    lattice: HoneycombLattice,
    config: ClockConfig,
}

#[wasm_bindgen]
impl ClockDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(l: usize, seed: u64) -> Result<ClockDemo, JsError> {
        let lattice = HoneycombLattice::new(l).map_err(js_err)?;
        let config = ClockConfig::random(&lattice, seed, 0);
        Ok(ClockDemo { lattice, config })
    }

    pub fn advance(&mut self, steps: u32) {
        for _ in 0..steps {
            sweep(&mut self.config, &self.lattice);
        }
    }

    /// Clock states `0..6`, row-major in grid coordinates.
    pub fn states(&self) -> Vec<u8> {
        self.config.states().to_vec()
    }

    #[wasm_bindgen(getter)]
    pub fn step(&self) -> f64 {
        self.config.step() as f64
    }

    #[wasm_bindgen(getter)]
    pub fn magnetization(&self) -> f64 {
        self.config.magnetization()
    }

    #[wasm_bindgen(getter)]
    pub fn side(&self) -> usize {
        self.lattice.l()
    }
}

/// Kibble-Zurek exponents `[order parameter, defects, correlation length]`.
#[wasm_bindgen(js_name = kzmExponents)]
pub fn kzm(nu: f64, beta: f64, z: f64, d: f64) -> Vec<f64> {
    let p = kzm_exponents(nu, beta, z, d);
    vec![p.order_parameter, p.defects, p.correlation_length]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quench_summary_is_consistent() {
        let r = quench_triangular(3, 6, 1.0, 200, 3).unwrap();
        assert_eq!(r.spins.len(), 9);
        assert_eq!(r.xy.len(), 18);
        assert!(r.order > 0.0 && r.order <= 1.0);
        assert!(r.defect_density >= 0.0);
        assert!(r.spins.iter().all(|&s| s == 1 || s == -1));
    }

    #[test]
    fn clock_demo_advances() {
        let mut d = ClockDemo::new(16, 1).unwrap();
        d.advance(5);
        assert_eq!(d.step(), 5.0);
        assert_eq!(d.states().len(), 256);
        assert!(d.states().iter().all(|&q| q < 6));
        assert!((0.0..=1.0).contains(&d.magnetization()));
    }

    #[test]
    fn kzm_matches_xy_reference() {
        let v = kzm(0.6717, 0.3486, 1.0, 2.0);
        assert!((v[0] - 0.1933).abs() < 5e-5);
        assert!((v[1] + 0.8036).abs() < 5e-5);
        assert!((v[2] - 0.4018).abs() < 5e-5);
    }
}
