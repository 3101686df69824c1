//! Kibble–Zurek reference exponents for anneal-time scaling.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KzmConstants {
    pub nu: f64,
    pub beta: f64,
    pub z: f64,
    pub d: f64,
}

/// 3D XY universality in two spatial dimensions plus time.
pub const XY3D: KzmConstants = KzmConstants {
    nu: 0.6717,
    beta: 0.3486,
    z: 1.0,
    d: 2.0,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KzmPrediction {
    pub constants: KzmConstants,
    /// Order parameter `∝ t_a^{(1 − β/ν)/(z + 1/ν)}`.
    pub order_parameter: f64,
    /// Defect density `∝ t_a^{−dν/(1 + zν)}`.
    pub defects: f64,
    /// Correlation length `∝ t_a^{ν/(1 + zν)}`.
    pub correlation_length: f64,
}

pub fn kzm_exponents(nu: f64, beta: f64, z: f64, d: f64) -> KzmPrediction {
    KzmPrediction {
        constants: KzmConstants { nu, beta, z, d },
        order_parameter: (1.0 - beta / nu) / (z + 1.0 / nu),
        defects: -d * nu / (1.0 + z * nu),
        correlation_length: nu / (1.0 + z * nu),
    }
}

impl KzmConstants {
    pub fn predict(self) -> KzmPrediction {
        kzm_exponents(self.nu, self.beta, self.z, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn xy_values() {
        let p = XY3D.predict();
        assert_abs_diff_eq!(p.order_parameter, 0.19, epsilon = 0.005);
        assert_abs_diff_eq!(p.defects, -0.80, epsilon = 0.01);
        assert_abs_diff_eq!(p.correlation_length, 0.40, epsilon = 0.005);
    }

    #[test]
    fn ising_chain_defects() {
        assert_abs_diff_eq!(kzm_exponents(1.0, 0.125, 1.0, 1.0).defects, -0.5);
    }

    #[test]
    fn large_nu_limit() {
        for z in [1.0, 2.0] {
            assert_abs_diff_eq!(kzm_exponents(1e9, 0.3, z, 2.0).correlation_length, 1.0 / z, epsilon = 1e-8);
        }
    }
}
