//! Physical configuration of the tripod medium and the dark-state preparation.
//!
//! The ground manifold `{|1>, |2>}` is prepared in the dark superposition
//! `cos(theta)|1> - sin(theta)|2>`. Its populations act as absorbers for the
//! probe while the Raman coherence `-cos(theta) sin(theta)` acts as a gain
//! source; the net weights entering the two probe resonances are `f(theta)`
//! (the `|1> -> |4>` line) and `g(theta)` (the `|2> -> |4>` line).

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the mixing-angle interval ends, so that `pi/2` computed
/// from a grid still counts as inside.
const THETA_SLACK: f64 = 1e-12;

/// All physical parameters of the tripod medium, in units of `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Coherence decay rate; the frequency unit. Always `1.0` in practice.
    pub gamma: f64,
    /// Decay of the `|4>-|1>` coherence.
    pub gamma41: f64,
    /// Decay of the `|4>-|2>` coherence.
    pub gamma42: f64,
    /// Density-dipole parameter `N p^2 / (eps0 hbar)`.
    #[serde(rename = "K")]
    pub k: f64,
    /// Ground-state splitting between `|1>` and `|2>`.
    pub omega21: f64,
    /// Control-field Rabi frequency (real, non-negative).
    #[serde(rename = "Omega_C")]
    pub omega_c: f64,
    /// Control-field detuning.
    #[serde(rename = "Delta_C")]
    pub delta_c: f64,
    /// Dark-state mixing angle in radians, within `[0, pi/2]`.
    pub theta: f64,
    /// Probe transition frequency. Only enters group-index calculations.
    pub omega41: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::cold_gas()
    }
}

impl SystemConfig {
    /// Cold atomic gas parameters: `Omega_C = 2`, `omega21 = 5`, `K = 1`,
    /// resonant control, `theta = 0`, `omega41 = 100`.
    pub fn cold_gas() -> Self {
        SystemConfig {
            gamma: 1.0,
            gamma41: 1.0,
            gamma42: 1.0,
            k: 1.0,
            omega21: 5.0,
            omega_c: 2.0,
            delta_c: 0.0,
            theta: 0.0,
            omega41: 100.0,
        }
    }

    /// The denser gas used for the local-field figures (`K = 10`).
    pub fn dense_gas() -> Self {
        SystemConfig {
            k: 10.0,
            ..Self::cold_gas()
        }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        SystemConfig { theta, ..self }
    }

    pub fn with_k(self, k: f64) -> Self {
        SystemConfig { k, ..self }
    }

    pub fn with_omega_c(self, omega_c: f64) -> Self {
        SystemConfig { omega_c, ..self }
    }

    pub fn with_omega41(self, omega41: f64) -> Self {
        SystemConfig { omega41, ..self }
    }

    /// Full invariant check, applied to every configuration read from a file
    /// or received across the C boundary.
    pub fn validate(&self) -> Result<()> {
        self.check_domain()?;
        if self.gamma <= 0.0 {
            return Err(Error::invalid("gamma must be > 0"));
        }
        if self.gamma41 <= 0.0 || self.gamma42 <= 0.0 {
            return Err(Error::invalid("gamma41 and gamma42 must be > 0"));
        }
        if self.omega21 <= 0.0 {
            return Err(Error::invalid("omega21 must be > 0"));
        }
        Ok(())
    }

    /// Weaker check used by the numerical kernels: finite values, a mixing
    /// angle in range and non-negative rates. Zero damping is allowed so the
    /// kernels can report poles and non-convergence themselves.
    pub fn check_domain(&self) -> Result<()> {
        let fields = [
            ("gamma", self.gamma),
            ("gamma41", self.gamma41),
            ("gamma42", self.gamma42),
            ("K", self.k),
            ("omega21", self.omega21),
            ("Omega_C", self.omega_c),
            ("Delta_C", self.delta_c),
            ("theta", self.theta),
            ("omega41", self.omega41),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("{name} is not finite")));
        }
        check_theta(self.theta)?;
        if self.gamma41 < 0.0 || self.gamma42 < 0.0 {
            return Err(Error::invalid("decay rates must be non-negative"));
        }
        if self.omega_c < 0.0 {
            return Err(Error::invalid("Omega_C must be >= 0"));
        }
        if self.k < 0.0 {
            return Err(Error::invalid("K must be >= 0"));
        }
        Ok(())
    }

    /// Detuning of the probe from the `|2> -> |4>` line, `delta1 - omega21`.
    pub fn delta2(&self, delta1: f64) -> f64 {
        delta1 - self.omega21
    }

    pub fn prep(&self) -> DarkStatePrep {
        initial_density(self.theta)
    }
}

/// Rejects mixing angles outside `[0, pi/2]`.
pub fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || !(-THETA_SLACK..=FRAC_PI_2 + THETA_SLACK).contains(&theta) {
        return Err(Error::invalid(format!(
            "theta = {theta} outside [0, pi/2]"
        )));
    }
    Ok(())
}

/// Mixing angle of the dark state formed by two preparation fields.
pub fn mixing_angle_from_rabi(omega1: f64, omega2: f64) -> Result<f64> {
    if !(omega1.is_finite() && omega2.is_finite()) || omega1 < 0.0 || omega2 < 0.0 {
        return Err(Error::invalid(
            "preparation Rabi frequencies must be finite and non-negative",
        ));
    }
    if omega1 == 0.0 && omega2 == 0.0 {
        return Err(Error::DarkStateUndefined);
    }
    Ok(omega2.atan2(omega1))
}

/// Net weight of the `|1> -> |4>` resonance: `cos^2 - cos sin`.
///
/// Evaluated through double angles, `((1 + cos 2t) - sin 2t) / 2`, which
/// rounds to exactly zero at `FRAC_PI_4`.
pub fn f_theta(theta: f64) -> f64 {
    let (s2, c2) = (2.0 * theta).sin_cos();
    ((1.0 + c2) - s2) / 2.0
}

/// Net weight of the `|2> -> |4>` resonance: `sin^2 - cos sin`.
pub fn g_theta(theta: f64) -> f64 {
    let (s2, c2) = (2.0 * theta).sin_cos();
    (1.0 - (s2 + c2)) / 2.0
}

/// Smallest value taken by either weight on `[0, pi/2]`, `(1 - sqrt 2) / 2`.
pub fn weight_minimum() -> f64 {
    (1.0 - std::f64::consts::SQRT_2) / 2.0
}

/// Frozen ground-manifold density matrix of the prepared dark state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarkStatePrep {
    pub theta: f64,
    pub rho11: f64,
    pub rho22: f64,
    /// Raman coherence `rho12 = rho21` (real).
    pub rho12: f64,
}

impl DarkStatePrep {
    /// Source term driving `rho41`: `rho11 + rho21`.
    pub fn source41(&self) -> f64 {
        self.rho11 + self.rho12
    }

    /// Source term driving `rho42`: `rho22 + rho12`.
    pub fn source42(&self) -> f64 {
        self.rho22 + self.rho12
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22
    }

    pub fn determinant(&self) -> f64 {
        self.rho11 * self.rho22 - self.rho12 * self.rho12
    }
}

pub fn initial_density(theta: f64) -> DarkStatePrep {
    let (s, c) = theta.sin_cos();
    DarkStatePrep {
        theta,
        rho11: c * c,
        rho22: s * s,
        rho12: -c * s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

    #[test]
    fn mixing_angle_examples() {
        assert_eq!(mixing_angle_from_rabi(1.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(mixing_angle_from_rabi(1.0, 1.0).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        let t = mixing_angle_from_rabi(1.0, 3f64.sqrt()).unwrap();
        assert_abs_diff_eq!(t, PI / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.cos().powi(2), 0.25, epsilon = 1e-15);
        assert!(matches!(
            mixing_angle_from_rabi(0.0, 0.0),
            Err(Error::DarkStateUndefined)
        ));
        assert!(mixing_angle_from_rabi(-1.0, 1.0).is_err());
    }

    #[test]
    fn weights_at_named_angles() {
        assert_eq!(f_theta(0.0), 1.0);
        assert_eq!(f_theta(FRAC_PI_4), 0.0);
        assert_eq!(g_theta(FRAC_PI_4), 0.0);
        assert_eq!(g_theta(0.0), 0.0);
        assert_abs_diff_eq!(g_theta(FRAC_PI_2), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f_theta(3.0 * FRAC_PI_8), -0.207_106_781_186_547_5, epsilon = 1e-15);
        assert_abs_diff_eq!(g_theta(FRAC_PI_8), -0.207_106_781_186_547_5, epsilon = 1e-15);
    }

    #[test]
    fn weight_minima_by_grid_scan() {
        // brute-force scan at 1e-4 resolution
        let n = (FRAC_PI_2 / 1e-4) as usize;
        let grid = (0..=n).map(|i| i as f64 * FRAC_PI_2 / n as f64);
        let (mut tf, mut mf, mut tg, mut mg) = (0.0, f64::MAX, 0.0, f64::MAX);
        for t in grid {
            let (c, s) = (t.cos(), t.sin());
            let f = c * c - c * s;
            let g = s * s - c * s;
            if f < mf {
                (tf, mf) = (t, f);
            }
            if g < mg {
                (tg, mg) = (t, g);
            }
        }
        assert!((tf - 3.0 * FRAC_PI_8).abs() < 1e-4);
        assert!((tg - FRAC_PI_8).abs() < 1e-4);
        assert_abs_diff_eq!(mf, weight_minimum(), epsilon = 1e-8);
        assert_abs_diff_eq!(mg, weight_minimum(), epsilon = 1e-8);
    }

    #[test]
    fn initial_density_examples() {
        let p = initial_density(0.0);
        assert_eq!((p.rho11, p.rho22, p.rho12), (1.0, 0.0, -0.0));
        let p = initial_density(FRAC_PI_4);
        assert_abs_diff_eq!(p.rho11, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.rho22, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.rho12, -0.5, epsilon = 1e-15);
        let p = initial_density(PI / 3.0);
        assert_abs_diff_eq!(p.rho11, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.rho22, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p.rho12, -(3f64.sqrt()) / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn theta_out_of_range_rejected() {
        let cfg = SystemConfig::cold_gas().with_theta(-0.1);
        assert!(cfg.validate().is_err());
        let cfg = SystemConfig::cold_gas().with_theta(2.0);
        assert!(cfg.check_domain().is_err());
        assert!(SystemConfig::cold_gas().with_theta(FRAC_PI_2).validate().is_ok());
        let cfg = SystemConfig { omega21: 0.0, ..SystemConfig::cold_gas() };
        assert!(cfg.validate().is_err());
    }

    proptest! {
        #[test]
        fn weights_match_direct_form(t in 0.0..FRAC_PI_2) {
            let (c, s) = (t.cos(), t.sin());
            prop_assert!((f_theta(t) - (c * c - c * s)).abs() < 1e-15);
            prop_assert!((g_theta(t) - (s * s - c * s)).abs() < 1e-15);
            prop_assert!((g_theta(t) - f_theta(FRAC_PI_2 - t)).abs() < 1e-15);
        }

        #[test]
        fn weight_sum_is_one_minus_sin2t(t in 0.0..FRAC_PI_2) {
            let sum = f_theta(t) + g_theta(t);
            prop_assert!((sum - (1.0 - (2.0 * t).sin())).abs() < 1e-15);
            prop_assert!(sum >= -1e-16);
        }

        #[test]
        fn prep_is_pure_dark_state(t in 0.0..FRAC_PI_2) {
            let p = initial_density(t);
            prop_assert!((p.trace() - 1.0).abs() < 1e-15);
            prop_assert!(p.determinant().abs() < 1e-15);
            prop_assert!((p.rho12 * p.rho12 - p.rho11 * p.rho22).abs() < 1e-15);
            prop_assert!((p.source41() - f_theta(t)).abs() < 1e-15);
            prop_assert!((p.source42() - g_theta(t)).abs() < 1e-15);
        }

        #[test]
        fn mixing_angle_reproduces_cosine(o1 in 0.0..10.0f64, o2 in 0.0..10.0f64) {
            prop_assume!(o1 + o2 > 1e-6);
            let t = mixing_angle_from_rabi(o1, o2).unwrap();
            prop_assert!((0.0..=FRAC_PI_2).contains(&t));
            let norm = (o1 * o1 + o2 * o2).sqrt();
            prop_assert!((t.cos() - o1 / norm).abs() < 1e-12);
            prop_assert!((t.sin() - o2 / norm).abs() < 1e-12);
        }
    }
}
