//! Refractive index, group index and the group-velocity control law.
//!
//! Two routes to the group velocity are kept side by side:
//!
//! * the control law `v_g / c = 1 / (1 + f(theta) tan^2 phi)`, where
//!   `tan^2 phi = g^2 N / Omega_C^2` measures how strongly the medium couples
//!   to the probe relative to the control field;
//! * the dispersive definition `v_g / c = 1 / (n + nu dn/dnu)` evaluated from
//!   the steady-state susceptibility by central differences.
//!
//! Detuning runs opposite to probe frequency (`D1 = omega41 - nu`), so
//! `dn/dnu = -dn/dD1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_theta, f_theta, weight_minimum, SystemConfig};
use crate::susceptibility::{chi_with, Channels};

pub const DEFAULT_FD_STEP: f64 = 1e-3;
const MAX_FD_STEP: f64 = 1e-2;
const THRESHOLD_TOLERANCE: f64 = 1e-12;

/// Mixing angle and medium coupling strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlAngles {
    pub theta: f64,
    pub tan2phi: f64,
}

impl ControlAngles {
    pub fn new(theta: f64, tan2phi: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(tan2phi >= 0.0 && tan2phi.is_finite()) {
            return Err(Error::invalid("tan^2 phi must be finite and >= 0"));
        }
        Ok(ControlAngles { theta, tan2phi })
    }

    /// Coupling strength implied by the medium: `g^2 N = 2 omega41 K`, so
    /// `tan^2 phi = 2 omega41 K / Omega_C^2`.
    pub fn from_config(cfg: &SystemConfig) -> Result<Self> {
        cfg.check_domain()?;
        if cfg.omega_c == 0.0 {
            return Err(Error::invalid("tan^2 phi is unbounded without a control field"));
        }
        Self::new(cfg.theta, 2.0 * cfg.omega41 * cfg.k / (cfg.omega_c * cfg.omega_c))
    }
}

/// `v_g / c = 1 / (1 + f(theta) tan^2 phi)`; may be negative or exceed one.
pub fn group_velocity_control(angles: ControlAngles) -> Result<f64> {
    let denom = 1.0 + f_theta(angles.theta) * angles.tan2phi;
    if denom.abs() < THRESHOLD_TOLERANCE {
        return Err(Error::InfiniteGroupVelocity);
    }
    Ok(1.0 / denom)
}

/// Coupling strength above which the group velocity at `theta = 3 pi / 8`
/// turns negative: `1 / |min f| = 2 (sqrt 2 + 1)`.
pub fn negative_velocity_threshold() -> f64 {
    1.0 / weight_minimum().abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    pub delta1: f64,
    /// `sqrt(1 + Re chi)`.
    pub n: f64,
    /// Derivative of `n` with respect to probe frequency, in `1/gamma`.
    pub dn_dnu: f64,
    /// `n + omega41 dn/dnu`.
    pub n_group: f64,
    /// `1 / n_group`, absent when the group index vanishes.
    pub vg_over_c: Option<f64>,
}

fn real_index(cfg: &SystemConfig, channels: Channels, delta1: f64) -> Result<f64> {
    let re = chi_with(cfg, channels, delta1)?.re;
    if re <= -1.0 {
        return Err(Error::IndexUndefined);
    }
    Ok((1.0 + re).sqrt())
}

/// Index and group index at `delta1` with a central-difference step `h`.
pub fn dispersion_sample(cfg: &SystemConfig, delta1: f64, h: f64) -> Result<DispersionSample> {
    dispersion_sample_with(cfg, Channels::Both, delta1, h)
}

pub fn dispersion_sample_with(
    cfg: &SystemConfig,
    channels: Channels,
    delta1: f64,
    h: f64,
) -> Result<DispersionSample> {
    if !(h > 0.0 && h <= MAX_FD_STEP) {
        return Err(Error::invalid(format!("finite-difference step {h} outside (0, 0.01]")));
    }
    let n = real_index(cfg, channels, delta1)?;
    let n_up = real_index(cfg, channels, delta1 + h)?;
    let n_down = real_index(cfg, channels, delta1 - h)?;
    let dn_dnu = -(n_up - n_down) / (2.0 * h);
    let n_group = n + cfg.omega41 * dn_dnu;
    Ok(DispersionSample {
        delta1,
        n,
        dn_dnu,
        n_group,
        vg_over_c: (n_group != 0.0).then(|| 1.0 / n_group),
    })
}

/// Both group-velocity routes at `D1 = 0` and their relative disagreement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub tan2phi: f64,
    pub vg_control: f64,
    pub vg_dispersion: f64,
    pub rel_error: f64,
}

/// Compares the control law with the dispersive group velocity on the
/// `|1> -> |4>` line alone, the same medium the control law describes.
pub fn consistency_check(cfg: &SystemConfig) -> Result<Consistency> {
    consistency_check_with(cfg, Channels::ProbeResonance, DEFAULT_FD_STEP)
}

pub fn consistency_check_with(cfg: &SystemConfig, channels: Channels, h: f64) -> Result<Consistency> {
    let angles = ControlAngles::from_config(cfg)?;
    let vg_control = group_velocity_control(angles)?;
    let sample = dispersion_sample_with(cfg, channels, 0.0, h)?;
    let vg_dispersion = sample.vg_over_c.ok_or(Error::InfiniteGroupVelocity)?;
    Ok(Consistency {
        tan2phi: angles.tan2phi,
        vg_control,
        vg_dispersion,
        rel_error: (vg_control - vg_dispersion).abs() / vg_control.abs(),
    })
}
