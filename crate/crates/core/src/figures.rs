//! Table builders behind the command-line subcommands.
//!
//! Each builder is a pure function returning a [`Table`]: CSV with optional
//! `#` comment lines before the header and after the last row. Gaps (poles,
//! threshold crossings) are empty fields.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bloch_oracle::{chi_from_state, evolve_to_steady, stable_step, steady_state_linear};
use crate::dispersion::{
    group_velocity_control, negative_velocity_threshold, ControlAngles,
};
use crate::error::{Error, Result};
use crate::grid::{check_increasing, UniformGrid};
use crate::model::{check_theta, f_theta, g_theta, SystemConfig};
use crate::propagation::{
    gain_factor, group_delay_centroid, propagate_transfer, transfer_phase_delay, GaussianSpec,
    MediumSlab, PulseEnvelope,
};
use crate::susceptibility::{
    chi_complex, chi_scan_with, chi_with, find_transparency_points, fmt_float,
    local_field_epsilon, pole_distance, steady_coherences, Channels, SCAN_HEADER,
};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub preamble: Vec<String>,
    pub header: String,
    pub rows: Vec<Vec<Option<f64>>>,
    pub trailer: Vec<String>,
}

impl Table {
    fn new(header: &str) -> Self {
        Table {
            header: header.to_string(),
            ..Table::default()
        }
    }

    pub fn columns(&self) -> Vec<&str> {
        self.header.split(',').collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.columns().iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.preamble {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "{}", self.header);
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.map(fmt_float).unwrap_or_default())
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        for line in &self.trailer {
            let _ = writeln!(out, "# {line}");
        }
        out
    }
}

pub fn default_delta_grid() -> UniformGrid {
    UniformGrid {
        lo: -5.0,
        hi: 10.0,
        n: 1501,
    }
}

pub fn default_theta_grid() -> UniformGrid {
    UniformGrid {
        lo: 0.0,
        hi: FRAC_PI_2,
        n: 257,
    }
}

/// Coupling strengths drawn by default in the group-velocity figure. These are
/// illustrative choices bracketing the negative-velocity threshold.
pub const DEFAULT_TAN2PHI: [f64; 4] = [1.0, 4.83, 10.0, 50.0];

pub fn default_fig3_thetas() -> Vec<f64> {
    vec![0.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2]
}

pub fn default_fig5_thetas() -> Vec<f64> {
    vec![FRAC_PI_8, 3.0 * FRAC_PI_8]
}

fn check_theta_list(thetas: &[f64]) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    thetas.iter().try_for_each(|&t| check_theta(t))
}

fn config_comment(cfg: &SystemConfig) -> String {
    format!(
        "gamma={} gamma41={} gamma42={} K={} omega21={} Omega_C={} Delta_C={} omega41={}",
        cfg.gamma, cfg.gamma41, cfg.gamma42, cfg.k, cfg.omega21, cfg.omega_c, cfg.delta_c, cfg.omega41
    )
}

/// Location and value of a sampled minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledMinimum {
    pub theta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2 {
    pub table: Table,
    pub min_f: SampledMinimum,
    pub min_g: SampledMinimum,
}

/// Dark-state weights `f(theta)`, `g(theta)` over a mixing-angle grid.
pub fn cmd_fig2(theta_grid: &[f64]) -> Result<Fig2> {
    check_increasing(theta_grid)?;
    check_theta_list(theta_grid)?;
    let mut table = Table::new("theta_rad,f_theta,g_theta");
    let mut min_f = SampledMinimum { theta: 0.0, value: f64::INFINITY };
    let mut min_g = min_f;
    for &t in theta_grid {
        let (f, g) = (f_theta(t), g_theta(t));
        if f < min_f.value {
            min_f = SampledMinimum { theta: t, value: f };
        }
        if g < min_g.value {
            min_g = SampledMinimum { theta: t, value: g };
        }
        table.rows.push(vec![Some(t), Some(f), Some(g)]);
    }
    table.preamble.push(format!(
        "min_f theta={} value={}",
        fmt_float(min_f.theta),
        fmt_float(min_f.value)
    ));
    table.preamble.push(format!(
        "min_g theta={} value={}",
        fmt_float(min_g.theta),
        fmt_float(min_g.value)
    ));
    Ok(Fig2 { table, min_f, min_g })
}

/// Real and imaginary susceptibility against detuning, one block per angle.
/// Zero-absorption points between the two lines are listed as comments.
pub fn cmd_fig3(cfg: &SystemConfig, delta_grid: &[f64], thetas: &[f64]) -> Result<Table> {
    check_increasing(delta_grid)?;
    check_theta_list(thetas)?;
    let mut table = Table::new("theta_rad,delta1_over_gamma,re_chi,im_chi");
    table.preamble.push(config_comment(cfg));
    for &theta in thetas {
        let cfg = cfg.with_theta(theta);
        for s in chi_scan_with(&cfg, Channels::Both, delta_grid)? {
            table.rows.push(vec![
                Some(theta),
                Some(s.delta1),
                s.chi.map(|c| c.re),
                s.chi.map(|c| c.im),
            ]);
        }
        if f_theta(theta) != 0.0 || g_theta(theta) != 0.0 {
            for p in find_transparency_points(&cfg, 0.0, cfg.omega21)? {
                table.preamble.push(format!(
                    "transparency theta={} delta1={} re_chi={} label={}",
                    fmt_float(theta),
                    fmt_float(p.delta1),
                    fmt_float(p.chi_re),
                    p.label()
                ));
            }
        }
    }
    Ok(table)
}

/// Group velocity from the control law over `theta` for each coupling strength.
/// Rows exactly at the threshold have an empty velocity.
pub fn cmd_fig4(theta_grid: &[f64], tan2phis: &[f64]) -> Result<Table> {
    check_increasing(theta_grid)?;
    check_theta_list(theta_grid)?;
    if tan2phis.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut table = Table::new("theta_rad,tan2phi,vg_over_c");
    table.preamble.push(format!(
        "negative_velocity_threshold tan2phi={}",
        fmt_float(negative_velocity_threshold())
    ));
    for &tan2phi in tan2phis {
        for &theta in theta_grid {
            let vg = match group_velocity_control(ControlAngles::new(theta, tan2phi)?) {
                Ok(v) => Some(v),
                Err(Error::InfiniteGroupVelocity) => {
                    table.preamble.push(format!(
                        "threshold theta={} tan2phi={}",
                        fmt_float(theta),
                        fmt_float(tan2phi)
                    ));
                    None
                }
                Err(e) => return Err(e),
            };
            table.rows.push(vec![Some(theta), Some(tan2phi), vg]);
        }
    }
    Ok(table)
}

/// Bare and local-field corrected susceptibility for a dense medium.
pub fn cmd_fig5(cfg: &SystemConfig, delta_grid: &[f64], thetas: &[f64]) -> Result<Table> {
    check_increasing(delta_grid)?;
    check_theta_list(thetas)?;
    let mut table =
        Table::new("theta_rad,delta1_over_gamma,re_chi,im_chi,re_eps_minus_1,im_eps_minus_1");
    table.preamble.push(config_comment(cfg));
    for &theta in thetas {
        let cfg = cfg.with_theta(theta);
        for s in chi_scan_with(&cfg, Channels::Both, delta_grid)? {
            let eps = s.chi.and_then(|c| local_field_epsilon(c).ok());
            table.rows.push(vec![
                Some(theta),
                Some(s.delta1),
                s.chi.map(|c| c.re),
                s.chi.map(|c| c.im),
                eps.map(|e| e.re),
                eps.map(|e| e.im),
            ]);
        }
    }
    Ok(table)
}

/// Single-angle detuning scan with the `delta1_over_gamma,re_chi,im_chi`
/// layout. With `local_field`, the value columns hold `eps - 1`.
pub fn cmd_scan(
    cfg: &SystemConfig,
    delta_grid: &[f64],
    local_field: bool,
    channels: Channels,
) -> Result<Table> {
    let mut table = Table::new(SCAN_HEADER);
    table.preamble.push(config_comment(cfg));
    table.preamble.push(format!("theta={}", fmt_float(cfg.theta)));
    if local_field {
        table.preamble.push("values are local-field corrected eps - 1".into());
    }
    for s in chi_scan_with(cfg, channels, delta_grid)? {
        let value = match (s.chi, local_field) {
            (Some(c), true) => local_field_epsilon(c).ok(),
            (c, false) => c,
            (None, true) => None,
        };
        table
            .rows
            .push(vec![Some(s.delta1), value.map(|c| c.re), value.map(|c| c.im)]);
    }
    Ok(table)
}

/// Randomized sweep comparing the closed form with both oracle routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSweep {
    pub points: usize,
    pub seed: u64,
    /// Control Rabi frequency range, sampled log-uniformly.
    pub omega_c: (f64, f64),
    /// Probe detuning range, sampled uniformly.
    pub delta1: (f64, f64),
    pub omega_p: f64,
    pub t_max: f64,
    /// Multiplier applied to `K` on the oracle side only. `1.0` for real runs;
    /// other values emulate a broken susceptibility convention.
    pub k_factor: f64,
}

impl Default for OracleSweep {
    fn default() -> Self {
        OracleSweep {
            points: 1000,
            seed: 0x7219_0d5e,
            omega_c: (0.1, 10.0),
            delta1: (-10.0, 10.0),
            omega_p: 0.01,
            t_max: 1e9,
            k_factor: 1.0,
        }
    }
}

pub const ORACLE_CLOSED_VS_LINEAR: f64 = 1e-12;
pub const ORACLE_LINEAR_VS_ODE: f64 = 1e-6;
pub const ORACLE_CHI: f64 = 1e-8;
/// Points whose resonance denominators are this close to zero are skipped.
pub const ORACLE_POLE_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub points: usize,
    pub skipped_near_pole: usize,
    pub non_converged: usize,
    pub max_closed_vs_linear: f64,
    pub max_linear_vs_ode: f64,
    pub max_chi_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub table: Table,
    pub summary: OracleSummary,
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Residuals are relative to the largest coherence of the linear solution
/// (coherences) or to `|chi|` (susceptibility).
pub fn cmd_oracle_check(base: &SystemConfig, sweep: &OracleSweep) -> Result<OracleReport> {
    if sweep.points == 0 {
        return Err(Error::EmptyGrid);
    }
    let (lo, hi) = sweep.omega_c;
    let ordered = |a: f64, b: f64| a.partial_cmp(&b).is_some_and(|o| o.is_le());
    if !(lo > 0.0 && ordered(lo, hi) && ordered(sweep.delta1.0, sweep.delta1.1)) {
        return Err(Error::invalid("oracle sweep ranges must be ordered, Omega_C > 0"));
    }
    if sweep.omega_p == 0.0 {
        return Err(Error::invalid("probe Rabi frequency must be nonzero"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sweep.seed);
    let mut table = Table::new(
        "index,theta_rad,omega_c,delta1_over_gamma,closed_vs_linear,linear_vs_ode,chi_residual,converged",
    );
    table.preamble.push(config_comment(base));
    table.preamble.push(format!(
        "seed={} points={} omega_p={} k_factor={}",
        sweep.seed,
        sweep.points,
        fmt_float(sweep.omega_p),
        fmt_float(sweep.k_factor)
    ));
    let mut summary = OracleSummary {
        points: 0,
        skipped_near_pole: 0,
        non_converged: 0,
        max_closed_vs_linear: 0.0,
        max_linear_vs_ode: 0.0,
        max_chi_residual: 0.0,
        pass: false,
    };
    for index in 0..sweep.points {
        let theta = rng.gen_range(0.0..=FRAC_PI_2);
        let omega_c = (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp();
        let delta1 = rng.gen_range(sweep.delta1.0..=sweep.delta1.1);
        let cfg = SystemConfig { theta, omega_c, ..*base };
        if pole_distance(&cfg, delta1) < ORACLE_POLE_EXCLUSION {
            summary.skipped_near_pole += 1;
            continue;
        }
        let (r41, r42) = steady_coherences(&cfg, sweep.omega_p, delta1)?;
        let linear = steady_state_linear(&cfg, sweep.omega_p, delta1)?;
        let ode = evolve_to_steady(
            &cfg,
            sweep.omega_p,
            delta1,
            stable_step(&cfg, delta1),
            sweep.t_max,
        )?;
        let scale = linear.max_norm();
        let closed = relative(
            (r41 - linear.rho41).norm().max((r42 - linear.rho42).norm()),
            scale,
        );
        let evolved = relative(
            linear
                .coherences()
                .iter()
                .zip(ode.state.coherences())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
            scale,
        );
        let chi_closed = chi_complex(&cfg, delta1)?;
        let chi_oracle = chi_from_state(&linear, sweep.omega_p, cfg.k * sweep.k_factor)?;
        let chi_res = relative((chi_closed - chi_oracle).norm(), chi_closed.norm());

        summary.points += 1;
        summary.non_converged += usize::from(!ode.converged);
        summary.max_closed_vs_linear = summary.max_closed_vs_linear.max(closed);
        summary.max_linear_vs_ode = summary.max_linear_vs_ode.max(evolved);
        summary.max_chi_residual = summary.max_chi_residual.max(chi_res);
        table.rows.push(vec![
            Some(index as f64),
            Some(theta),
            Some(omega_c),
            Some(delta1),
            Some(closed),
            Some(evolved),
            Some(chi_res),
            Some(if ode.converged { 1.0 } else { 0.0 }),
        ]);
    }
    summary.pass = summary.points > 0
        && summary.non_converged == 0
        && summary.max_closed_vs_linear < ORACLE_CLOSED_VS_LINEAR
        && summary.max_linear_vs_ode < ORACLE_LINEAR_VS_ODE
        && summary.max_chi_residual < ORACLE_CHI;
    table.trailer.push(format!(
        "max_closed_vs_linear={} max_linear_vs_ode={} max_chi_residual={} non_converged={} pass={}",
        fmt_float(summary.max_closed_vs_linear),
        fmt_float(summary.max_linear_vs_ode),
        fmt_float(summary.max_chi_residual),
        summary.non_converged,
        summary.pass
    ));
    Ok(OracleReport { table, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagateSpec {
    pub pulse: GaussianSpec,
    pub length: f64,
    pub local_field: bool,
    pub channels: Channels,
}

impl Default for PropagateSpec {
    fn default() -> Self {
        PropagateSpec {
            pulse: GaussianSpec::default(),
            length: 1.0,
            local_field: false,
            channels: Channels::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagateSummary {
    /// Centroid delay relative to vacuum propagation, `1/gamma`.
    pub delay: f64,
    pub gain: f64,
    /// Delay from the transfer phase slope at the carrier.
    pub phase_delay: f64,
    /// `L (1 / v_g - 1)` with `v_g` from the control law; absent at threshold.
    pub predicted_delay: Option<f64>,
    pub vg_control: Option<f64>,
    pub tan2phi: Option<f64>,
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagateReport {
    pub table: Table,
    pub summary: PropagateSummary,
    pub input: PulseEnvelope,
    pub output: PulseEnvelope,
}

/// Sends a Gaussian pulse through a slab and compares the measured delay with
/// the control-law prediction.
pub fn cmd_propagate(cfg: &SystemConfig, spec: &PropagateSpec) -> Result<PropagateReport> {
    let input = PulseEnvelope::gaussian(&spec.pulse)?;
    let slab = MediumSlab {
        length: spec.length,
        cfg: *cfg,
        local_field: spec.local_field,
        channels: spec.channels,
    };
    let output = propagate_transfer(&input, &slab)?;
    let delay = group_delay_centroid(&input, &output)?;
    let gain = gain_factor(&input, &output)?;
    let phase_delay = transfer_phase_delay(&slab, spec.pulse.carrier_delta1, 1e-3)?;
    let angles = ControlAngles::from_config(cfg).ok();
    let tan2phi = angles.map(|a| a.tan2phi);
    let vg_control = angles.and_then(|a| group_velocity_control(a).ok());
    let predicted_delay = vg_control.map(|vg| spec.length * (1.0 / vg - 1.0));
    let relative_error = predicted_delay.map(|p| {
        if p == 0.0 {
            delay.abs()
        } else {
            (delay - p).abs() / p.abs()
        }
    });
    let summary = PropagateSummary {
        delay,
        gain,
        phase_delay,
        predicted_delay,
        vg_control,
        tan2phi,
        relative_error,
    };

    let mut table = Table::new("t_over_invgamma,re_in,im_in,re_out,im_out,re_vacuum,im_vacuum");
    table.preamble.push(config_comment(cfg));
    table.preamble.push(format!(
        "theta={} length={} channels={:?} local_field={} carrier_delta1={}",
        fmt_float(cfg.theta),
        fmt_float(spec.length),
        spec.channels,
        spec.local_field,
        fmt_float(spec.pulse.carrier_delta1)
    ));
    table
        .preamble
        .push("times in the vacuum-retarded frame; vacuum reference equals the input".into());
    for (j, t) in input.times().enumerate() {
        let a = input.amplitude[j];
        let b = output.amplitude[j];
        table
            .rows
            .push(vec![Some(t), Some(a.re), Some(a.im), Some(b.re), Some(b.im), Some(a.re), Some(a.im)]);
    }
    table.trailer.push(format!("delay={}", fmt_float(delay)));
    table.trailer.push(format!("gain={}", fmt_float(gain)));
    if let Some(p) = predicted_delay {
        table.trailer.push(format!("predicted_delay={}", fmt_float(p)));
    }
    Ok(PropagateReport {
        table,
        summary,
        input,
        output,
    })
}

/// Pointwise check used for local-field output: `eps - 1` recomputed from `chi`.
pub fn local_field_residual(chi: C64, eps_minus_one: C64) -> Result<f64> {
    Ok((local_field_epsilon(chi)? - eps_minus_one).norm())
}

/// Convenience for callers that want a single `chi` value under a channel choice.
pub fn chi_at(cfg: &SystemConfig, channels: Channels, delta1: f64) -> Result<C64> {
    chi_with(cfg, channels, delta1)
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    pub config: SystemConfig,
    pub grids: serde_json::Value,
    pub outputs: Vec<String>,
    pub seeds: Vec<u64>,
    pub duration_s: f64,
}
