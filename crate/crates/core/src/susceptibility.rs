//! Closed-form steady-state probe response.
//!
//! With the ground manifold frozen in the dark state, each probe resonance
//! `|j> -> |4>` (j = 1, 2) responds like a Lambda-type EIT line dressed by the
//! control field:
//!
//! ```text
//! rho4j = (i/2) Omega_P w_j (D_j - D_C) / [(i D_j + gamma4j)(D_j - D_C) - i Omega_C^2 / 4]
//! ```
//!
//! with weights `w_1 = f(theta)`, `w_2 = g(theta)` and `D_2 = D_1 - omega21`.
//! The susceptibility is `chi = 2 K (rho41 + rho42) / Omega_P`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::check_increasing;
use crate::model::{f_theta, g_theta, SystemConfig};
use crate::C64;

/// Denominator modulus (in `gamma^2`) below which a resonance is treated as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Which probe resonances contribute to the response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channels {
    /// Both the `|1> -> |4>` and `|2> -> |4>` lines.
    #[default]
    Both,
    /// Only the `|1> -> |4>` line. This is the medium seen by a pulse carried
    /// at `omega41` once the far `|2> -> |4>` coherence is dropped, the
    /// reduction under which the group-velocity control law holds.
    ProbeResonance,
}

/// How a susceptibility value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiSource {
    Analytic,
    OracleLinear,
    OracleOde,
}

/// Susceptibility at one probe detuning. `chi` is `None` on a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSample {
    pub delta1: f64,
    pub chi: Option<C64>,
    pub source: ChiSource,
}

/// `(D - D_C) / [(i D + gamma)(D - D_C) - i Omega_C^2 / 4]` for one resonance.
fn dressed_line(delta: f64, decay: f64, delta_c: f64, omega_c: f64) -> Result<C64> {
    let two_photon = delta - delta_c;
    let denom = C64::new(decay, delta) * two_photon - C64::new(0.0, omega_c * omega_c / 4.0);
    if denom.norm() < POLE_TOLERANCE {
        return Err(Error::DressedStatePole);
    }
    Ok(C64::new(two_photon, 0.0) / denom)
}

/// Smallest modulus of the two resonance denominators at `delta1`; zero on a pole.
pub fn pole_distance(cfg: &SystemConfig, delta1: f64) -> f64 {
    let denom = |delta: f64, decay: f64| {
        (C64::new(decay, delta) * (delta - cfg.delta_c)
            - C64::new(0.0, cfg.omega_c * cfg.omega_c / 4.0))
        .norm()
    };
    denom(delta1, cfg.gamma41).min(denom(cfg.delta2(delta1), cfg.gamma42))
}

/// Steady-state `(rho41, rho42)` for a weak probe of Rabi frequency `omega_p`.
pub fn steady_coherences(cfg: &SystemConfig, omega_p: f64, delta1: f64) -> Result<(C64, C64)> {
    cfg.check_domain()?;
    let half_i_probe = C64::new(0.0, omega_p / 2.0);
    let line1 = dressed_line(delta1, cfg.gamma41, cfg.delta_c, cfg.omega_c)?;
    let line2 = dressed_line(cfg.delta2(delta1), cfg.gamma42, cfg.delta_c, cfg.omega_c)?;
    Ok((
        half_i_probe * f_theta(cfg.theta) * line1,
        half_i_probe * g_theta(cfg.theta) * line2,
    ))
}

/// Complex probe susceptibility at detuning `delta1` (both resonances).
pub fn chi_complex(cfg: &SystemConfig, delta1: f64) -> Result<C64> {
    chi_with(cfg, Channels::Both, delta1)
}

pub fn chi_with(cfg: &SystemConfig, channels: Channels, delta1: f64) -> Result<C64> {
    // unit probe: the response is linear, so chi does not depend on it
    let (rho41, rho42) = steady_coherences(cfg, 1.0, delta1)?;
    let rho42 = match channels {
        Channels::Both => rho42,
        Channels::ProbeResonance => C64::new(0.0, 0.0),
    };
    Ok(2.0 * cfg.k * (rho41 + rho42))
}

fn require_symmetric_resonant(cfg: &SystemConfig) -> Result<()> {
    cfg.check_domain()?;
    if cfg.delta_c != 0.0 || cfg.gamma41 != cfg.gamma42 {
        return Err(Error::ClosedFormAssumption);
    }
    Ok(())
}

/// Returns `(dispersive, absorptive)` shapes `D(D^2 - a) / Q` and `gamma D^2 / Q`
/// with `a = Omega_C^2 / 4`, `Q = gamma^2 D^2 + (D^2 - a)^2`.
fn real_line_shapes(delta: f64, decay: f64, omega_c: f64) -> Result<(f64, f64)> {
    let a = omega_c * omega_c / 4.0;
    let detuned = delta * delta - a;
    let q = decay * decay * delta * delta + detuned * detuned;
    if q < POLE_TOLERANCE * POLE_TOLERANCE {
        return Err(Error::DressedStatePole);
    }
    Ok((delta * detuned / q, decay * delta * delta / q))
}

/// Real part of `chi` from the real-valued closed form. Requires resonant
/// control (`Delta_C = 0`) and `gamma41 = gamma42`.
pub fn chi_re(cfg: &SystemConfig, delta1: f64) -> Result<f64> {
    require_symmetric_resonant(cfg)?;
    let (d1, _) = real_line_shapes(delta1, cfg.gamma41, cfg.omega_c)?;
    let (d2, _) = real_line_shapes(cfg.delta2(delta1), cfg.gamma41, cfg.omega_c)?;
    Ok(cfg.k * (f_theta(cfg.theta) * d1 + g_theta(cfg.theta) * d2))
}

/// Imaginary part of `chi` from the real-valued closed form; see [`chi_re`].
pub fn chi_im(cfg: &SystemConfig, delta1: f64) -> Result<f64> {
    require_symmetric_resonant(cfg)?;
    let (_, a1) = real_line_shapes(delta1, cfg.gamma41, cfg.omega_c)?;
    let (_, a2) = real_line_shapes(cfg.delta2(delta1), cfg.gamma41, cfg.omega_c)?;
    Ok(cfg.k * (f_theta(cfg.theta) * a1 + g_theta(cfg.theta) * a2))
}

/// Dense-medium (Lorentz–Lorenz) correction, `eps - 1 = chi / (1 - chi / 3)`,
/// with the bare susceptibility standing in for `N alpha`.
pub fn local_field_epsilon(chi_bare: C64) -> Result<C64> {
    let denom = 1.0 - chi_bare / 3.0;
    if denom.norm() <= POLE_TOLERANCE {
        return Err(Error::LorentzLorenzPole);
    }
    Ok(chi_bare / denom)
}

/// Samples `chi` over an increasing detuning grid. Poles become gaps.
pub fn chi_scan(cfg: &SystemConfig, delta1_grid: &[f64]) -> Result<Vec<ChiSample>> {
    chi_scan_with(cfg, Channels::Both, delta1_grid)
}

pub fn chi_scan_with(
    cfg: &SystemConfig,
    channels: Channels,
    delta1_grid: &[f64],
) -> Result<Vec<ChiSample>> {
    check_increasing(delta1_grid)?;
    cfg.check_domain()?;
    delta1_grid
        .iter()
        .map(|&delta1| match chi_with(cfg, channels, delta1) {
            Ok(chi) => Ok(ChiSample {
                delta1,
                chi: Some(chi),
                source: ChiSource::Analytic,
            }),
            Err(Error::DressedStatePole) => Ok(ChiSample {
                delta1,
                chi: None,
                source: ChiSource::Analytic,
            }),
            Err(e) => Err(e),
        })
        .collect()
}

/// Formats a float so that it parses back to the identical value.
pub fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub const SCAN_HEADER: &str = "delta1_over_gamma,re_chi,im_chi";

/// Writes `delta1_over_gamma,re_chi,im_chi` rows; pole rows have empty fields.
pub fn write_scan_csv<W: Write>(samples: &[ChiSample], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SCAN_HEADER}")?;
    for s in samples {
        match s.chi {
            Some(c) => writeln!(
                out,
                "{},{},{}",
                fmt_float(s.delta1),
                fmt_float(c.re),
                fmt_float(c.im)
            )?,
            None => writeln!(out, "{},,", fmt_float(s.delta1))?,
        }
    }
    Ok(())
}

/// A detuning where the probe sees neither absorption nor gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransparencyPoint {
    pub delta1: f64,
    pub chi_re: f64,
}

impl TransparencyPoint {
    /// Positive index shift without absorption (`HG`) or negative (`LG`).
    pub fn label(&self) -> &'static str {
        if self.chi_re > 0.0 {
            "HG"
        } else {
            "LG"
        }
    }
}

const ROOT_SCAN_CELLS: usize = 8192;
const ROOT_TOLERANCE: f64 = 1e-10;

/// Zeros of `Im chi` strictly inside `(lo, hi)` at which `Re chi != 0`.
///
/// The bracket is scanned on a fine grid and every sign change is refined by
/// bisection until `|Im chi| < 1e-10`. No sign change gives an empty list.
pub fn find_transparency_points(
    cfg: &SystemConfig,
    lo: f64,
    hi: f64,
) -> Result<Vec<TransparencyPoint>> {
    cfg.check_domain()?;
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::invalid("transparency bracket must satisfy lo < hi"));
    }
    if f_theta(cfg.theta) == 0.0 && g_theta(cfg.theta) == 0.0 {
        return Err(Error::invalid(
            "theta = pi/4 is transparent at every detuning",
        ));
    }
    let im = |d: f64| chi_complex(cfg, d).map(|c| c.im).ok();
    let width = (hi - lo) / ROOT_SCAN_CELLS as f64;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..ROOT_SCAN_CELLS {
        let x = lo + i as f64 * width;
        let Some(v) = im(x) else {
            prev = None;
            continue;
        };
        if let Some((xp, vp)) = prev {
            if vp == 0.0 {
                // handled when it was the current point
            } else if v == 0.0 || vp.signum() != v.signum() {
                if let Some(root) = bisect(&im, xp, vp, x, v) {
                    roots.push(root);
                }
            }
        }
        prev = Some((x, v));
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < width * 1e-6);
    let mut points = Vec::with_capacity(roots.len());
    for delta1 in roots {
        let c = chi_complex(cfg, delta1)?;
        if c.re != 0.0 {
            points.push(TransparencyPoint { delta1, chi_re: c.re });
        }
    }
    Ok(points)
}

fn bisect(im: &impl Fn(f64) -> Option<f64>, mut a: f64, va: f64, mut b: f64, vb: f64) -> Option<f64> {
    if vb == 0.0 {
        return Some(b);
    }
    let sa = va.signum();
    let mut best = if va.abs() < vb.abs() { (a, va) } else { (b, vb) };
    for _ in 0..200 {
        if best.1.abs() < ROOT_TOLERANCE && (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let vm = im(m)?;
        if vm.abs() < best.1.abs() {
            best = (m, vm);
        }
        if vm == 0.0 {
            return Some(m);
        }
        if vm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    (best.1.abs() < ROOT_TOLERANCE).then_some(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    fn cold(theta: f64) -> SystemConfig {
        SystemConfig::cold_gas().with_theta(theta)
    }

    #[test]
    fn coherences_vanish_on_two_photon_resonance() {
        let (r41, r42) = steady_coherences(&cold(0.0), 0.01, 0.0).unwrap();
        assert_eq!(r41, C64::new(0.0, 0.0));
        assert_eq!(r42.norm(), 0.0);
    }

    #[test]
    fn coherence_hand_value() {
        // denominator (i + 1)(1) - i = 1, numerator (i/2)(0.01)(1)(1)
        let (r41, r42) = steady_coherences(&cold(0.0), 0.01, 1.0).unwrap();
        assert_abs_diff_eq!(r41.re, 0.0, epsilon = 1e-18);
        assert_abs_diff_eq!(r41.im, 0.005, epsilon = 1e-17);
        assert_eq!(r42.norm(), 0.0);
    }

    #[test]
    fn symmetric_dark_state_is_inert() {
        for d in [-3.0, 0.0, 0.7, 5.0] {
            let (r41, r42) = steady_coherences(&cold(FRAC_PI_4), 0.01, d).unwrap();
            assert_eq!(r41.norm(), 0.0);
            assert_eq!(r42.norm(), 0.0);
            assert_eq!(chi_complex(&cold(FRAC_PI_4), d).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn chi_hand_values() {
        let c = chi_complex(&cold(0.0), 1.0).unwrap();
        assert_abs_diff_eq!(c.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.im, 1.0, epsilon = 1e-15);
        assert_eq!(chi_complex(&cold(0.0), 0.0).unwrap().norm(), 0.0);
        assert_abs_diff_eq!(chi_im(&cold(0.0), 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(chi_im(&cold(0.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn far_detuned_real_part_decays_like_k_f_over_delta() {
        let cfg = cold(0.0);
        for d in [1e3, -1e3, 1e5] {
            let re = chi_re(&cfg, d).unwrap();
            assert!((re * d - 1.0).abs() < 1e-2, "{d}: {re}");
        }
        assert!(chi_re(&cfg, 1e3).unwrap() > 0.0);
        assert!(chi_re(&cfg, -1e3).unwrap() < 0.0);
    }

    #[test]
    fn real_forms_reject_asymmetric_setups() {
        let cfg = SystemConfig { delta_c: 0.5, ..cold(0.0) };
        assert!(matches!(chi_re(&cfg, 1.0), Err(Error::ClosedFormAssumption)));
        let cfg = SystemConfig { gamma42: 2.0, ..cold(0.0) };
        assert!(matches!(chi_im(&cfg, 1.0), Err(Error::ClosedFormAssumption)));
    }

    #[test]
    fn pole_without_damping() {
        // gamma41 = 0 and D1 (D1 - D_C) = Omega_C^2 / 4 at D1 = 1
        let cfg = SystemConfig { gamma41: 0.0, ..cold(0.0) };
        assert!(matches!(
            steady_coherences(&cfg, 0.01, 1.0),
            Err(Error::DressedStatePole)
        ));
        let scan = chi_scan(&cfg, &[0.5, 1.0, 1.5]).unwrap();
        assert!(scan[0].chi.is_some());
        assert!(scan[1].chi.is_none());
        assert!(scan[2].chi.is_some());
        let mut buf = Vec::new();
        write_scan_csv(&scan, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(2).unwrap(), "1,,");
    }

    #[test]
    fn local_field_examples() {
        assert_eq!(local_field_epsilon(C64::new(0.0, 0.0)).unwrap().norm(), 0.0);
        let e = local_field_epsilon(C64::new(0.3, 0.0)).unwrap();
        assert_abs_diff_eq!(e.re, 1.0 / 3.0, epsilon = 1e-15);
        assert!(matches!(
            local_field_epsilon(C64::new(3.0, 0.0)),
            Err(Error::LorentzLorenzPole)
        ));
    }

    #[test]
    fn scan_examples() {
        let grid: Vec<f64> = (0..401).map(|i| -5.0 + 15.0 * i as f64 / 400.0).collect();
        let scan = chi_scan(&cold(FRAC_PI_4), &grid).unwrap();
        assert_eq!(scan.len(), 401);
        assert!(scan.iter().all(|s| s.chi.unwrap().norm() == 0.0));
        let one = chi_scan(&cold(0.0), &[1.0]).unwrap();
        assert_abs_diff_eq!(one[0].chi.unwrap().im, 1.0, epsilon = 1e-15);
        assert!(matches!(chi_scan(&cold(0.0), &[]), Err(Error::EmptyGrid)));
        assert!(matches!(
            chi_scan(&cold(0.0), &[1.0, 0.0]),
            Err(Error::GridNotIncreasing)
        ));
    }

    #[test]
    fn structure_at_both_resonances() {
        // |chi| has a zero on each two-photon resonance when that line carries weight
        let cfg = cold(FRAC_PI_8);
        assert_eq!(chi_with(&cfg, Channels::ProbeResonance, 0.0).unwrap().norm(), 0.0);
        let c5 = chi_complex(&cfg, 5.0).unwrap();
        let (r41, _) = steady_coherences(&cfg, 1.0, 5.0).unwrap();
        assert_abs_diff_eq!(c5.re, 2.0 * cfg.k * r41.re, epsilon = 1e-15);
        assert_abs_diff_eq!(c5.im, 2.0 * cfg.k * r41.im, epsilon = 1e-15);
    }

    // Roots of Im chi in (0, 5) frozen from an independent bracketing root
    // finder run on the real-valued line shapes.
    const ROOTS_PI_8: [(f64, f64); 3] = [
        (0.133_824_821_203_402_3, -0.024_409_180_929_554_71),
        (2.982_352_301_577_069_7, 0.260_343_632_181_290_5),
        (4.676_560_912_938_415, 0.040_504_870_387_246_37),
    ];

    #[test]
    fn transparency_points_pi_over_8() {
        let pts = find_transparency_points(&cold(FRAC_PI_8), 0.0, 5.0).unwrap();
        assert_eq!(pts.len(), 3);
        for (p, (d, re)) in pts.iter().zip(ROOTS_PI_8) {
            assert_abs_diff_eq!(p.delta1, d, epsilon = 1e-9);
            assert_abs_diff_eq!(p.chi_re, re, epsilon = 1e-9);
            assert!(chi_im(&cold(FRAC_PI_8), p.delta1).unwrap().abs() < 1e-10);
        }
        // only one lies outside both dressed doublets
        let between: Vec<_> = pts.iter().filter(|p| p.delta1 > 1.0 && p.delta1 < 4.0).collect();
        assert_eq!(between.len(), 1);
        assert_eq!(between[0].label(), "HG");
    }

    #[test]
    fn transparency_points_mirror_for_3pi_over_8() {
        let pts = find_transparency_points(&cold(3.0 * FRAC_PI_8), 0.0, 5.0).unwrap();
        assert_eq!(pts.len(), 3);
        for (p, (d, re)) in pts.iter().rev().zip(ROOTS_PI_8) {
            assert_abs_diff_eq!(p.delta1, 5.0 - d, epsilon = 1e-9);
            assert_abs_diff_eq!(p.chi_re, -re, epsilon = 1e-9);
        }
        let between: Vec<_> = pts.iter().filter(|p| p.delta1 > 1.0 && p.delta1 < 4.0).collect();
        assert_eq!(between.len(), 1);
        assert_eq!(between[0].label(), "LG");
    }

    #[test]
    fn no_transparency_points_for_single_line() {
        assert!(find_transparency_points(&cold(0.0), 1.0, 4.0).unwrap().is_empty());
        assert!(find_transparency_points(&cold(FRAC_PI_4), 0.0, 5.0).is_err());
        assert!(find_transparency_points(&cold(0.0), 4.0, 1.0).is_err());
    }

    #[test]
    fn weights_swap_at_the_ends() {
        // theta -> pi/2 - theta with D1 -> omega21 - D1 flips the sign of Re chi
        let a = chi_complex(&cold(0.0), 0.3).unwrap();
        let b = chi_complex(&cold(FRAC_PI_2), 5.0 - 0.3).unwrap();
        assert_abs_diff_eq!(a.re, -b.re, epsilon = 1e-12);
        assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, 1e-300, -2.5e-7, 0.1, 1.0 / 3.0, 123456.789, 1e20, -0.0] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(0.5), "0.5");
    }
}
