//! C ABI over the `darktripod` crate.
//!
//! Every fallible function returns a [`DtStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`dt_last_error`] until the next call on the same thread. Configurations
//! and pulses are opaque handles released with their `_free` function.
//!
//! The C header is generated at build time into `include/darktripod.h`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use darktripod::bloch_oracle::{evolve_to_steady, stable_step, steady_state_linear};
use darktripod::dispersion::{
    consistency_check_with, dispersion_sample_with, group_velocity_control,
    negative_velocity_threshold, ControlAngles,
};
use darktripod::model::{f_theta, g_theta};
use darktripod::propagation::{
    gain_factor, group_delay_centroid, propagate_transfer, GaussianSpec, MediumSlab, PulseEnvelope,
};
use darktripod::susceptibility::{chi_with, local_field_epsilon, Channels};
use darktripod::{config, Error, ErrorKind, SystemConfig, C64};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    PhysicsDomain = 3,
    NotConverged = 4,
    Io = 5,
    Panic = 6,
}

/// Which resonances contribute to the susceptibility.
pub const DT_CHANNELS_BOTH: c_int = 0;
/// Only the `|1> -> |4>` resonance.
pub const DT_CHANNELS_PROBE: c_int = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DtComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for DtComplex {
    fn from(c: C64) -> Self {
        DtComplex { re: c.re, im: c.im }
    }
}

impl From<DtComplex> for C64 {
    fn from(c: DtComplex) -> Self {
        C64::new(c.re, c.im)
    }
}

/// Optical coherences of the probe and control transitions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DtCoherences {
    pub rho41: DtComplex,
    pub rho31: DtComplex,
    pub rho42: DtComplex,
    pub rho32: DtComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DtDispersion {
    pub n: f64,
    pub dn_dnu: f64,
    pub n_group: f64,
    /// `0` when the group index vanishes.
    pub has_vg: c_int,
    pub vg_over_c: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DtConsistency {
    pub tan2phi: f64,
    pub vg_control: f64,
    pub vg_dispersion: f64,
    pub rel_error: f64,
}

/// Opaque system configuration.
pub struct DtConfig(SystemConfig);

/// Opaque pulse envelope.
pub struct DtPulse(PulseEnvelope);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> DtStatus {
    match e.kind() {
        ErrorKind::BadArgument => DtStatus::InvalidArgument,
        ErrorKind::PhysicsDomain => DtStatus::PhysicsDomain,
        ErrorKind::NonConvergence => DtStatus::NotConverged,
        ErrorKind::Io => DtStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
    NotConverged(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DtStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            DtStatus::NullPointer
        }
        Ok(Err(Failure::NotConverged(msg))) => {
            set_last_error(msg);
            DtStatus::NotConverged
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            DtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::InvalidParameter(format!("{what} is not UTF-8"))))
}

fn channels(c: c_int) -> Result<Channels, Failure> {
    match c {
        DT_CHANNELS_BOTH => Ok(Channels::Both),
        DT_CHANNELS_PROBE => Ok(Channels::ProbeResonance),
        other => Err(Failure::Lib(Error::InvalidParameter(format!("unknown channel selector {other}")))),
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn dt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Cold-gas defaults (`K = 1`, `Omega_C = 2`, `omega21 = 5`, `theta = 0`).
#[no_mangle]
pub extern "C" fn dt_config_new() -> *mut DtConfig {
    Box::into_raw(Box::new(DtConfig(SystemConfig::cold_gas())))
}

/// Dense-gas defaults (`K = 10`).
#[no_mangle]
pub extern "C" fn dt_config_new_dense() -> *mut DtConfig {
    Box::into_raw(Box::new(DtConfig(SystemConfig::dense_gas())))
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dt_config_load(path: *const c_char, out: *mut *mut DtConfig) -> DtStatus {
    guard(|| {
        let path = c_str(path, "path")?;
        let out = deref_mut(out, "out")?;
        *out = Box::into_raw(Box::new(DtConfig(config::load(path)?)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from a `dt_config_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dt_config_free(cfg: *mut DtConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets one parameter by its configuration-file key (`K`, `Omega_C`, ...).
/// The configuration is left unchanged if the result would be invalid.
///
/// # Safety
/// `cfg` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dt_config_set(cfg: *mut DtConfig, key: *const c_char, value: f64) -> DtStatus {
    guard(|| {
        let cfg = deref_mut(cfg, "cfg")?;
        let key = c_str(key, "key")?;
        let mut next = cfg.0;
        if !config::set_value(&mut next, key, value) {
            return Err(Error::InvalidParameter(format!("unknown key `{key}`")).into());
        }
        next.validate()?;
        cfg.0 = next;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle, `key` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dt_config_get(cfg: *const DtConfig, key: *const c_char, out: *mut f64) -> DtStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let key = c_str(key, "key")?;
        *deref_mut(out, "out")? = config::get_value(&cfg.0, key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown key `{key}`")))?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn dt_f_theta(theta: f64) -> f64 {
    f_theta(theta)
}

#[no_mangle]
pub extern "C" fn dt_g_theta(theta: f64) -> f64 {
    g_theta(theta)
}

#[no_mangle]
pub extern "C" fn dt_negative_velocity_threshold() -> f64 {
    negative_velocity_threshold()
}

/// Group velocity in units of `c` from the control law.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dt_group_velocity(theta: f64, tan2phi: f64, out: *mut f64) -> DtStatus {
    guard(|| {
        *deref_mut(out, "out")? = group_velocity_control(ControlAngles::new(theta, tan2phi)?)?;
        Ok(())
    })
}

/// Probe susceptibility at detuning `delta1`.
///
/// # Safety
/// `cfg` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dt_chi(
    cfg: *const DtConfig,
    delta1: f64,
    channel: c_int,
    out: *mut DtComplex,
) -> DtStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        *deref_mut(out, "out")? = chi_with(&cfg.0, channels(channel)?, delta1)?.into();
        Ok(())
    })
}

/// Evaluates the susceptibility on `n` detunings. Points on a resonance pole
/// get `valid[i] = 0` and a zero value; other errors abort the scan.
///
/// # Safety
/// `grid`, `out` and `valid` must each point to `n` elements.
#[no_mangle]
pub unsafe extern "C" fn dt_chi_scan(
    cfg: *const DtConfig,
    grid: *const f64,
    n: usize,
    channel: c_int,
    out: *mut DtComplex,
    valid: *mut u8,
) -> DtStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        if grid.is_null() || out.is_null() || valid.is_null() {
            return Err(Failure::Null("grid/out/valid"));
        }
        let grid = std::slice::from_raw_parts(grid, n);
        let out = std::slice::from_raw_parts_mut(out, n);
        let valid = std::slice::from_raw_parts_mut(valid, n);
        let ch = channels(channel)?;
        for i in 0..n {
            match chi_with(&cfg.0, ch, grid[i]) {
                Ok(c) => {
                    out[i] = c.into();
                    valid[i] = 1;
                }
                Err(Error::DressedStatePole) => {
                    out[i] = DtComplex::default();
                    valid[i] = 0;
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(())
    })
}

/// Local-field corrected `eps - 1` for a bare susceptibility.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dt_local_field(chi: DtComplex, out: *mut DtComplex) -> DtStatus {
    guard(|| {
        *deref_mut(out, "out")? = local_field_epsilon(chi.into())?.into();
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dt_dispersion(
    cfg: *const DtConfig,
    delta1: f64,
    h: f64,
    channel: c_int,
    out: *mut DtDispersion,
) -> DtStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let s = dispersion_sample_with(&cfg.0, channels(channel)?, delta1, h)?;
        *deref_mut(out, "out")? = DtDispersion {
            n: s.n,
            dn_dnu: s.dn_dnu,
            n_group: s.n_group,
            has_vg: c_int::from(s.vg_over_c.is_some()),
            vg_over_c: s.vg_over_c.unwrap_or(0.0),
        };
        Ok(())
    })
}

/// Control law against dispersive group velocity at line centre.
///
/// # Safety
/// `cfg` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dt_consistency(
    cfg: *const DtConfig,
    h: f64,
    channel: c_int,
    out: *mut DtConsistency,
) -> DtStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let c = consistency_check_with(&cfg.0, channels(channel)?, h)?;
        *deref_mut(out, "out")? = DtConsistency {
            tan2phi: c.tan2phi,
            vg_control: c.vg_control,
            vg_dispersion: c.vg_dispersion,
            rel_error: c.rel_error,
        };
        Ok(())
    })
}

fn coherences(s: &darktripod::bloch_oracle::BlochState) -> DtCoherences {
    DtCoherences {
        rho41: s.rho41.into(),
        rho31: s.rho31.into(),
        rho42: s.rho42.into(),
        rho32: s.rho32.into(),
    }
}

/// Steady state of the coherence equations by direct linear solve.
///
/// # Safety
/// `cfg` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dt_steady_state(
    cfg: *const DtConfig,
    omega_p: f64,
    delta1: f64,
    out: *mut DtCoherences,
) -> DtStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        *deref_mut(out, "out")? = coherences(&steady_state_linear(&cfg.0, omega_p, delta1)?);
        Ok(())
    })
}

/// Time-integrates from zero coherences until stationary or `t_max`.
/// Returns `NotConverged` (with `out` filled) if the state is still moving.
///
/// # Safety
/// `cfg` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dt_evolve(
    cfg: *const DtConfig,
    omega_p: f64,
    delta1: f64,
    t_max: f64,
    out: *mut DtCoherences,
) -> DtStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let out = deref_mut(out, "out")?;
        let ev = evolve_to_steady(&cfg.0, omega_p, delta1, stable_step(&cfg.0, delta1), t_max)?;
        *out = coherences(&ev.state);
        if !ev.converged {
            return Err(Failure::NotConverged(format!(
                "not stationary at t = {} (rate {})",
                ev.t_final, ev.rate
            )));
        }
        Ok(())
    })
}

/// Gaussian envelope `peak * exp(-t^2 / (2 sigma_t^2))` on `points` samples
/// spanning `±span_sigmas * sigma_t`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dt_pulse_gaussian(
    sigma_t: f64,
    points: usize,
    span_sigmas: f64,
    peak: f64,
    carrier_delta1: f64,
    out: *mut *mut DtPulse,
) -> DtStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let spec = GaussianSpec {
            sigma_t,
            points,
            span_sigmas,
            peak,
            carrier_delta1,
        };
        *out = Box::into_raw(Box::new(DtPulse(PulseEnvelope::gaussian(&spec)?)));
        Ok(())
    })
}

/// # Safety
/// `pulse` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dt_pulse_free(pulse: *mut DtPulse) {
    if !pulse.is_null() {
        drop(Box::from_raw(pulse));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `pulse` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dt_pulse_len(pulse: *const DtPulse) -> usize {
    pulse.as_ref().map_or(0, |p| p.0.len())
}

/// Start time and sample spacing.
///
/// # Safety
/// `pulse` must be a live handle; `t0` and `dt` valid.
#[no_mangle]
pub unsafe extern "C" fn dt_pulse_time_axis(pulse: *const DtPulse, t0: *mut f64, dt: *mut f64) -> DtStatus {
    guard(|| {
        let p = &deref(pulse, "pulse")?.0;
        *deref_mut(t0, "t0")? = p.t0;
        *deref_mut(dt, "dt")? = p.dt;
        Ok(())
    })
}

/// Copies the envelope samples into `buf`, which must hold `n >= len`.
///
/// # Safety
/// `pulse` must be a live handle and `buf` point to `n` elements.
#[no_mangle]
pub unsafe extern "C" fn dt_pulse_samples(pulse: *const DtPulse, buf: *mut DtComplex, n: usize) -> DtStatus {
    guard(|| {
        let p = &deref(pulse, "pulse")?.0;
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        if n < p.len() {
            return Err(Error::InvalidParameter(format!("buffer holds {n}, need {}", p.len())).into());
        }
        let buf = std::slice::from_raw_parts_mut(buf, p.len());
        for (dst, src) in buf.iter_mut().zip(&p.amplitude) {
            *dst = (*src).into();
        }
        Ok(())
    })
}

/// Spectral propagation through a slab of length `length` (units of
/// `c/gamma`). The output is in the vacuum-retarded frame.
///
/// # Safety
/// `pulse` and `cfg` must be live handles and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dt_propagate(
    pulse: *const DtPulse,
    cfg: *const DtConfig,
    length: f64,
    local_field: c_int,
    channel: c_int,
    out: *mut *mut DtPulse,
) -> DtStatus {
    guard(|| {
        let pulse = &deref(pulse, "pulse")?.0;
        let cfg = deref(cfg, "cfg")?.0;
        let out = deref_mut(out, "out")?;
        let slab = MediumSlab::new(cfg, length)
            .with_local_field(local_field != 0)
            .with_channels(channels(channel)?);
        *out = Box::into_raw(Box::new(DtPulse(propagate_transfer(pulse, &slab)?)));
        Ok(())
    })
}

/// Centroid delay of `output` relative to `input`, and the energy ratio.
///
/// # Safety
/// Both handles must be live; `delay` and `gain` valid.
#[no_mangle]
pub unsafe extern "C" fn dt_pulse_compare(
    input: *const DtPulse,
    output: *const DtPulse,
    delay: *mut f64,
    gain: *mut f64,
) -> DtStatus {
    guard(|| {
        let a = &deref(input, "input")?.0;
        let b = &deref(output, "output")?.0;
        let d = group_delay_centroid(a, b)?;
        let g = gain_factor(a, b)?;
        *deref_mut(delay, "delay")? = d;
        *deref_mut(gain, "gain")? = g;
        Ok(())
    })
}
