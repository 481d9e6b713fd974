//! Brute-force steady state of the probe coherences.
//!
//! The four slowly varying coherences `x = (rho41, rho31, rho42, rho32)` obey
//! a linear system `dx/dt = A x + b` once the ground manifold is frozen in the
//! prepared dark state:
//!
//! ```text
//! d rho41 = -(i D1 + gamma41) rho41 + (i/2) Omega_C rho31 + (i/2) Omega_P (rho11 + rho21)
//! d rho31 = -i (D1 - D_C) rho31 + (i/2) Omega_C rho41
//! d rho42 = -(i D2 + gamma42) rho42 + (i/2) Omega_C rho32 + (i/2) Omega_P (rho22 + rho12)
//! d rho32 = -i (D2 - D_C) rho32 + (i/2) Omega_C rho42
//! ```
//!
//! The steady state is found either by a dense LU solve of `A x = -b` or by
//! integrating from `x = 0` with the classical fourth-order Runge–Kutta
//! scheme until the state stops moving. Neither route uses the closed form.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DarkStatePrep, SystemConfig};
use crate::susceptibility::POLE_TOLERANCE;
use crate::C64;

/// Largest coherence change per unit time accepted as stationary.
pub const CONVERGENCE_RATE: f64 = 1e-10;

type State = Vector4<C64>;
type Generator = Matrix4<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochState {
    pub rho41: C64,
    pub rho31: C64,
    pub rho42: C64,
    pub rho32: C64,
    pub prep: DarkStatePrep,
}

impl BlochState {
    fn from_vector(x: &State, prep: DarkStatePrep) -> Self {
        BlochState {
            rho41: x[0],
            rho31: x[1],
            rho42: x[2],
            rho32: x[3],
            prep,
        }
    }

    pub fn coherences(&self) -> [C64; 4] {
        [self.rho41, self.rho31, self.rho42, self.rho32]
    }

    /// Largest coherence modulus.
    pub fn max_norm(&self) -> f64 {
        self.coherences().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coherences().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Result of [`evolve_to_steady`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evolution {
    pub state: BlochState,
    pub converged: bool,
    /// Integration time reached, in `1/gamma`.
    pub t_final: f64,
    /// Coherence change per unit time at `t_final`.
    pub rate: f64,
}

fn i_half(x: f64) -> C64 {
    C64::new(0.0, x / 2.0)
}

/// Generator `A` and drive `b` of the coherence equations.
fn assemble(cfg: &SystemConfig, omega_p: f64, delta1: f64) -> (Generator, State, DarkStatePrep) {
    let prep = cfg.prep();
    let delta2 = cfg.delta2(delta1);
    let zero = C64::new(0.0, 0.0);
    let couple = i_half(cfg.omega_c);
    let mut a = Generator::from_element(zero);
    a[(0, 0)] = -C64::new(cfg.gamma41, delta1);
    a[(0, 1)] = couple;
    a[(1, 0)] = couple;
    a[(1, 1)] = C64::new(0.0, -(delta1 - cfg.delta_c));
    a[(2, 2)] = -C64::new(cfg.gamma42, delta2);
    a[(2, 3)] = couple;
    a[(3, 2)] = couple;
    a[(3, 3)] = C64::new(0.0, -(delta2 - cfg.delta_c));
    let b = State::new(
        i_half(omega_p) * prep.source41(),
        zero,
        i_half(omega_p) * prep.source42(),
        zero,
    );
    (a, b, prep)
}

fn block_determinant(a: &Generator, first: usize) -> C64 {
    let (i, j) = (first, first + 1);
    a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)]
}

/// Steady state by direct linear solve of the full 4x4 system.
pub fn steady_state_linear(cfg: &SystemConfig, omega_p: f64, delta1: f64) -> Result<BlochState> {
    cfg.check_domain()?;
    check_probe(omega_p)?;
    let (a, b, prep) = assemble(cfg, omega_p, delta1);
    if block_determinant(&a, 0).norm() < POLE_TOLERANCE
        || block_determinant(&a, 2).norm() < POLE_TOLERANCE
    {
        return Err(Error::DressedStatePole);
    }
    let x = a.lu().solve(&(-b)).ok_or(Error::DressedStatePole)?;
    Ok(BlochState::from_vector(&x, prep))
}

fn check_probe(omega_p: f64) -> Result<()> {
    if !omega_p.is_finite() {
        return Err(Error::invalid("probe Rabi frequency must be finite"));
    }
    Ok(())
}

/// Step size satisfying the explicit-integrator stability bound
/// `dt <= 0.01 / max(gamma41, gamma42, Omega_C, |D1|, |D2|)`.
pub fn stable_step(cfg: &SystemConfig, delta1: f64) -> f64 {
    let fastest = [
        cfg.gamma41,
        cfg.gamma42,
        cfg.omega_c,
        delta1.abs(),
        cfg.delta2(delta1).abs(),
        (delta1 - cfg.delta_c).abs(),
        (cfg.delta2(delta1) - cfg.delta_c).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if fastest > 0.0 {
        0.01 / fastest
    } else {
        0.01
    }
}

fn rk4_step(x: &State, dt: f64, a: &Generator, b: &State) -> State {
    let rhs = |y: &State| a * y + b;
    let k1 = rhs(x);
    let k2 = rhs(&(x + k1 * C64::from(dt / 2.0)));
    let k3 = rhs(&(x + k2 * C64::from(dt / 2.0)));
    let k4 = rhs(&(x + k3 * C64::from(dt)));
    x + (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(dt / 6.0)
}

fn max_abs(x: &State) -> f64 {
    x.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn finite(x: &State) -> bool {
    x.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Integrates from all-zero coherences with fixed-step RK4 of size `dt`.
///
/// One RK4 step of a linear system is an affine map `x -> M x + c`, so
/// `2^k` consecutive steps are the affine map obtained by squaring it `k`
/// times. The integration advances in these doubling spans, which reaches
/// the long horizons needed by weakly damped Raman coherences in a few dozen
/// matrix products. Every state visited is an ordinary RK4 iterate.
///
/// Integration stops once a span no longer changes the state (to rounding)
/// or the next span would pass `t_max`. The result is converged when the
/// coherence change per unit time is below [`CONVERGENCE_RATE`].
pub fn evolve_to_steady(
    cfg: &SystemConfig,
    omega_p: f64,
    delta1: f64,
    dt: f64,
    t_max: f64,
) -> Result<Evolution> {
    cfg.check_domain()?;
    check_probe(omega_p)?;
    if !(dt > 0.0 && dt.is_finite()) || t_max.is_nan() || t_max < 0.0 {
        return Err(Error::invalid("need dt > 0 and t_max >= 0"));
    }
    let (a, b, prep) = assemble(cfg, omega_p, delta1);
    let zero = State::zeros();
    let c = rk4_step(&zero, dt, &a, &b);
    let mut m = Generator::zeros();
    for j in 0..4 {
        let mut e = State::zeros();
        e[j] = C64::new(1.0, 0.0);
        m.set_column(j, &(rk4_step(&e, dt, &a, &b) - c));
    }
    let rate_at = |x: &State| max_abs(&(rk4_step(x, dt, &a, &b) - x)) / dt;

    let mut x = zero;
    let mut t = 0.0;
    let (mut span_map, mut span_shift, mut span) = (m, c, dt);
    while t + span <= t_max {
        let next = span_map * x + span_shift;
        if !finite(&next) {
            return Err(Error::Diverged);
        }
        let moved = max_abs(&(next - x));
        x = next;
        t += span;
        if moved <= 4.0 * f64::EPSILON * max_abs(&x) {
            break;
        }
        span_shift = span_map * span_shift + span_shift;
        span_map = span_map * span_map;
        span *= 2.0;
        if !finite(&span_shift) || span_map.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Diverged);
        }
    }
    let rate = rate_at(&x);
    if !rate.is_finite() {
        return Err(Error::Diverged);
    }
    Ok(Evolution {
        state: BlochState::from_vector(&x, prep),
        converged: rate < CONVERGENCE_RATE,
        t_final: t,
        rate,
    })
}

/// Plain step-by-step RK4 integration over `[0, t]`. Reference path for the
/// doubling scheme used by [`evolve_to_steady`].
pub fn integrate(cfg: &SystemConfig, omega_p: f64, delta1: f64, dt: f64, steps: usize) -> Result<BlochState> {
    cfg.check_domain()?;
    check_probe(omega_p)?;
    let (a, b, prep) = assemble(cfg, omega_p, delta1);
    let mut x = State::zeros();
    for _ in 0..steps {
        x = rk4_step(&x, dt, &a, &b);
        if !finite(&x) {
            return Err(Error::Diverged);
        }
    }
    Ok(BlochState::from_vector(&x, prep))
}

/// Susceptibility carried by a coherence state: `2 K (rho41 + rho42) / Omega_P`.
pub fn chi_from_state(state: &BlochState, omega_p: f64, k: f64) -> Result<C64> {
    if omega_p == 0.0 || !omega_p.is_finite() {
        return Err(Error::invalid("probe Rabi frequency must be finite and nonzero"));
    }
    Ok(2.0 * k * (state.rho41 + state.rho42) / omega_p)
}
