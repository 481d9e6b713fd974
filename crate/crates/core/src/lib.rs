//! Simulation toolkit for a four-level tripod medium whose ground manifold is
//! prepared in a coherent dark state.
//!
//! All frequencies are expressed in units of the excited-state coherence decay
//! rate `gamma`, which is numerically fixed to `1.0`. Times are in units of
//! `1/gamma` and lengths in units of `c/gamma`.
//!
//! Module map:
//!
//! * [`model`]: system parameters, mixing angle, dark-state weights and the
//!   initial density matrix.
//! * [`config`]: the flat `key = value` configuration file format.
//! * [`susceptibility`]: closed-form steady-state coherences and probe
//!   susceptibility, local-field correction, detuning scans.
//! * [`bloch_oracle`]: brute-force steady state of the coherence equations of
//!   motion (direct linear solve and time integration).
//! * [`dispersion`]: refractive index, group index and the group-velocity
//!   control law.
//! * [`propagation`]: probe-pulse transport through a slab of the medium.
//! * [`figures`]: table builders behind the command-line subcommands.

pub mod bloch_oracle;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod figures;
pub mod grid;
pub mod model;
pub mod propagation;
pub mod susceptibility;

pub use error::{Error, ErrorKind, Result};
pub use model::{DarkStatePrep, SystemConfig};

/// Complex number type used throughout the crate.
pub type C64 = num_complex::Complex64;
