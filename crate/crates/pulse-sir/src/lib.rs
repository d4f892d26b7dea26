//! Pulse-vaccinated SIR dynamics.
//!
//! An SIR model with logistic growth of the susceptibles, periodic pulse
//! vaccination (a fraction `p` of susceptibles is moved to the recovered
//! class every `T` time units) and optional seasonal forcing of the
//! transmission rate.
//!
//! The crate provides three layers that cross-check one another:
//!
//! * [`closedform`] — everything that is known analytically: the logistic
//!   solution between pulses, the stroboscopic maps and their fixed points,
//!   the disease-free periodic orbit, threshold curves `p1(T)`/`p2(T)` and
//!   their inverses, reproduction numbers, Floquet multipliers and the
//!   five-region classification of the `(T, p)` parameter plane.
//! * [`integrator`] — event-exact impulsive integration of the flow
//!   (pulses land on exact grid times, never interpolated across), plus the
//!   variational flow used for numeric monodromy matrices and Lyapunov
//!   exponents.
//! * [`analysis`] — empirical machinery: ω-limit classification, parameter
//!   plane sweeps, endemic-orbit location, largest-Lyapunov-exponent
//!   estimation, Poincaré sections of the suspended system and permanence
//!   bounds.
//!
//! The `pulse-sir` binary exposes the same operations as subcommands with
//! CSV/JSON output; see the crate examples for library-level usage.

// Validations use the negated form `!(x > 0.0)` on purpose: it sends NaN
// down the rejection path, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod closedform;
pub mod error;
pub mod integrator;
pub mod model;
pub mod quad;

pub use error::{Error, Result};
pub use model::{ModelParams, SeasonalForcing, State};
