//! Variational (tangent) flow: numeric monodromy matrices for Floquet
//! cross-validation and the renormalized tangent stream behind Lyapunov
//! exponent estimates.
//!
//! The linearization of the jump `S -> (1-p) S`, `I -> I` is
//! `diag(1-p, 1)`; it left-multiplies the tangent objects at every pulse.

use super::rk::Dopri5;
use super::IntegratorConfig;
use crate::closedform::{self, FloquetPair, OrbitKind};
use crate::error::{Error, Result};
use crate::model::{ModelParams, State};
use serde::{Deserialize, Serialize};

/// Fundamental 2×2 solution of the `(S, I)` variational equations attached
/// to a base point of the orbit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TangentState {
    pub base: State,
    pub matrix: [[f64; 2]; 2],
}

impl TangentState {
    /// Identity tangent at the given base point, the starting object of a
    /// monodromy computation.
    pub fn identity(base: State) -> Self {
        Self {
            base,
            matrix: [[1.0, 0.0], [0.0, 1.0]],
        }
    }
}

/// Integrates the variational equations along the requested disease-free
/// orbit over one period and applies the pulse linearization, returning the
/// monodromy matrix attached to the post-jump base point.
///
/// The Jacobian along `(S~(t), 0)` is upper triangular,
/// `[[A - 2 S~, -beta0 S~], [0, beta0 S~ - (sigma + g)]]`, so the lower-left
/// entry of the fundamental matrix stays exactly zero and the multipliers
/// are the diagonal entries.
pub fn monodromy_matrix(
    params: &ModelParams,
    config: &IntegratorConfig,
    orbit: OrbitKind,
) -> Result<TangentState> {
    params.validate()?;
    config.validate()?;
    if params.gamma != 0.0 {
        return Err(Error::Domain(
            "numeric monodromy is defined for the unforced model (gamma = 0)".into(),
        ));
    }
    let period = params.period;
    let base_s = match orbit {
        OrbitKind::Origin => 0.0,
        OrbitKind::DiseaseFreePeriodic => {
            // Existence check (p < p1) happens here.
            closedform::disease_free_phase(params, 0.0)?
        }
    };

    // Closed-form orbit value as a total function of the phase; clamping
    // absorbs end-of-interval roundoff from the stepper's stage times.
    let q = 1.0 - params.p;
    let emat = (-params.a * period).exp();
    let num = params.a * (q - emat);
    let stilde = move |t: f64| -> f64 {
        match orbit {
            OrbitKind::Origin => 0.0,
            OrbitKind::DiseaseFreePeriodic => {
                let u = t.clamp(0.0, period);
                num / (q - emat + params.p * (-params.a * u).exp())
            }
        }
    };

    let a = params.a;
    let beta0 = params.beta0;
    let decay = params.sigma + params.g;
    // State: row-major fundamental matrix [phi11, phi12, phi21, phi22].
    let rhs = move |t: f64, y: &[f64; 4]| -> [f64; 4] {
        let s = stilde(t);
        let j11 = a - 2.0 * s;
        let j12 = -beta0 * s;
        let j22 = beta0 * s - decay;
        [
            j11 * y[0] + j12 * y[2],
            j11 * y[1] + j12 * y[3],
            j22 * y[2],
            j22 * y[3],
        ]
    };

    let mut driver = Dopri5::new(
        rhs,
        0.0,
        [1.0, 0.0, 0.0, 1.0],
        config.rel_tol,
        config.abs_tol,
        config.max_step.min(period / 4.0),
    );
    driver.advance_to(period)?;
    let phi = driver.y;
    debug_assert!(phi[2].abs() < 1e-12, "triangular structure violated");

    let jump = 1.0 - params.p;
    let matrix = [[jump * phi[0], jump * phi[1]], [phi[2], phi[3]]];
    Ok(TangentState {
        base: State::new(base_s, 0.0, 0.0, 0.0),
        matrix,
    })
}

/// Floquet multipliers from the numeric monodromy matrix; the independent
/// cross-check of [`closedform::floquet_analytic`].
pub fn monodromy_numeric(
    params: &ModelParams,
    config: &IntegratorConfig,
    orbit: OrbitKind,
) -> Result<FloquetPair> {
    let m = monodromy_matrix(params, config, orbit)?.matrix;
    Ok(FloquetPair {
        lambda1: m[0][0],
        lambda2: m[1][1],
        orbit,
    })
}

/// Output of a renormalized tangent integration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentStream {
    /// `(t, ln ||v||)` at each renormalization; the time average of the
    /// increments estimates the largest Lyapunov exponent.
    pub increments: Vec<(f64, f64)>,
    pub final_base: State,
    pub final_tangent: [f64; 2],
    /// Tangent collapses that forced a reseed with a unit vector.
    pub reseeds: usize,
}

/// Evolves a tangent vector in `(S, I)` along the (possibly seasonal) flow,
/// applying `diag(1-p, 1)` at every pulse and renormalizing every
/// `renorm_every` time units.
///
/// `theta0 = Some(..)` runs the suspended system (forcing evaluated at
/// `theta0 + omega t`); `None` uses phase `omega t`.
pub fn integrate_with_tangent(
    params: &ModelParams,
    config: &IntegratorConfig,
    initial: &State,
    tangent: [f64; 2],
    theta0: Option<f64>,
    t_end: f64,
    renorm_every: f64,
) -> Result<TangentStream> {
    params.validate()?;
    config.validate()?;
    if !(renorm_every > 0.0) {
        return Err(Error::InvalidParams(format!(
            "renorm_every must be positive, got {renorm_every}"
        )));
    }
    if tangent == [0.0, 0.0] {
        return Err(Error::InvalidParams("initial tangent must be non-zero".into()));
    }
    if t_end <= initial.t {
        return Err(Error::Domain(format!(
            "t_end = {t_end} must exceed initial time {}",
            initial.t
        )));
    }

    let period = params.period;
    let a = params.a;
    let decay = params.sigma + params.g;
    let rhs = |t: f64, y: &[f64; 5]| -> [f64; 5] {
        let beta = match theta0 {
            None => params.beta_gamma(t),
            Some(th0) => params.beta_at_phase(th0 + params.omega * t),
        };
        let (s, i, r, v1, v2) = (y[0], y[1], y[2], y[3], y[4]);
        let infection = beta * i * s;
        [
            s * (a - s) - infection,
            infection - decay * i,
            params.g * i - params.mu * r,
            (a - 2.0 * s - beta * i) * v1 - beta * s * v2,
            beta * i * v1 + (beta * s - decay) * v2,
        ]
    };

    let mut driver = Dopri5::new(
        rhs,
        initial.t,
        [initial.s, initial.i, initial.r, tangent[0], tangent[1]],
        config.rel_tol,
        config.abs_tol,
        config.max_step.min(period / 4.0),
    );

    let mut increments = Vec::new();
    let mut reseeds = 0usize;
    let mut pulse_n = super::first_pulse_after(initial.t, period);
    let mut renorm_j = 1u64;

    loop {
        let resolution = super::time_resolution(driver.t);
        if driver.t >= t_end - resolution {
            break;
        }
        let t_pulse = pulse_n as f64 * period;
        let t_renorm = initial.t + renorm_j as f64 * renorm_every;
        let target = t_end.min(t_pulse).min(t_renorm);
        driver.advance_to(target)?;

        let tol = super::time_resolution(target);
        let at_pulse = (t_pulse - target).abs() <= tol && t_pulse <= t_end + tol;
        let at_renorm = (t_renorm - target).abs() <= tol;
        let at_end = (t_end - target).abs() <= tol;

        if at_pulse {
            driver.force_time(t_pulse);
            let mut y = driver.y;
            let pre_s = y[0];
            y[0] *= 1.0 - params.p;
            y[2] += params.p * pre_s;
            y[3] *= 1.0 - params.p; // jump linearization diag(1-p, 1)
            driver.set_state(y);
            pulse_n += 1;
        }
        if at_renorm || at_end {
            let mut y = driver.y;
            let norm = (y[3] * y[3] + y[4] * y[4]).sqrt();
            if norm == 0.0 {
                y[3] = 1.0;
                y[4] = 0.0;
                reseeds += 1;
                driver.set_state(y);
            } else {
                increments.push((driver.t, norm.ln()));
                y[3] /= norm;
                y[4] /= norm;
                driver.set_state(y);
            }
            if at_renorm {
                renorm_j += 1;
            }
        }
        if at_end {
            break;
        }
    }

    let y = driver.y;
    Ok(TangentStream {
        increments,
        final_base: State::new(y[0], y[1], y[2], driver.t),
        final_tangent: [y[3], y[4]],
        reseeds,
    })
}
