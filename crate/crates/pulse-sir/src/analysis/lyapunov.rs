//! Largest-Lyapunov-exponent estimation from the renormalized tangent flow.

use crate::error::{Error, Result};
use crate::integrator::{integrate_with_tangent, IntegratorConfig};
use crate::model::{ModelParams, State};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSettings {
    /// Total integration time.
    pub horizon: f64,
    /// Renormalization interval; one pulse period is the natural choice.
    pub renorm_every: f64,
    /// Leading fraction of the horizon discarded before averaging.
    pub transient_fraction: f64,
}

impl LyapunovSettings {
    /// Horizon of `n` pulse periods, renormalizing every period, 20%
    /// transient discard.
    pub fn for_pulses(params: &ModelParams, n: usize) -> Self {
        Self {
            horizon: n as f64 * params.period,
            renorm_every: params.period,
            transient_fraction: 0.2,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidParams(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if !(self.renorm_every > 0.0) {
            return Err(Error::InvalidParams(format!(
                "renorm_every must be positive, got {}",
                self.renorm_every
            )));
        }
        if !(0.0..0.95).contains(&self.transient_fraction) {
            return Err(Error::InvalidParams(format!(
                "transient_fraction must lie in [0, 0.95), got {}",
                self.transient_fraction
            )));
        }
        Ok(())
    }
}

/// Estimate of the largest Lyapunov exponent with its convergence series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LyapunovReport {
    /// Time-averaged log-stretch after the transient discard.
    pub lambda: f64,
    /// Running average `(t, lambda_estimate(t))` for convergence inspection.
    pub series: Vec<(f64, f64)>,
    pub reseeds: usize,
    pub horizon: f64,
    /// Time span actually averaged over (horizon minus transient).
    pub averaged_span: f64,
}

/// Runs the tangent flow over `settings.horizon` starting at `initial`
/// (`theta0` selects the suspended seasonal system) and averages the
/// post-transient log-stretch increments.
pub fn lyapunov_max(
    params: &ModelParams,
    config: &IntegratorConfig,
    initial: State,
    theta0: Option<f64>,
    settings: &LyapunovSettings,
) -> Result<LyapunovReport> {
    settings.validate()?;
    let t_end = initial.t + settings.horizon;
    let stream = integrate_with_tangent(
        params,
        config,
        &initial,
        [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        theta0,
        t_end,
        settings.renorm_every,
    )?;

    let t_cut = initial.t + settings.transient_fraction * settings.horizon;
    let mut sum = 0.0;
    let mut base_t = None;
    let mut prev_t = initial.t;
    let mut series = Vec::new();
    for &(t, increment) in &stream.increments {
        if t > t_cut {
            if base_t.is_none() {
                base_t = Some(prev_t);
            }
            sum += increment;
            let span = t - base_t.unwrap();
            if span > 0.0 {
                series.push((t, sum / span));
            }
        }
        prev_t = t;
    }
    let base = base_t.ok_or_else(|| {
        Error::Convergence {
            context: "no tangent increments past the transient; horizon too short".into(),
            residual: f64::INFINITY,
            iterations: 0,
        }
    })?;
    let last_t = stream.increments.last().map(|&(t, _)| t).unwrap_or(t_end);
    let averaged_span = last_t - base;
    Ok(LyapunovReport {
        lambda: sum / averaged_span,
        series,
        reseeds: stream.reseeds,
        horizon: settings.horizon,
        averaged_span,
    })
}
