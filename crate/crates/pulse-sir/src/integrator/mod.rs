//! Event-exact impulsive integration.
//!
//! Pulse times are known a priori (`t = nT`), so no event detection is
//! needed: the adaptive stepper clamps its step onto the next pulse or
//! dense-output time and lands there exactly. At each pulse the trajectory
//! stores a double sample — the left limit and the post-jump value share
//! the same `t = nT`.

mod rk;
mod variational;

pub use variational::{
    integrate_with_tangent, monodromy_numeric, TangentState, TangentStream,
};

pub(crate) use rk::{time_resolution, Dopri5};

use crate::error::{Error, Result};
use crate::model::{ModelParams, State};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Roundoff undershoot below this magnitude is clamped to zero; anything
/// more negative aborts the run.
const NEGATIVE_CLAMP_TOL: f64 = 1e-8;
/// Clamping this often indicates a mis-configured run, not roundoff.
const MAX_CLAMP_EVENTS: usize = 1000;

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step; additionally clamped to `T/4` at run time so
    /// no step can straddle a pulse even before landing logic applies.
    pub max_step: f64,
    /// Sampling interval for stored trajectory points (pulse double-samples
    /// are always stored on top). Set it to the horizon to keep only pulses.
    pub dense_output_dt: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: f64::INFINITY,
            dense_output_dt: 0.1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::InvalidParams(format!(
                "rel_tol must lie in (0, 1e-2], got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol <= 1e-2) {
            return Err(Error::InvalidParams(format!(
                "abs_tol must lie in (0, 1e-2], got {}",
                self.abs_tol
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidParams(format!(
                "max_step must be positive, got {}",
                self.max_step
            )));
        }
        if !(self.dense_output_dt > 0.0) {
            return Err(Error::InvalidParams(format!(
                "dense_output_dt must be positive, got {}",
                self.dense_output_dt
            )));
        }
        Ok(())
    }

    /// Convenience: same tolerances, but only pulse samples are stored.
    pub fn strobe_only(mut self) -> Self {
        self.dense_output_dt = f64::INFINITY;
        self
    }
}

/// How a stored sample relates to the pulse schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleKind {
    Interior,
    /// Left limit at a pulse instant.
    PreImpulse,
    /// Post-jump value at a pulse instant.
    PostImpulse,
}

/// Time-ordered samples of the impulsive flow with pulse events marked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<State>,
    /// Phase samples of the suspended system, parallel to `samples`;
    /// `None` for runs of the plain system.
    pub thetas: Option<Vec<f64>>,
    /// Indices of the pre-jump samples; index + 1 is the matching post-jump
    /// sample at the same time.
    pub impulse_pre_indices: Vec<usize>,
    pub params: ModelParams,
    /// Roundoff clamp events (negative undershoot snapped to zero).
    pub clamp_events: usize,
    /// Initial condition lay outside the trapping region (soft warning).
    pub started_outside_region: bool,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.samples.last().expect("trajectory has samples")
    }

    /// Post-jump stroboscopic samples, i.e. the states right after each
    /// pulse.
    pub fn strobe_post(&self) -> impl Iterator<Item = &State> + '_ {
        self.impulse_pre_indices.iter().map(|&i| &self.samples[i + 1])
    }

    pub fn kind(&self, idx: usize) -> SampleKind {
        match self.impulse_pre_indices.binary_search(&idx) {
            Ok(_) => SampleKind::PreImpulse,
            Err(pos) => {
                if pos > 0 && self.impulse_pre_indices[pos - 1] + 1 == idx {
                    SampleKind::PostImpulse
                } else {
                    SampleKind::Interior
                }
            }
        }
    }

    /// Timespan covered by the samples.
    pub fn span(&self) -> (f64, f64) {
        (self.samples[0].t, self.last().t)
    }
}

/// Integrates the full `(S, I, R)` system from `initial` until `t_end`,
/// applying the vaccination jump at every pulse instant in
/// `(initial.t, t_end]`. Seasonal forcing (if `gamma > 0`) is evaluated at
/// phase `omega * t`.
pub fn integrate(
    params: &ModelParams,
    config: &IntegratorConfig,
    initial: State,
    t_end: f64,
) -> Result<Trajectory> {
    integrate_impl(params, config, initial, None, t_end)
}

/// Integrates the suspended system `(S, I, R, theta)` with
/// `theta = (theta0 + omega t) mod 2π`. The forcing is evaluated at the
/// suspended phase, so `theta0` shifts the season; pulses leave `theta`
/// untouched. With `gamma = 0` the `(S, I, R)` marginals coincide with
/// [`integrate`].
pub fn integrate_suspended(
    params: &ModelParams,
    config: &IntegratorConfig,
    initial: State,
    theta0: f64,
    t_end: f64,
) -> Result<Trajectory> {
    integrate_impl(params, config, initial, Some(theta0), t_end)
}

fn integrate_impl(
    params: &ModelParams,
    config: &IntegratorConfig,
    initial: State,
    theta0: Option<f64>,
    t_end: f64,
) -> Result<Trajectory> {
    params.validate()?;
    config.validate()?;
    if !(initial.s.is_finite() && initial.i.is_finite() && initial.r.is_finite()) {
        return Err(Error::Domain("non-finite initial state".into()));
    }
    if t_end <= initial.t {
        return Err(Error::Domain(format!(
            "t_end = {t_end} must exceed initial time {}",
            initial.t
        )));
    }

    let period = params.period;
    let max_step = config.max_step.min(period / 4.0);
    let started_outside_region = !params.in_trapping_region(&initial, 1e-9);

    let rhs = |t: f64, y: &[f64; 3]| -> [f64; 3] {
        let beta = match theta0 {
            None => params.beta_gamma(t),
            Some(th0) => params.beta_at_phase(th0 + params.omega * t),
        };
        let (ds, di, dr) = params.rhs_with_beta(beta, y[0], y[1], y[2]);
        [ds, di, dr]
    };
    let mut driver = Dopri5::new(
        rhs,
        initial.t,
        [initial.s, initial.i, initial.r],
        config.rel_tol,
        config.abs_tol,
        max_step,
    );

    let theta_at = |t: f64| theta0.map(|th0| (th0 + params.omega * t).rem_euclid(TAU));

    let mut samples: Vec<State> = Vec::new();
    let mut thetas: Vec<f64> = Vec::new();
    let mut impulse_pre_indices = Vec::new();
    let mut clamp_events = 0usize;

    let push = |samples: &mut Vec<State>, thetas: &mut Vec<f64>, st: State| {
        if let Some(th) = theta_at(st.t) {
            thetas.push(th);
        }
        samples.push(st);
    };

    push(&mut samples, &mut thetas, initial);

    let mut pulse_n = first_pulse_after(initial.t, period);
    let mut sample_k = 1u64;

    loop {
        let resolution = time_resolution(driver.t);
        if driver.t >= t_end - resolution {
            break;
        }
        let t_pulse = pulse_n as f64 * period;
        let t_sample = if config.dense_output_dt.is_finite() {
            initial.t + sample_k as f64 * config.dense_output_dt
        } else {
            f64::INFINITY
        };
        let target = t_end.min(t_pulse).min(t_sample);
        driver.advance_to(target)?;

        clamp_negative_undershoot(&mut driver, &mut clamp_events)?;

        let tol = time_resolution(target);
        let at_pulse = (t_pulse - target).abs() <= tol && t_pulse <= t_end + tol;
        let at_sample = (t_sample - target).abs() <= tol;
        let at_end = (t_end - target).abs() <= tol;

        if at_pulse {
            // Land bit-exactly on nT for the stored double sample.
            driver.force_time(t_pulse);
            let pre = State::new(driver.y[0], driver.y[1], driver.y[2], t_pulse);
            impulse_pre_indices.push(samples.len());
            push(&mut samples, &mut thetas, pre);
            let post = params.apply_impulse(&pre);
            driver.set_state([post.s, post.i, post.r]);
            push(&mut samples, &mut thetas, post);
            pulse_n += 1;
        }
        if at_sample {
            if !at_pulse {
                push(
                    &mut samples,
                    &mut thetas,
                    State::new(driver.y[0], driver.y[1], driver.y[2], driver.t),
                );
            }
            sample_k += 1;
        }
        if at_end && !at_pulse && !at_sample {
            push(
                &mut samples,
                &mut thetas,
                State::new(driver.y[0], driver.y[1], driver.y[2], driver.t),
            );
        }
        if at_end {
            break;
        }
    }

    Ok(Trajectory {
        samples,
        thetas: theta0.map(|_| thetas),
        impulse_pre_indices,
        params: params.clone(),
        clamp_events,
        started_outside_region,
    })
}

/// Index of the first pulse strictly after `t0` (a start sitting on a pulse
/// time, up to the local time resolution, counts as post-jump). Plain
/// `floor(t0 / T) + 1` mis-rounds when `t0` is an exact multiple of `T`,
/// which would re-apply the jump at the start of a chained run.
pub(crate) fn first_pulse_after(t0: f64, period: f64) -> u64 {
    let mut n = (t0 / period).floor().max(0.0) as u64;
    let resolution = time_resolution(t0);
    while n as f64 * period <= t0 + resolution {
        n += 1;
    }
    while n > 1 && (n - 1) as f64 * period > t0 + resolution {
        n -= 1;
    }
    n
}

fn clamp_negative_undershoot<const N: usize, F>(
    driver: &mut Dopri5<N, F>,
    clamp_events: &mut usize,
) -> Result<()>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut y = driver.y;
    let mut changed = false;
    for v in y.iter_mut() {
        if *v < 0.0 {
            if *v > -NEGATIVE_CLAMP_TOL {
                *v = 0.0;
                *clamp_events += 1;
                changed = true;
            } else {
                return Err(Error::Integration {
                    reason: format!(
                        "state escaped the non-negative domain ({v:.3e} < -{NEGATIVE_CLAMP_TOL:.0e})"
                    ),
                    t: driver.t,
                    last_state: driver.y.to_vec(),
                });
            }
        }
    }
    if changed {
        if *clamp_events > MAX_CLAMP_EVENTS {
            return Err(Error::Integration {
                reason: format!(
                    "more than {MAX_CLAMP_EVENTS} negative-undershoot clamps; tolerances too loose for this run"
                ),
                t: driver.t,
                last_state: driver.y.to_vec(),
            });
        }
        driver.set_state(y);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform;

    fn baseline(p: f64) -> ModelParams {
        ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(p, 4.0)
    }

    #[test]
    fn matches_logistic_closed_form() {
        // p = 0, gamma = 0, I0 = 0: S follows the logistic solution.
        let m = baseline(0.0);
        let cfg = IntegratorConfig {
            dense_output_dt: 0.25,
            ..Default::default()
        };
        let s0 = 0.2;
        let traj = integrate(&m, &cfg, State::initial(s0, 0.0), 10.0).unwrap();
        let mut worst = 0.0f64;
        for st in &traj.samples {
            let exact = closedform::logistic_between_pulses(m.a, s0, st.t).unwrap();
            worst = worst.max((st.s - exact).abs());
            assert_eq!(st.i, 0.0, "I = 0 must be preserved exactly");
        }
        assert!(worst <= 1e-8, "sup-norm deviation {worst}");
    }

    #[test]
    fn strobe_converges_to_x1_star() {
        // Region 3: stroboscopic S samples converge to the fixed point.
        let m = baseline(0.8);
        let cfg = IntegratorConfig::default().strobe_only();
        let traj = integrate(&m, &cfg, State::initial(0.5, 0.4), 80.0 * m.period).unwrap();
        let x1 = closedform::fixed_points_s(&m).x1;
        let last = traj.strobe_post().last().unwrap();
        assert!((last.s - x1).abs() < 1e-6, "S(nT) = {} vs x1* = {x1}", last.s);
        assert!(last.i < 1e-6);
    }

    #[test]
    fn full_coverage_zeroes_s_at_pulses() {
        let m = baseline(1.0);
        let cfg = IntegratorConfig::default().strobe_only();
        let traj = integrate(&m, &cfg, State::initial(0.5, 0.4), 40.0).unwrap();
        for st in traj.strobe_post() {
            assert_eq!(st.s, 0.0);
        }
        assert!(traj.last().i < 1e-10);
    }

    #[test]
    fn impulse_times_are_exact() {
        let m = baseline(0.3);
        let cfg = IntegratorConfig {
            dense_output_dt: 0.7,
            ..Default::default()
        };
        let traj = integrate(&m, &cfg, State::initial(0.5, 0.4), 30.0).unwrap();
        assert_eq!(traj.impulse_pre_indices.len(), 7);
        for (n, &idx) in traj.impulse_pre_indices.iter().enumerate() {
            let expected = (n as f64 + 1.0) * m.period;
            assert_eq!(traj.samples[idx].t, expected, "pre-jump time");
            assert_eq!(traj.samples[idx + 1].t, expected, "post-jump time");
            assert_eq!(traj.kind(idx), SampleKind::PreImpulse);
            assert_eq!(traj.kind(idx + 1), SampleKind::PostImpulse);
        }
    }

    #[test]
    fn first_pulse_after_handles_rounding() {
        // Starts exactly on a pulse count as post-jump; k*T/T rounding in
        // either direction must not shift the schedule.
        for period in [4.0, 0.5 + 7.5 / 19.0, 0.1, std::f64::consts::PI] {
            for k in 0..60u64 {
                let t0 = k as f64 * period;
                assert_eq!(first_pulse_after(t0, period), k + 1, "k={k}, T={period}");
                let t_mid = t0 + 0.37 * period;
                assert_eq!(first_pulse_after(t_mid, period), k + 1, "k={k}, T={period}");
            }
        }
        assert_eq!(first_pulse_after(0.0, 4.0), 1);
    }

    #[test]
    fn chained_chunks_match_single_run() {
        // Restarting from a stored post-jump state must not re-apply the
        // jump; T is chosen so k*T/T mis-rounds without the guard.
        let period = 0.5 + 7.5 / 19.0;
        let m = ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(0.3, period);
        let cfg = IntegratorConfig::default().strobe_only();
        let whole = integrate(&m, &cfg, State::initial(0.5, 0.4), 20.0 * period).unwrap();

        let mut chained = State::initial(0.5, 0.4);
        let mut pulses = 0;
        for chunk in 1..=4 {
            let t_end = (chunk * 5) as f64 * period;
            let traj = integrate(&m, &cfg, chained, t_end).unwrap();
            pulses += traj.impulse_pre_indices.len();
            chained = *traj.last();
        }
        assert_eq!(pulses, 20);
        assert_eq!(whole.impulse_pre_indices.len(), 20);
        let last = whole.last();
        assert!((chained.s - last.s).abs() < 1e-10);
        assert!((chained.i - last.i).abs() < 1e-10);
    }

    #[test]
    fn sample_times_monotone() {
        let m = baseline(0.3);
        let cfg = IntegratorConfig {
            dense_output_dt: 0.3,
            ..Default::default()
        };
        let traj = integrate(&m, &cfg, State::initial(0.5, 0.4), 21.0).unwrap();
        for w in traj.samples.windows(2) {
            assert!(w[1].t >= w[0].t);
        }
        // Equal times only at impulse pairs.
        let mut equal_pairs = 0;
        for w in traj.samples.windows(2) {
            if w[1].t == w[0].t {
                equal_pairs += 1;
            }
        }
        assert_eq!(equal_pairs, traj.impulse_pre_indices.len());
    }

    #[test]
    fn jump_conserves_population() {
        let m = baseline(0.4);
        let traj = integrate(
            &m,
            &IntegratorConfig::default().strobe_only(),
            State::new(0.5, 0.3, 0.1, 0.0),
            20.0,
        )
        .unwrap();
        for &idx in &traj.impulse_pre_indices {
            let pre = &traj.samples[idx];
            let post = &traj.samples[idx + 1];
            let before = pre.s + pre.i + pre.r;
            let after = post.s + post.i + post.r;
            assert!((before - after).abs() <= 1e-14 * (1.0 + before));
        }
    }

    #[test]
    fn suspended_marginals_match_plain_runs_without_forcing() {
        let m = baseline(0.3);
        let cfg = IntegratorConfig {
            dense_output_dt: 0.5,
            ..Default::default()
        };
        let plain = integrate(&m, &cfg, State::initial(0.5, 0.4), 17.0).unwrap();
        let susp = integrate_suspended(&m, &cfg, State::initial(0.5, 0.4), 0.0, 17.0).unwrap();
        assert_eq!(plain.samples.len(), susp.samples.len());
        for (a, b) in plain.samples.iter().zip(&susp.samples) {
            assert!((a.s - b.s).abs() <= 1e-10);
            assert!((a.i - b.i).abs() <= 1e-10);
        }
    }

    #[test]
    fn suspended_phase_wraps() {
        let m = baseline(0.3).with_seasonality(0.5, 6.0);
        let cfg = IntegratorConfig {
            dense_output_dt: TAU / 6.0,
            ..Default::default()
        };
        let t_end = TAU / 6.0 * 3.0;
        let traj = integrate_suspended(&m, &cfg, State::initial(0.5, 0.4), 0.0, t_end).unwrap();
        let thetas = traj.thetas.as_ref().unwrap();
        // Phase returns to 0 (mod 2π) after each full forcing period.
        for (st, &th) in traj.samples.iter().zip(thetas) {
            let cycles = st.t / (TAU / 6.0);
            if (cycles - cycles.round()).abs() < 1e-9 {
                let dist = th.min(TAU - th);
                assert!(dist < 1e-9, "theta = {th} at t = {}", st.t);
            }
        }
    }

    #[test]
    fn forced_run_stays_in_trapping_region() {
        let m = ModelParams::new(1.0, 2.0, 0.2, 0.5)
            .with_pulse(0.4, 4.0)
            .with_seasonality(0.5, 6.0);
        let cfg = IntegratorConfig {
            dense_output_dt: 0.05,
            ..Default::default()
        };
        let traj =
            integrate_suspended(&m, &cfg, State::initial(0.4074, 0.2645), 0.0, 200.0).unwrap();
        for st in &traj.samples {
            assert!(m.in_trapping_region(st, 1e-6), "escaped at t = {}", st.t);
        }
    }

    #[test]
    fn i_monotone_against_threshold() {
        // Unforced flow: dI sign follows S - S_c.
        let m = baseline(0.3);
        let cfg = IntegratorConfig {
            dense_output_dt: 0.02,
            ..Default::default()
        };
        let traj = integrate(&m, &cfg, State::initial(0.5, 0.4), 40.0).unwrap();
        let sc = m.s_c();
        let delta = 1e-6;
        for w in traj.samples.windows(2) {
            if w[0].t == w[1].t || w[0].i < 1e-12 {
                continue;
            }
            if w[0].s.max(w[1].s) < sc - delta {
                assert!(w[1].i < w[0].i, "I not decreasing at t = {}", w[0].t);
            } else if w[0].s.min(w[1].s) > sc + delta {
                assert!(w[1].i > w[0].i, "I not increasing at t = {}", w[0].t);
            }
        }
    }

    #[test]
    fn time_reversal_round_trip() {
        // gamma = 0, p = 0: forward dt then backward dt returns the start.
        let m = baseline(0.0);
        let y0 = [0.5, 0.4, 0.1];
        let fwd = |_t: f64, y: &[f64; 3]| {
            let (ds, di, dr) = m.rhs_with_beta(m.beta0, y[0], y[1], y[2]);
            [ds, di, dr]
        };
        let mut drv = Dopri5::new(fwd, 0.0, y0, 1e-10, 1e-12, 1.0);
        drv.advance_to(5.0).unwrap();
        let mid = drv.y;
        let bwd = |_t: f64, y: &[f64; 3]| {
            let (ds, di, dr) = m.rhs_with_beta(m.beta0, y[0], y[1], y[2]);
            [-ds, -di, -dr]
        };
        let mut drv2 = Dopri5::new(bwd, 0.0, mid, 1e-10, 1e-12, 1.0);
        drv2.advance_to(5.0).unwrap();
        for (back, orig) in drv2.y.iter().zip(&y0) {
            assert!((back - orig).abs() < 1e-7, "{back} vs {orig}");
        }
    }

    #[test]
    fn rejects_inverted_time() {
        let m = baseline(0.3);
        assert!(integrate(
            &m,
            &IntegratorConfig::default(),
            State::new(0.5, 0.4, 0.0, 5.0),
            2.0
        )
        .is_err());
    }

    #[test]
    fn config_validation() {
        let loose = IntegratorConfig {
            rel_tol: 0.5,
            ..Default::default()
        };
        assert!(loose.validate().is_err());
        let degenerate = IntegratorConfig {
            dense_output_dt: 0.0,
            ..Default::default()
        };
        assert!(degenerate.validate().is_err());
    }
}
