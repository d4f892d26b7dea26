//! Embedded Dormand–Prince 5(4) stepper with PI-free step control.
//!
//! The impulsive drivers land on prescribed times (pulse instants, dense
//! output points) by clamping the step, so the stepper never interpolates
//! across an event. FSAL is exploited between steps and invalidated when
//! the caller mutates the state (jumps, clamps).

use crate::error::{Error, Result};

// Dormand–Prince coefficients.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// 5th-order solution weights (also the 7th stage, FSAL).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Gap below which two landing times are treated as the same instant.
pub(crate) fn time_resolution(t: f64) -> f64 {
    16.0 * f64::EPSILON * t.abs().max(1.0)
}

pub(crate) struct Dopri5<const N: usize, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    pub t: f64,
    pub y: [f64; N],
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
    /// Suggested size for the next step.
    h: f64,
    fsal: Option<[f64; N]>,
    pub accepted: u64,
    pub rejected: u64,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(f: F, t0: f64, y0: [f64; N], rel_tol: f64, abs_tol: f64, max_step: f64) -> Self {
        Self {
            f,
            t: t0,
            y: y0,
            rel_tol,
            abs_tol,
            max_step,
            h: max_step.min(1e-3),
            fsal: None,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Replaces the state after an external modification (jump, clamp).
    pub fn set_state(&mut self, y: [f64; N]) {
        self.y = y;
        self.fsal = None;
    }

    /// Nudges the clock onto an exact landing time; the shift must be below
    /// the local time resolution.
    pub fn force_time(&mut self, t: f64) {
        debug_assert!((t - self.t).abs() <= time_resolution(t));
        if t != self.t {
            self.t = t;
            self.fsal = None;
        }
    }

    fn underflow_error(&self, h: f64) -> Error {
        Error::Integration {
            reason: format!("step size underflow (h = {h:.3e})"),
            t: self.t,
            last_state: self.y.to_vec(),
        }
    }

    /// Advances the solution to exactly `target`, adapting the step size and
    /// clamping the final step onto the target.
    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        debug_assert!(target >= self.t);
        loop {
            let remaining = target - self.t;
            if remaining <= time_resolution(target) {
                self.t = target;
                return Ok(());
            }
            let k1 = match self.fsal.take() {
                Some(k) => k,
                None => (self.f)(self.t, &self.y),
            };
            let mut h = self.h.min(self.max_step).min(remaining);
            loop {
                if h < 1e3 * f64::EPSILON * self.t.abs().max(1.0) {
                    return Err(self.underflow_error(h));
                }
                let clamped = h >= remaining;
                let (t, y) = (self.t, self.y);
                let (y_new, err, k7) = self.try_step(t, &y, &k1, h);
                if !err.is_finite() {
                    // A stage blew up; retreat hard and retry.
                    self.rejected += 1;
                    h *= 0.25;
                    continue;
                }
                if err <= 1.0 {
                    self.t = if clamped { target } else { self.t + h };
                    self.y = y_new;
                    if !self.y.iter().all(|v| v.is_finite()) {
                        return Err(Error::Integration {
                            reason: "state became non-finite".into(),
                            t: self.t,
                            last_state: self.y.to_vec(),
                        });
                    }
                    self.fsal = Some(k7);
                    self.accepted += 1;
                    let factor = if err == 0.0 {
                        MAX_FACTOR
                    } else {
                        (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                    };
                    self.h = (h * factor).min(self.max_step);
                    break;
                }
                self.rejected += 1;
                let factor = (SAFETY * err.powf(-0.2)).clamp(0.1, 0.9);
                h *= factor;
                // k1 is still f(t, y) and stays valid for the retry.
            }
        }
    }

    /// One trial step of size `h`; returns the 5th-order solution, the
    /// scaled error norm and the final stage (FSAL candidate).
    fn try_step(&mut self, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> ([f64; N], f64, [f64; N]) {
        let mut ys = [0.0; N];

        for i in 0..N {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = (self.f)(t + C2 * h, &ys);

        for i in 0..N {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = (self.f)(t + C3 * h, &ys);

        for i in 0..N {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = (self.f)(t + C4 * h, &ys);

        for i in 0..N {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = (self.f)(t + C5 * h, &ys);

        for i in 0..N {
            ys[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = (self.f)(t + h, &ys);

        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] =
                y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        let k7 = (self.f)(t + h, &y_new);

        let mut err_sq = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        (y_new, (err_sq / N as f64).sqrt(), k7)
    }
}
