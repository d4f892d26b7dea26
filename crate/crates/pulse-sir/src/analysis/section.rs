//! Poincaré sections of the suspended system.

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use std::f64::consts::{PI, TAU};

/// Crossings of the section `theta = theta_star` in the increasing-theta
/// direction, linearly interpolated between stored samples. Pulse double
/// samples are never interpolated across. Returns `(S, I)` per crossing
/// (possibly empty for short horizons).
///
/// The trajectory must come from the suspended integrator and be sampled
/// finely enough that the phase advances by less than π between samples
/// (`dense_output_dt < π / omega`).
pub fn poincare_section(traj: &Trajectory, theta_star: f64) -> Result<Vec<(f64, f64)>> {
    let thetas = traj.thetas.as_ref().ok_or_else(|| {
        Error::Domain("trajectory has no phase samples; use the suspended integrator".into())
    })?;
    if !(0.0..TAU).contains(&theta_star) {
        return Err(Error::Domain(format!(
            "theta_star must lie in [0, 2π), got {theta_star}"
        )));
    }

    let mut crossings = Vec::new();
    for k in 0..traj.samples.len() - 1 {
        let (a, b) = (&traj.samples[k], &traj.samples[k + 1]);
        if b.t <= a.t {
            continue; // pulse pair (or degenerate gap)
        }
        let mut advance = thetas[k + 1] - thetas[k];
        if advance < 0.0 {
            advance += TAU;
        }
        if advance == 0.0 {
            continue;
        }
        if advance > PI {
            return Err(Error::Domain(format!(
                "phase advances by {advance:.3} between samples at t = {}; \
                 reduce dense_output_dt below π/omega",
                a.t
            )));
        }
        let mut offset = theta_star - thetas[k];
        if offset < 0.0 {
            offset += TAU;
        }
        // Half-open (0, advance]: a sample sitting exactly on the section is
        // counted once, as the endpoint of the incoming segment.
        if offset > 0.0 && offset <= advance {
            let w = offset / advance;
            crossings.push((a.s + w * (b.s - a.s), a.i + w * (b.i - a.i)));
        }
    }
    Ok(crossings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, integrate_suspended, IntegratorConfig};
    use crate::model::{ModelParams, State};

    fn seasonal() -> ModelParams {
        ModelParams::new(1.0, 0.9, 0.2, 0.5)
            .with_pulse(0.3, 4.0)
            .with_seasonality(0.5, 6.0)
    }

    #[test]
    fn crossing_count_scales_with_horizon() {
        let m = seasonal();
        let cfg = IntegratorConfig {
            dense_output_dt: 0.05,
            ..Default::default()
        };
        let forcing_period = TAU / m.omega;
        let t1 = 40.0 * forcing_period;
        let t2 = 80.0 * forcing_period;
        let s1 = poincare_section(
            &integrate_suspended(&m, &cfg, State::initial(0.5, 0.4), 0.0, t1).unwrap(),
            2.0,
        )
        .unwrap();
        let s2 = poincare_section(
            &integrate_suspended(&m, &cfg, State::initial(0.5, 0.4), 0.0, t2).unwrap(),
            2.0,
        )
        .unwrap();
        // One crossing per forcing period; doubling the horizon doubles the
        // count (within one crossing of slack at the ends).
        assert!((s1.len() as i64 - 40).abs() <= 1, "got {}", s1.len());
        assert!((s2.len() as i64 - 80).abs() <= 1, "got {}", s2.len());
    }

    #[test]
    fn rejects_plain_trajectories() {
        let m = seasonal();
        let traj = integrate(
            &m,
            &IntegratorConfig::default(),
            State::initial(0.5, 0.4),
            10.0,
        )
        .unwrap();
        assert!(poincare_section(&traj, 2.0).is_err());
    }

    #[test]
    fn rejects_coarse_sampling() {
        let m = seasonal(); // omega = 6: need dt < π/6 ≈ 0.52
        let cfg = IntegratorConfig {
            dense_output_dt: 1.0,
            ..Default::default()
        };
        let traj = integrate_suspended(&m, &cfg, State::initial(0.5, 0.4), 0.0, 20.0).unwrap();
        assert!(poincare_section(&traj, 2.0).is_err());
    }

    #[test]
    fn rejects_out_of_range_section() {
        let m = seasonal();
        let cfg = IntegratorConfig {
            dense_output_dt: 0.05,
            ..Default::default()
        };
        let traj = integrate_suspended(&m, &cfg, State::initial(0.5, 0.4), 0.0, 5.0).unwrap();
        assert!(poincare_section(&traj, -0.1).is_err());
        assert!(poincare_section(&traj, TAU).is_err());
    }
}
