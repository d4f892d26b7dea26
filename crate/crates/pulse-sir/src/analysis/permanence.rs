//! Empirical permanence bounds: trailing minima of `S` and `I`.

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use serde::{Deserialize, Serialize};

/// Lower bounds observed over the trailing portion of a trajectory. In a
/// permanent regime both stay strictly positive and stable under doubling
/// the horizon.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PermanenceBounds {
    /// `min S` over the tail.
    pub c1: f64,
    /// `min I` over the tail.
    pub c2: f64,
    /// Pulses contained in the tail.
    pub tail_pulses: usize,
    pub tail_start: f64,
}

/// Scans the final `tail_fraction` of the trajectory's timespan.
pub fn permanence_check(traj: &Trajectory, tail_fraction: f64) -> Result<PermanenceBounds> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "tail_fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let (t0, t1) = traj.span();
    let tail_start = t1 - tail_fraction * (t1 - t0);
    let mut c1 = f64::INFINITY;
    let mut c2 = f64::INFINITY;
    for st in traj.samples.iter().filter(|st| st.t >= tail_start) {
        c1 = c1.min(st.s);
        c2 = c2.min(st.i);
    }
    let tail_pulses = traj
        .impulse_pre_indices
        .iter()
        .filter(|&&i| traj.samples[i].t >= tail_start)
        .count();
    Ok(PermanenceBounds {
        c1,
        c2,
        tail_pulses,
        tail_start,
    })
}
