//! Endemic periodic orbit location (region 4).
//!
//! The orbit has no known closed form; it is defined numerically as the
//! fixed point of the full stroboscopic map `P = jump ∘ flow_T` on `(S, I)`.
//! Seeding starts from the `p = 0` endemic equilibrium and continues in `p`
//! (steps of at most 0.05), each stage refined by damped fixed-point
//! iteration plus a Broyden solve.

use crate::closedform::{self, ThresholdCurves};
use crate::error::{Error, Result};
use crate::integrator::{integrate, Dopri5, IntegratorConfig};
use crate::model::{ModelParams, State};
use serde::{Deserialize, Serialize};

const RESIDUAL_TARGET: f64 = 1e-9;
const CONTINUATION_STEP: f64 = 0.05;
const NEUTRALITY_TOL: f64 = 1e-6;

/// A located endemic periodic orbit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndemicOrbit {
    /// Post-jump stroboscopic fixed point.
    pub s_star: f64,
    pub i_star: f64,
    /// `||P(x*) - x*||_2` at the reported fixed point.
    pub residual: f64,
    /// Period average of `S` along the orbit; equals `S_c` for a true orbit
    /// (the neutrality condition of the stroboscopic `I`-map).
    pub mean_s: f64,
    pub iterations: usize,
    /// One period of the orbit, densely sampled (with the pulse pair).
    pub samples: Vec<State>,
}

/// One evaluation of the stroboscopic map with the accumulated `int S dt`.
/// State layout: `[S, I, Q]` with `Q' = S`.
fn strobe_map(
    params: &ModelParams,
    rel_tol: f64,
    abs_tol: f64,
    x: [f64; 2],
) -> Result<([f64; 2], f64)> {
    let a = params.a;
    let beta0 = params.beta0;
    let decay = params.sigma + params.g;
    let rhs = move |_t: f64, y: &[f64; 3]| -> [f64; 3] {
        let infection = beta0 * y[1] * y[0];
        [
            y[0] * (a - y[0]) - infection,
            infection - decay * y[1],
            y[0],
        ]
    };
    let mut driver = Dopri5::new(
        rhs,
        0.0,
        [x[0], x[1], 0.0],
        rel_tol,
        abs_tol,
        params.period / 4.0,
    );
    driver.advance_to(params.period)?;
    let y = driver.y;
    Ok(([(1.0 - params.p) * y[0], y[1]], y[2]))
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Solves `P(x) = x` near `seed` for the given parameter set.
fn solve_fixed_point(
    params: &ModelParams,
    rel_tol: f64,
    abs_tol: f64,
    seed: [f64; 2],
) -> Result<([f64; 2], usize)> {
    let map = |x: [f64; 2]| strobe_map(params, rel_tol, abs_tol, x).map(|(y, _)| y);
    let residual_of = |x: [f64; 2], px: [f64; 2]| [px[0] - x[0], px[1] - x[1]];

    let mut iterations = 0usize;
    let mut x = seed;
    let mut px = map(x)?;
    let mut g = residual_of(x, px);

    // Damped fixed-point iterations pull the seed into the Broyden basin.
    for _ in 0..40 {
        if norm2(g) < 1e-4 {
            break;
        }
        x = [x[0] + 0.7 * g[0], x[1] + 0.7 * g[1]];
        px = map(x)?;
        g = residual_of(x, px);
        iterations += 1;
    }

    // Finite-difference Jacobian of G = P - id.
    let fd_jacobian = |x: [f64; 2], g: [f64; 2]| -> Result<[[f64; 2]; 2]> {
        let h = 1e-7;
        let mut j = [[0.0; 2]; 2];
        for col in 0..2 {
            let mut xh = x;
            xh[col] += h;
            let ph = map(xh)?;
            let gh = [ph[0] - xh[0], ph[1] - xh[1]];
            j[0][col] = (gh[0] - g[0]) / h;
            j[1][col] = (gh[1] - g[1]) / h;
        }
        Ok(j)
    };

    let mut jac = fd_jacobian(x, g)?;
    let mut best = norm2(g);
    for _ in 0..60 {
        if norm2(g) <= RESIDUAL_TARGET {
            return Ok((x, iterations));
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-14 {
            jac = fd_jacobian(x, g)?;
            continue;
        }
        let mut dx = [
            (-g[0] * jac[1][1] + g[1] * jac[0][1]) / det,
            (-g[1] * jac[0][0] + g[0] * jac[1][0]) / det,
        ];
        // Keep the iterate strictly inside the positive quadrant.
        let mut halvings = 0;
        while (x[0] + dx[0] <= 0.0 || x[1] + dx[1] <= 0.0) && halvings < 30 {
            dx = [0.5 * dx[0], 0.5 * dx[1]];
            halvings += 1;
        }
        let x_new = [x[0] + dx[0], x[1] + dx[1]];
        let px_new = map(x_new)?;
        let g_new = residual_of(x_new, px_new);
        // Broyden rank-one update.
        let dg = [g_new[0] - g[0], g_new[1] - g[1]];
        let dx_dot = dx[0] * dx[0] + dx[1] * dx[1];
        if dx_dot > 0.0 {
            let jdx = [
                jac[0][0] * dx[0] + jac[0][1] * dx[1],
                jac[1][0] * dx[0] + jac[1][1] * dx[1],
            ];
            for row in 0..2 {
                let corr = (dg[row] - jdx[row]) / dx_dot;
                jac[row][0] += corr * dx[0];
                jac[row][1] += corr * dx[1];
            }
        }
        x = x_new;
        g = g_new;
        iterations += 1;
        best = best.min(norm2(g));
    }
    Err(Error::Convergence {
        context: format!(
            "stroboscopic fixed point at p = {}, T = {}",
            params.p, params.period
        ),
        residual: best,
        iterations,
    })
}

/// Locates the endemic periodic orbit for `gamma = 0` and
/// `0 <= p < p2(T)`; errors outside that region.
pub fn find_endemic_orbit(params: &ModelParams, config: &IntegratorConfig) -> Result<EndemicOrbit> {
    params.validate()?;
    config.validate()?;
    if params.gamma != 0.0 {
        return Err(Error::Domain(
            "endemic orbit location requires gamma = 0".into(),
        ));
    }
    let p2 = ThresholdCurves::from_params(params).p2(params.period)?;
    if params.p >= p2 {
        return Err(Error::Existence(format!(
            "no endemic orbit: p = {} is not below p2(T) = {p2}",
            params.p
        )));
    }
    let (s_eq, i_eq) = closedform::endemic_equilibrium(params)?;

    // Tight tolerances so the 1e-9 residual target is well above the
    // integration noise floor.
    let rel_tol = config.rel_tol.min(1e-11);
    let abs_tol = config.abs_tol.min(1e-13);

    let mut iterations = 0usize;
    let mut x = [s_eq, i_eq];
    let steps = (params.p / CONTINUATION_STEP).ceil().max(1.0) as usize;
    for k in 1..=steps {
        let p_k = params.p * k as f64 / steps as f64;
        let stage = params.clone().with_pulse(p_k, params.period);
        let (sol, it) = solve_fixed_point(&stage, rel_tol, abs_tol, x)?;
        x = sol;
        iterations += it;
    }

    let (px, s_int) = strobe_map(params, rel_tol, abs_tol, x)?;
    let residual = norm2([px[0] - x[0], px[1] - x[1]]);
    let mean_s = s_int / params.period;
    if (mean_s - params.s_c()).abs() > NEUTRALITY_TOL {
        return Err(Error::Convergence {
            context: format!(
                "located point violates the neutrality condition: mean S = {mean_s}, S_c = {}",
                params.s_c()
            ),
            residual,
            iterations,
        });
    }

    let mut dense = *config;
    dense.dense_output_dt = params.period / 256.0;
    let traj = integrate(
        params,
        &dense,
        State::initial(x[0], x[1]),
        params.period,
    )?;

    Ok(EndemicOrbit {
        s_star: x[0],
        i_star: x[1],
        residual,
        mean_s,
        iterations,
        samples: traj.samples,
    })
}
