//! Largest Lyapunov exponents across the dynamical regimes, from the
//! renormalized tangent flow: negative on attracting equilibria and
//! orbits, near zero on the quasiperiodic torus of the forced model, and
//! positive once the torus breaks down into a chaotic attractor.
//!
//! Run with `cargo run --example lyapunov_chaos` (tens of seconds).

use pulse_sir::analysis::{lyapunov_max, LyapunovSettings};
use pulse_sir::integrator::IntegratorConfig;
use pulse_sir::model::{ModelParams, State};

fn main() {
    let config = IntegratorConfig {
        rel_tol: 1e-8,
        abs_tol: 1e-10,
        ..Default::default()
    };
    let initial = State::initial(0.4074, 0.2645);

    let cases: [(&str, ModelParams, usize); 6] = [
        (
            "region 5: endemic equilibrium (p = 0)",
            ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(0.0, 4.0),
            400,
        ),
        (
            "region 3: stable disease-free orbit (p = 0.8)",
            ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(0.8, 4.0),
            400,
        ),
        (
            "region 4: endemic periodic orbit (p = 0.3)",
            ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(0.3, 4.0),
            400,
        ),
        (
            "forced, weak: phase-locked (gamma = 0.5, omega = 6)",
            ModelParams::new(1.0, 2.0, 0.2, 0.5)
                .with_pulse(0.4, 4.0)
                .with_seasonality(0.5, 6.0),
            800,
        ),
        (
            "forced, strong: attracting torus (gamma = 4.89, omega = 6)",
            ModelParams::new(1.0, 2.0, 0.2, 0.5)
                .with_pulse(0.4, 4.0)
                .with_seasonality(4.89, 6.0),
            800,
        ),
        (
            "forced, slow modulation: chaos (gamma = 4.89, omega = 1)",
            ModelParams::new(1.0, 2.0, 0.2, 0.5)
                .with_pulse(0.4, 4.0)
                .with_seasonality(4.89, 1.0),
            1400,
        ),
    ];

    for (name, params, pulses) in cases {
        let settings = LyapunovSettings::for_pulses(&params, pulses);
        let theta0 = (params.gamma > 0.0).then_some(0.0);
        let report = lyapunov_max(&params, &config, initial, theta0, &settings).unwrap();
        let verdict = if report.lambda > 0.02 {
            "chaotic"
        } else if report.lambda > -0.01 {
            "neutral (torus)"
        } else {
            "attracting"
        };
        println!("{name:<55} lambda = {:+8.4}  {verdict}", report.lambda);
    }
}
