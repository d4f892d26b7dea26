//! Cross-validation of the disease-free orbit's Floquet multipliers:
//! the closed forms against the numerically integrated monodromy matrix.
//!
//! `lambda2` crossing 1 marks the transcritical curve `p = p2(T)`; below it
//! the disease-free orbit repels infections into the endemic regime.
//!
//! Run with `cargo run --example floquet_check`.

use pulse_sir::closedform::{floquet_analytic, OrbitKind, ThresholdCurves};
use pulse_sir::integrator::{monodromy_numeric, IntegratorConfig};
use pulse_sir::model::ModelParams;

fn main() {
    let base = ModelParams::new(1.0, 0.9, 0.2, 0.5);
    let config = IntegratorConfig::default();
    let p2 = ThresholdCurves::from_params(&base).p2(4.0).unwrap();

    println!(
        "{:>5} {:>12} {:>12} {:>10} {:>10} {:>9}",
        "p", "lambda1", "lambda2", "rel err 1", "rel err 2", "stable?"
    );
    for p in [0.1, 0.3, 0.5, p2, 0.7, 0.9] {
        let params = base.clone().with_pulse(p, 4.0);
        let analytic = floquet_analytic(&params, OrbitKind::DiseaseFreePeriodic).unwrap();
        let numeric = monodromy_numeric(&params, &config, OrbitKind::DiseaseFreePeriodic).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        let stable = analytic.lambda1 < 1.0 && analytic.lambda2 < 1.0;
        println!(
            "{p:>5.3} {:>12.6} {:>12.6} {:>10.1e} {:>10.1e} {:>9}",
            analytic.lambda1,
            analytic.lambda2,
            rel(numeric.lambda1, analytic.lambda1),
            rel(numeric.lambda2, analytic.lambda2),
            if stable { "yes" } else { "no" },
        );
    }
    println!("\nat p = p2(4) = {p2:.6} the I-multiplier sits on the unit circle.");
}
