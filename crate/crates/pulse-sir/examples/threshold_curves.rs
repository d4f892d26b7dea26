//! Threshold curves of the `(T, p)` plane and the pulse-design quantities
//! they induce: for a target coverage p, doses administered more often
//! than every `T2(p)` time units drive the reproduction number below 1.
//!
//! Run with `cargo run --example threshold_curves`.

use pulse_sir::closedform::{reproduction_number_rp, ThresholdCurves};
use pulse_sir::model::ModelParams;

fn main() {
    let base = ModelParams::new(1.0, 0.9, 0.2, 0.5);
    let curves = ThresholdCurves::from_params(&base);

    println!("{:>6} {:>10} {:>10}", "T", "p1(T)", "p2(T)");
    let mut t = 0.25;
    while t <= 16.0 {
        println!(
            "{t:>6.2} {:>10.6} {:>10.6}",
            curves.p1(t),
            curves.p2(t).unwrap()
        );
        t *= 2.0;
    }

    println!("\ninverse curves (dose-interval design):");
    println!("{:>6} {:>10} {:>10}", "p", "T1(p)", "T2(p)");
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        println!(
            "{p:>6.2} {:>10.4} {:>10.4}",
            curves.t1(p).unwrap(),
            curves.t2(p).unwrap()
        );
    }

    println!("\nreproduction number at fixed T = 4:");
    println!("{:>6} {:>10} {:>12}", "p", "R_p", "disease");
    for p in [0.0, 0.2, 0.4, 0.588_887_7, 0.8, 0.95] {
        let params = base.clone().with_pulse(p, 4.0);
        let rp = reproduction_number_rp(&params);
        let verdict = if rp > 1.0 { "persists" } else { "dies out" };
        println!("{p:>6.3} {rp:>10.6} {verdict:>12}");
    }
}
