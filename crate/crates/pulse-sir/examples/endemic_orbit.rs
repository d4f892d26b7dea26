//! Locating the endemic periodic orbit of region 4.
//!
//! The orbit has no closed form; it is pinned down as the fixed point of
//! the stroboscopic map (time-T flow followed by the vaccination jump),
//! seeded from the unvaccinated equilibrium and continued in p. A located
//! orbit must average S to exactly S_c over one period — the neutrality
//! condition that keeps the infection load periodic.
//!
//! Run with `cargo run --example endemic_orbit`.

use pulse_sir::analysis::find_endemic_orbit;
use pulse_sir::closedform::endemic_equilibrium;
use pulse_sir::integrator::IntegratorConfig;
use pulse_sir::model::ModelParams;

fn main() {
    let base = ModelParams::new(1.0, 0.9, 0.2, 0.5);
    let config = IntegratorConfig::default();
    let (s_eq, i_eq) = endemic_equilibrium(&base).unwrap();
    println!("p = 0 equilibrium: (S, I) = ({s_eq:.6}, {i_eq:.6})");
    println!("S_c = {:.9}\n", base.s_c());

    println!(
        "{:>5} {:>11} {:>11} {:>11} {:>13} {:>6}",
        "p", "S*", "I*", "residual", "mean S - S_c", "iters"
    );
    for p in [0.05, 0.15, 0.3, 0.45, 0.55] {
        let params = base.clone().with_pulse(p, 4.0);
        match find_endemic_orbit(&params, &config) {
            Ok(orbit) => println!(
                "{p:>5.2} {:>11.6} {:>11.6} {:>11.2e} {:>13.2e} {:>6}",
                orbit.s_star,
                orbit.i_star,
                orbit.residual,
                orbit.mean_s - params.s_c(),
                orbit.iterations
            ),
            Err(e) => println!("{p:>5.2} {e}"),
        }
    }

    // Above p2(4) ≈ 0.5889 the orbit no longer exists.
    let params = base.with_pulse(0.7, 4.0);
    println!(
        "\np = 0.7: {}",
        find_endemic_orbit(&params, &config).unwrap_err()
    );
}
