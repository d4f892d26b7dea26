//! Empirical analyses built on the impulsive integrator: ω-limit
//! classification, parameter-plane sweeps, endemic-orbit location, largest
//! Lyapunov exponents, Poincaré sections and permanence bounds.

mod classify;
pub mod lyapunov;
pub mod orbit;
pub mod permanence;
pub mod section;
pub mod sweep;

pub use classify::{
    classify_empirical, classify_multi, ClassifySettings, LyapunovPolicy, OmegaLimitReport,
    CHAOS_LE_THRESHOLD,
};
pub use lyapunov::{lyapunov_max, LyapunovReport, LyapunovSettings};
pub use orbit::{find_endemic_orbit, EndemicOrbit};
pub use permanence::{permanence_check, PermanenceBounds};
pub use section::poincare_section;
pub use sweep::{sweep_bifurcation_plane, SweepCell, SweepGrid, SweepReport};
