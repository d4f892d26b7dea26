//! Empirical ω-limit classification from stroboscopic samples.

use crate::analysis::lyapunov::{lyapunov_max, LyapunovSettings};
use crate::closedform::{self, RegimeLabel};
use crate::error::{Error, Result};
use crate::integrator::{integrate, integrate_suspended, IntegratorConfig};
use crate::model::{ModelParams, State};
use rand::Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

/// Largest Lyapunov exponent above which a non-convergent run is labeled
/// chaotic. High enough to keep slow quasiperiodic transients out.
pub const CHAOS_LE_THRESHOLD: f64 = 0.02;

/// When the classifier estimates a Lyapunov exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LyapunovPolicy {
    /// Never; non-convergent runs are labeled `Undetermined`.
    Never,
    /// Only when the stroboscopic samples fail to converge (the chaos test).
    OnNonConvergence,
    /// Always; the estimate is attached to the report.
    Always,
}

/// Settings of the empirical classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifySettings {
    /// Maximum number of pulses to integrate (the horizon is
    /// `max_pulses * T`). The run stops early once converged.
    pub max_pulses: usize,
    /// Residual tolerance on the stroboscopic samples, also used as the
    /// proximity tolerance to the candidate limit objects.
    pub tol: f64,
    /// Number of trailing pulses over which the residual is measured.
    pub window: usize,
    pub lyapunov: LyapunovPolicy,
    /// Horizon (in pulses) of a triggered Lyapunov estimate.
    pub lyapunov_pulses: usize,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        Self {
            max_pulses: 600,
            tol: 1e-6,
            window: 50,
            lyapunov: LyapunovPolicy::OnNonConvergence,
            lyapunov_pulses: 500,
        }
    }
}

impl ClassifySettings {
    fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidParams("window must be at least 2".into()));
        }
        if self.max_pulses < 2 * self.window {
            return Err(Error::InvalidParams(format!(
                "max_pulses must be at least 2 * window = {}",
                2 * self.window
            )));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::InvalidParams(format!(
                "tol must lie in (0, 1e-2], got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Outcome of one empirical classification.
///
/// `residual` is reproducible from any trajectory of the same run: it is
/// the sup-norm distance between the last `window` post-jump stroboscopic
/// `(S, I)` samples and the final one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OmegaLimitReport {
    pub label: RegimeLabel,
    /// Trailing post-jump `(S, I)` samples (up to `window` of them).
    pub terminal_strobe: Vec<(f64, f64)>,
    pub residual: f64,
    pub converged: bool,
    /// Pulses actually integrated before stopping.
    pub pulses: usize,
    pub lyapunov: Option<f64>,
}

fn strobe_residual(ring: &[(f64, f64)]) -> f64 {
    let last = ring[ring.len() - 1];
    ring.iter()
        .map(|&(s, i)| (s - last.0).abs().max((i - last.1).abs()))
        .fold(0.0, f64::max)
}

/// Classifies the ω-limit of the trajectory started at `initial` (its own
/// clock starts at 0; `theta0` sets the seasonal phase of suspended runs).
///
/// Decision order on the trailing stroboscopic samples:
/// origin (region 1 at `p = 1`, else region 2); disease-free fixed point
/// `x1*` (region 3); for converged runs with `I` bounded away from zero the
/// endemic equilibrium at `p = 0` (region 5) or the endemic periodic orbit
/// (region 4); otherwise chaotic if the run did not converge and the
/// largest Lyapunov exponent exceeds [`CHAOS_LE_THRESHOLD`], or
/// undetermined.
pub fn classify_empirical(
    params: &ModelParams,
    config: &IntegratorConfig,
    initial: State,
    theta0: Option<f64>,
    settings: &ClassifySettings,
) -> Result<OmegaLimitReport> {
    params.validate()?;
    settings.validate()?;
    let cfg = config.strobe_only();
    let period = params.period;

    let mut current = State::new(initial.s, initial.i, initial.r, 0.0);
    let mut ring: Vec<(f64, f64)> = Vec::with_capacity(settings.window);
    let mut pulses = 0usize;
    let mut residual = f64::INFINITY;
    let mut converged = false;

    while pulses < settings.max_pulses {
        let chunk = settings.window.min(settings.max_pulses - pulses);
        let t_end = (pulses + chunk) as f64 * period;
        let traj = match theta0 {
            None => integrate(params, &cfg, current, t_end)?,
            Some(th0) => integrate_suspended(params, &cfg, current, th0, t_end)?,
        };
        debug_assert_eq!(traj.impulse_pre_indices.len(), chunk);
        for st in traj.strobe_post() {
            if ring.len() == settings.window {
                ring.remove(0);
            }
            ring.push((st.s, st.i));
        }
        pulses += chunk;
        current = *traj.last();

        if ring.len() == settings.window && pulses >= 2 * settings.window {
            residual = strobe_residual(&ring);
            if residual < settings.tol {
                converged = true;
                break;
            }
        }
    }

    let tol = settings.tol;
    // Slow multipliers park the run with residual < tol while S or I are
    // still an order of magnitude above tol (geometric decay stalls the
    // residual before the level reaches it), so "effectively zero" uses a
    // wider band and the x1* proximity test scales with the leftover I.
    let zero_band = 10.0 * tol;
    let &(s_end, i_end) = ring.last().expect("at least one pulse integrated");
    let i_floor = ring.iter().map(|&(_, i)| i).fold(f64::INFINITY, f64::min);

    let mut lyapunov = None;

    let label = if s_end < zero_band && i_end < zero_band {
        if params.p == 1.0 {
            RegimeLabel::FullCoverage
        } else {
            RegimeLabel::TrivialDiseaseFree
        }
    } else if i_end < zero_band && {
        let fp = closedform::fixed_points_s(params);
        !fp.nonphysical && (s_end - fp.x1).abs() < tol.max(i_end)
    } {
        RegimeLabel::NontrivialDiseaseFree
    } else if converged && i_floor >= zero_band {
        if params.p == 0.0 {
            match closedform::endemic_equilibrium(params) {
                Ok((se, ie))
                    if (s_end - se).abs() < zero_band && (i_end - ie).abs() < zero_band =>
                {
                    RegimeLabel::EndemicEquilibrium
                }
                _ => RegimeLabel::Undetermined,
            }
        } else {
            RegimeLabel::EndemicPeriodic
        }
    } else if !converged
        && matches!(
            settings.lyapunov,
            LyapunovPolicy::OnNonConvergence | LyapunovPolicy::Always
        )
    {
        let le = run_lyapunov(params, config, initial, theta0, settings)?;
        lyapunov = Some(le);
        if le > CHAOS_LE_THRESHOLD {
            RegimeLabel::Chaotic
        } else {
            RegimeLabel::Undetermined
        }
    } else {
        RegimeLabel::Undetermined
    };

    if matches!(settings.lyapunov, LyapunovPolicy::Always) && lyapunov.is_none() {
        lyapunov = Some(run_lyapunov(params, config, initial, theta0, settings)?);
    }

    Ok(OmegaLimitReport {
        label,
        terminal_strobe: ring,
        residual,
        converged,
        pulses,
        lyapunov,
    })
}

fn run_lyapunov(
    params: &ModelParams,
    config: &IntegratorConfig,
    initial: State,
    theta0: Option<f64>,
    settings: &ClassifySettings,
) -> Result<f64> {
    let le_settings = LyapunovSettings::for_pulses(params, settings.lyapunov_pulses);
    Ok(lyapunov_max(
        params,
        config,
        State::new(initial.s, initial.i, initial.r, 0.0),
        theta0,
        &le_settings,
    )?
    .lambda)
}

/// Classifies from `n` initial conditions sampled uniformly inside the
/// trapping region (seeded, reproducible). Evidence for global convergence
/// claims; returns each sampled start with its report.
pub fn classify_multi(
    params: &ModelParams,
    config: &IntegratorConfig,
    n: usize,
    seed: u64,
    theta0: Option<f64>,
    settings: &ClassifySettings,
) -> Result<Vec<(State, OmegaLimitReport)>> {
    params.validate()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let bound = params.trapping_bound();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let s: f64 = rng.random_range(1e-3..params.a);
        let i: f64 = rng.random_range(1e-3..(bound - s).min(1.0));
        let initial = State::initial(s, i);
        let report = classify_empirical(params, config, initial, theta0, settings)?;
        out.push((initial, report));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline(p: f64) -> ModelParams {
        ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(p, 4.0)
    }

    fn quick() -> ClassifySettings {
        ClassifySettings {
            lyapunov: LyapunovPolicy::Never,
            ..Default::default()
        }
    }

    fn run(p: f64) -> OmegaLimitReport {
        classify_empirical(
            &baseline(p),
            &IntegratorConfig::default(),
            State::initial(0.5, 0.4),
            None,
            &quick(),
        )
        .unwrap()
    }

    #[test]
    fn five_scenarios_baseline_rates() {
        assert_eq!(run(1.0).label, RegimeLabel::FullCoverage);
        assert_eq!(run(0.99).label, RegimeLabel::TrivialDiseaseFree);
        assert_eq!(run(0.7).label, RegimeLabel::NontrivialDiseaseFree);
        let r4 = run(0.3);
        assert_eq!(r4.label, RegimeLabel::EndemicPeriodic);
        assert!(r4.converged && r4.residual <= 1e-6);
        assert_eq!(run(0.0).label, RegimeLabel::EndemicEquilibrium);
    }

    #[test]
    fn early_exit_on_convergence() {
        let r = run(0.7);
        assert!(r.pulses < 600, "no early exit: {} pulses", r.pulses);
    }

    #[test]
    fn slow_multiplier_run_labels_disease_free() {
        // lambda2 is close to 1 here; the run needs a long horizon.
        let m = ModelParams::new(1.0, 0.2, 0.05, 0.02).with_pulse(0.5, 1.0);
        let settings = ClassifySettings {
            max_pulses: 2500,
            ..quick()
        };
        let r = classify_empirical(
            &m,
            &IntegratorConfig::default(),
            State::initial(0.5, 0.4),
            None,
            &settings,
        )
        .unwrap();
        assert_eq!(r.label, RegimeLabel::NontrivialDiseaseFree);
    }

    #[test]
    fn settings_validation() {
        let narrow = ClassifySettings {
            window: 1,
            ..Default::default()
        };
        assert!(narrow.validate().is_err());
        let short = ClassifySettings {
            max_pulses: 60,
            ..Default::default()
        };
        assert!(short.validate().is_err());
    }

    #[test]
    fn strobe_and_dense_routes_agree() {
        // Labels derived from the stroboscopic samples match a judgment
        // made from the dense trajectory tail.
        use crate::integrator::integrate;
        let cfg = IntegratorConfig {
            dense_output_dt: 0.25,
            ..Default::default()
        };
        for (p, want) in [
            (1.0, RegimeLabel::FullCoverage),
            (0.99, RegimeLabel::TrivialDiseaseFree),
            (0.7, RegimeLabel::NontrivialDiseaseFree),
            (0.3, RegimeLabel::EndemicPeriodic),
            (0.0, RegimeLabel::EndemicEquilibrium),
        ] {
            let m = baseline(p);
            let strobe_label =
                classify_empirical(&m, &cfg, State::initial(0.5, 0.4), None, &quick())
                    .unwrap()
                    .label;
            assert_eq!(strobe_label, want);

            // Dense route: inspect the final 10% of a long trajectory.
            let traj = integrate(&m, &cfg, State::initial(0.5, 0.4), 600.0 * m.period).unwrap();
            let cut = 0.9 * 600.0 * m.period;
            let tail: Vec<_> = traj.samples.iter().filter(|st| st.t >= cut).collect();
            let i_max = tail.iter().map(|st| st.i).fold(0.0, f64::max);
            let s_max = tail.iter().map(|st| st.s).fold(0.0, f64::max);
            let dense_label = if s_max < 1e-5 && i_max < 1e-5 {
                if p == 1.0 {
                    RegimeLabel::FullCoverage
                } else {
                    RegimeLabel::TrivialDiseaseFree
                }
            } else if i_max < 1e-5 {
                RegimeLabel::NontrivialDiseaseFree
            } else if p == 0.0 {
                RegimeLabel::EndemicEquilibrium
            } else {
                RegimeLabel::EndemicPeriodic
            };
            assert_eq!(dense_label, strobe_label, "p = {p}");
        }
    }

    #[test]
    fn multi_start_agrees_in_region3() {
        let m = baseline(0.8);
        let settings = quick();
        let reports = classify_multi(&m, &IntegratorConfig::default(), 5, 42, None, &settings)
            .unwrap();
        assert_eq!(reports.len(), 5);
        for (start, r) in &reports {
            assert_eq!(
                r.label,
                RegimeLabel::NontrivialDiseaseFree,
                "start {start:?}"
            );
        }
        // Seeded determinism.
        let again = classify_multi(&m, &IntegratorConfig::default(), 5, 42, None, &settings)
            .unwrap();
        for ((s1, _), (s2, _)) in reports.iter().zip(&again) {
            assert_eq!(s1, s2);
        }
    }
}
