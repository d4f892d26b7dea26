//! Closed-form results: logistic solution between pulses, stroboscopic maps
//! and fixed points, the disease-free periodic orbit, threshold curves,
//! reproduction numbers, analytic Floquet multipliers and the analytic
//! regime classification of the `(T, p)` plane.
//!
//! Everything here is exact up to floating-point evaluation; the
//! [`crate::integrator`] module provides the independent numerical routes
//! these formulas are cross-validated against.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::quad;
use serde::{Deserialize, Serialize};

/// One of the five parameter-plane regimes, the two bifurcation boundaries
/// between them, or the labels only an empirical analysis can produce.
///
/// With `gamma = 0` and `A > S_c` the analytic labels partition
/// `(T, p) in (0, inf) x [0, 1]`:
///
/// * region 1, `p = 1`: every solution tends to the origin;
/// * region 2, `p1(T) < p < 1`: every solution tends to the origin;
/// * region 3, `p2(T) < p < p1(T)`: solutions with `S0 > 0` tend to the
///   disease-free periodic orbit `(S~, 0)`;
/// * region 4, `0 < p < p2(T)`: the system is permanent and solutions with
///   `S0, I0 > 0` tend to an endemic `T`-periodic orbit;
/// * region 5, `p = 0`: solutions with `S0, I0 > 0` tend to the endemic
///   equilibrium.
///
/// Exact hits of the curves `p = p1(T)` / `p = p2(T)` are reported as
/// boundary labels rather than forced into one of the open regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    /// Region 1: full coverage, `p = 1`.
    FullCoverage,
    /// Region 2: trivial disease-free orbit attracts, `p1(T) < p < 1`.
    TrivialDiseaseFree,
    /// Region 3: non-trivial disease-free periodic orbit attracts.
    NontrivialDiseaseFree,
    /// Region 4: endemic `T`-periodic orbit attracts.
    EndemicPeriodic,
    /// Region 5: endemic equilibrium attracts, `p = 0`.
    EndemicEquilibrium,
    /// Exactly on `p = p1(T)` (saddle-node of the stroboscopic `S`-map).
    SaddleNodeBoundary,
    /// Exactly on `p = p2(T)` (transcritical; multiplier `lambda2` crosses 1).
    TranscriticalBoundary,
    /// Empirical only: non-convergent stroboscopic samples with positive
    /// largest Lyapunov exponent.
    Chaotic,
    /// Empirical only: no criterion matched within the horizon.
    Undetermined,
}

impl RegimeLabel {
    /// Region number 1..=5 for the analytic labels, `None` otherwise.
    pub fn region_number(&self) -> Option<u8> {
        match self {
            RegimeLabel::FullCoverage => Some(1),
            RegimeLabel::TrivialDiseaseFree => Some(2),
            RegimeLabel::NontrivialDiseaseFree => Some(3),
            RegimeLabel::EndemicPeriodic => Some(4),
            RegimeLabel::EndemicEquilibrium => Some(5),
            _ => None,
        }
    }

    /// Stable lowercase identifier used in CSV output.
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::FullCoverage => "full_coverage",
            RegimeLabel::TrivialDiseaseFree => "trivial_disease_free",
            RegimeLabel::NontrivialDiseaseFree => "nontrivial_disease_free",
            RegimeLabel::EndemicPeriodic => "endemic_periodic",
            RegimeLabel::EndemicEquilibrium => "endemic_equilibrium",
            RegimeLabel::SaddleNodeBoundary => "saddle_node_boundary",
            RegimeLabel::TranscriticalBoundary => "transcritical_boundary",
            RegimeLabel::Chaotic => "chaotic",
            RegimeLabel::Undetermined => "undetermined",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which periodic orbit a Floquet computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    /// The trivial equilibrium `(0, 0)` seen as a `T`-periodic solution.
    Origin,
    /// The disease-free periodic orbit `(S~, 0)`; exists for `p < p1(T)`.
    DiseaseFreePeriodic,
}

/// The two Floquet multipliers of a `T`-periodic orbit. Both are real and
/// positive for the orbits treated here (real exponentials scaled by
/// `1 - p`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetPair {
    /// Multiplier of the `S`-direction.
    pub lambda1: f64,
    /// Multiplier of the `I`-direction; `lambda2 < 1` iff `R_p < 1`.
    pub lambda2: f64,
    pub orbit: OrbitKind,
}

/// Fixed points of the stroboscopic `S`-map `F_S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrobeFixedPoints {
    /// `x1* = A (1 - p e^{AT} / (e^{AT} - 1))`. Negative (and flagged) for
    /// `p > p1(T)`; the continued branch is kept for bifurcation analysis.
    pub x1: f64,
    /// The extinction fixed point, always 0.
    pub x2: f64,
    /// True when `x1 < 0`, i.e. `p > p1(T)`.
    pub nonphysical: bool,
}

/// Solution of the logistic equation `S' = S (A - S)` after time `dt`,
/// starting from `S0 in [0, A]`:
/// `S(dt) = A S0 / (S0 + (A - S0) e^{-A dt})`.
pub fn logistic_between_pulses(a: f64, s0: f64, dt: f64) -> Result<f64> {
    if !(0.0..=a).contains(&s0) {
        return Err(Error::Domain(format!(
            "logistic initial value {s0} outside [0, {a}]"
        )));
    }
    if dt < 0.0 {
        return Err(Error::Domain(format!("negative elapsed time {dt}")));
    }
    Ok(a * s0 / (s0 + (a - s0) * (-a * dt).exp()))
}

/// Stroboscopic map of the susceptibles on the invariant manifold `I = 0`:
/// `F_S(x) = A x (1-p) e^{AT} / (x (e^{AT} - 1) + A)`.
///
/// Evaluated in the overflow-safe form obtained by scaling through
/// `e^{-AT}`.
pub fn strobe_s(params: &ModelParams, x: f64) -> f64 {
    let emat = (-params.a * params.period).exp();
    params.a * x * (1.0 - params.p) / (x * (1.0 - emat) + params.a * emat)
}

/// Fixed points of [`strobe_s`]. `x1` may be negative for `p > p1(T)`; it is
/// returned as-is with the `nonphysical` flag set.
pub fn fixed_points_s(params: &ModelParams) -> StrobeFixedPoints {
    // x1* = A (1 - p / (1 - e^{-AT})), the stable rewrite of
    // A (1 - p e^{AT} / (e^{AT} - 1)).
    let x1 = params.a * (1.0 - params.p / -(-params.a * params.period).exp_m1());
    StrobeFixedPoints {
        x1,
        x2: 0.0,
        nonphysical: x1 < 0.0,
    }
}

/// Checks that the disease-free periodic orbit exists, i.e. `p < p1(T)`.
fn require_orbit(params: &ModelParams) -> Result<()> {
    let p1 = ThresholdCurves::from_params(params).p1(params.period);
    if params.p >= p1 {
        return Err(Error::Existence(format!(
            "disease-free periodic orbit requires p < p1(T) = {p1}, got p = {}",
            params.p
        )));
    }
    Ok(())
}

/// The disease-free orbit `S~` as a function of the phase `u in [0, T]`
/// since the last pulse (no wrapping; `u = T` yields the pre-jump limit
/// `S~(T^-)`).
///
/// Quadratures over one period must use this form: the wrapped
/// [`disease_free_periodic_s`] jumps at `t = nT` and would poison the right
/// endpoint.
pub fn disease_free_phase(params: &ModelParams, u: f64) -> Result<f64> {
    require_orbit(params)?;
    if !(0.0..=params.period).contains(&u) {
        return Err(Error::Domain(format!(
            "phase {u} outside [0, {}]",
            params.period
        )));
    }
    // Scaled by e^{-AT}: A[(1-p) - e^{-AT}] / ((1-p) - e^{-AT} + p e^{-Au}).
    let q = 1.0 - params.p;
    let emat = (-params.a * params.period).exp();
    let num = params.a * (q - emat);
    Ok(num / (q - emat + params.p * (-params.a * u).exp()))
}

/// The disease-free `T`-periodic solution `S~(t)`, `t >= 0`. Satisfies
/// `S~(nT) = x1*` (post-jump value) and does not depend on `beta0` or
/// `gamma`. Requires `p < p1(T)`.
pub fn disease_free_periodic_s(params: &ModelParams, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!("negative time {t}")));
    }
    disease_free_phase(params, t % params.period)
}

/// `int_0^T S~(t) dt = ln(1 - p) + A T` (exact identity).
pub fn disease_free_orbit_integral(params: &ModelParams) -> Result<f64> {
    require_orbit(params)?;
    Ok((-params.p).ln_1p() + params.a * params.period)
}

/// Growth factor of the stroboscopic `I`-map over one period,
/// `F_I(y) / y = exp(beta0 int S dt - (sigma + g) T)`, given the integral of
/// `S` over that period along the trajectory of interest. Equals 1 exactly
/// when the period average of `S` is `S_c`.
pub fn strobe_i_growth_factor(params: &ModelParams, s_integral: f64) -> f64 {
    (params.beta0 * s_integral - (params.sigma + params.g) * params.period).exp()
}

/// The threshold curves of the `(T, p)` bifurcation diagram.
///
/// `p1(T) = 1 - e^{-AT}` (saddle-node of the stroboscopic `S`-map) and
/// `p2(T) = 1 - e^{-(A - S_c) T}` (transcritical; defined for `A > S_c`),
/// with exact inverses `T1`, `T2`.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdCurves {
    a: f64,
    s_c: f64,
}

impl ThresholdCurves {
    pub fn from_params(params: &ModelParams) -> Self {
        Self {
            a: params.a,
            s_c: params.s_c(),
        }
    }

    /// `p1(T) = 1 - e^{-AT}`.
    pub fn p1(&self, t: f64) -> f64 {
        -(-self.a * t).exp_m1()
    }

    /// `p2(T) = 1 - e^{-(A - S_c) T}`; requires `A > S_c` (else `R_0 <= 1`
    /// and the curve does not exist).
    pub fn p2(&self, t: f64) -> Result<f64> {
        if self.a <= self.s_c {
            return Err(Error::Existence(format!(
                "p2 requires A > S_c (A = {}, S_c = {}; R_0 <= 1)",
                self.a, self.s_c
            )));
        }
        Ok(-(-(self.a - self.s_c) * t).exp_m1())
    }

    /// `T1(p) = |ln(1 - p)| / A`, the inverse of `p1`.
    pub fn t1(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Domain(format!("T1 requires p in [0, 1), got {p}")));
        }
        Ok(-(-p).ln_1p() / self.a)
    }

    /// `T2(p) = |ln(1 - p)| / (A - S_c)`, the inverse of `p2`.
    pub fn t2(&self, p: f64) -> Result<f64> {
        if self.a <= self.s_c {
            return Err(Error::Existence(format!(
                "T2 requires A > S_c (A = {}, S_c = {})",
                self.a, self.s_c
            )));
        }
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Domain(format!("T2 requires p in [0, 1), got {p}")));
        }
        Ok(-(-p).ln_1p() / (self.a - self.s_c))
    }
}

/// Scalar threshold report at the parameter set's own `(T, p)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub s_c: f64,
    pub r0: f64,
    pub p1: f64,
    /// `None` when `A <= S_c`.
    pub p2: Option<f64>,
    /// `None` at `p = 1`.
    pub t1: Option<f64>,
    /// `None` when `A <= S_c` or `p = 1`.
    pub t2: Option<f64>,
    pub r_p: f64,
}

/// Evaluates every threshold quantity at `params.period` / `params.p`.
pub fn threshold_summary(params: &ModelParams) -> ThresholdSummary {
    let curves = ThresholdCurves::from_params(params);
    ThresholdSummary {
        s_c: params.s_c(),
        r0: params.r0(),
        p1: curves.p1(params.period),
        p2: curves.p2(params.period).ok(),
        t1: curves.t1(params.p).ok(),
        t2: curves.t2(params.p).ok(),
        r_p: reproduction_number_rp(params),
    }
}

/// Basic reproduction number of the pulse-vaccinated system,
/// `R_p = R_0 [ln(1 - p) / (A T) + 1]`.
///
/// Strictly increasing in `T`, strictly decreasing in `p`; `R_p = R_0` at
/// `p = 0`; diverges to `-inf` as `p -> 1` (the CLI clamps the display, the
/// library returns the true value).
pub fn reproduction_number_rp(params: &ModelParams) -> f64 {
    params.r0() * ((-params.p).ln_1p() / (params.a * params.period) + 1.0)
}

/// Seasonal transcritical threshold
/// `p2_seas(T) = 1 - exp(-[(A - S_c) T + gamma int_0^T Psi(omega t) S~(t) dt])`,
/// evaluated along the disease-free orbit of the given parameter set.
///
/// Reduces to `p2(T)` exactly at `gamma = 0` and is `>= p2(T)` otherwise
/// (the added integrand is non-negative). Requires `A > S_c` and
/// `p < p1(T)`.
pub fn p2_seasonal(params: &ModelParams) -> Result<f64> {
    let curves = ThresholdCurves::from_params(params);
    let p2 = curves.p2(params.period)?;
    if params.gamma == 0.0 {
        return Ok(p2);
    }
    require_orbit(params)?;
    let integral = quad::adaptive_simpson(
        |t| {
            let psi = params.psi.eval(params.omega * t);
            // Unwrapped phase form; u = t is valid on [0, T].
            let stilde = disease_free_phase(params, t).expect("phase within [0, T]");
            psi * stilde
        },
        0.0,
        params.period,
        quad::DEFAULT_ABS_TOL,
        quad::DEFAULT_MAX_DEPTH,
    )?;
    let exponent = (params.a - params.s_c()) * params.period + params.gamma * integral;
    Ok(-(-exponent).exp_m1())
}

/// Analytic Floquet multipliers of the requested orbit.
///
/// Disease-free periodic orbit (`p < p1(T)`):
/// `lambda1 = (1-p) exp(AT - 2 int S~) = e^{-AT} / (1-p)` and
/// `lambda2 = exp(beta0 int S~ - (sigma+g) T)`; `lambda1 < 1` iff `p < p1`,
/// `lambda2 < 1` iff `R_p < 1`.
///
/// Origin: `lambda1 = (1-p) e^{AT}`, `lambda2 = e^{-(sigma+g) T}`.
///
/// With `gamma > 0` the `I`-multiplier of the disease-free orbit picks up
/// the forcing, `lambda2 = exp(int beta_gamma(t) S~ dt - (sigma+g) T)`
/// (evaluated by quadrature); this is the multiplier behind
/// [`p2_seasonal`].
pub fn floquet_analytic(params: &ModelParams, orbit: OrbitKind) -> Result<FloquetPair> {
    let a_t = params.a * params.period;
    let decay = (-(params.sigma + params.g) * params.period).exp();
    match orbit {
        OrbitKind::Origin => Ok(FloquetPair {
            lambda1: (1.0 - params.p) * a_t.exp(),
            lambda2: decay,
            orbit,
        }),
        OrbitKind::DiseaseFreePeriodic => {
            require_orbit(params)?;
            let lambda1 = (-a_t).exp() / (1.0 - params.p);
            let lambda2 = if params.gamma == 0.0 {
                strobe_i_growth_factor(params, disease_free_orbit_integral(params)?)
            } else {
                let weighted = quad::adaptive_simpson(
                    |t| {
                        params.beta_gamma(t) / params.beta0
                            * disease_free_phase(params, t).expect("phase within [0, T]")
                    },
                    0.0,
                    params.period,
                    quad::DEFAULT_ABS_TOL,
                    quad::DEFAULT_MAX_DEPTH,
                )?;
                strobe_i_growth_factor(params, weighted)
            };
            Ok(FloquetPair {
                lambda1,
                lambda2,
                orbit,
            })
        }
    }
}

/// Endemic equilibrium of the unvaccinated (`p = 0`) system,
/// `(S, I) = (S_c, (A beta0 - (sigma + g)) / beta0^2)`; requires `R_0 > 1`.
pub fn endemic_equilibrium(params: &ModelParams) -> Result<(f64, f64)> {
    if params.r0() <= 1.0 {
        return Err(Error::Existence(format!(
            "endemic equilibrium requires R_0 > 1, got {}",
            params.r0()
        )));
    }
    let s = params.s_c();
    let i = (params.a * params.beta0 - (params.sigma + params.g)) / (params.beta0 * params.beta0);
    Ok((s, i))
}

/// Analytic regime classification at the parameter set's `(T, p)`.
///
/// Only valid for the unforced model (`gamma = 0`) with `A > S_c`;
/// exact hits of `p1(T)` / `p2(T)` return the boundary labels.
pub fn classify_analytic(params: &ModelParams) -> Result<RegimeLabel> {
    if params.gamma != 0.0 {
        return Err(Error::Domain(
            "analytic classification requires gamma = 0; use the empirical classifier".into(),
        ));
    }
    if params.a <= params.s_c() {
        return Err(Error::Existence(format!(
            "analytic classification requires A > S_c (R_0 > 1), got R_0 = {}",
            params.r0()
        )));
    }
    let p = params.p;
    if p == 1.0 {
        return Ok(RegimeLabel::FullCoverage);
    }
    if p == 0.0 {
        return Ok(RegimeLabel::EndemicEquilibrium);
    }
    let curves = ThresholdCurves::from_params(params);
    let p1 = curves.p1(params.period);
    let p2 = curves.p2(params.period)?;
    if p == p1 {
        return Ok(RegimeLabel::SaddleNodeBoundary);
    }
    if p == p2 {
        return Ok(RegimeLabel::TranscriticalBoundary);
    }
    Ok(if p > p1 {
        RegimeLabel::TrivialDiseaseFree
    } else if p > p2 {
        RegimeLabel::NontrivialDiseaseFree
    } else {
        RegimeLabel::EndemicPeriodic
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn baseline(p: f64) -> ModelParams {
        ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(p, 4.0)
    }

    fn slow_seasonal(gamma: f64) -> ModelParams {
        ModelParams::new(1.0, 0.2, 0.05, 0.02)
            .with_pulse(0.5, 1.0)
            .with_seasonality(gamma, 0.1)
    }

    #[test]
    fn logistic_equilibrium_and_boundary() {
        for dt in [0.0, 0.7, 13.0] {
            assert_eq!(logistic_between_pulses(1.0, 1.0, dt).unwrap(), 1.0);
            assert_eq!(logistic_between_pulses(1.0, 0.0, dt).unwrap(), 0.0);
        }
    }

    #[test]
    fn logistic_closed_form_matches_rk4_oracle() {
        // Oracle: plain RK4 on S' = S(1 - S) from 0.2 over dt = 4.
        let mut s = 0.2f64;
        let n = 40_000;
        let h = 4.0 / n as f64;
        let f = |x: f64| x * (1.0 - x);
        for _ in 0..n {
            let k1 = f(s);
            let k2 = f(s + 0.5 * h * k1);
            let k3 = f(s + 0.5 * h * k2);
            let k4 = f(s + h * k3);
            s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        let closed = logistic_between_pulses(1.0, 0.2, 4.0).unwrap();
        assert!((closed - s).abs() < 1e-8, "closed {closed} vs rk4 {s}");
        assert!((closed - 0.931_738_459_358_571_9).abs() < 1e-12);
    }

    #[test]
    fn logistic_rejects_out_of_range() {
        assert!(logistic_between_pulses(1.0, -0.1, 1.0).is_err());
        assert!(logistic_between_pulses(1.0, 1.1, 1.0).is_err());
        assert!(logistic_between_pulses(1.0, 0.5, -1.0).is_err());
    }

    #[test]
    fn logistic_monotone_in_dt() {
        let mut last = 0.0;
        for k in 0..50 {
            let v = logistic_between_pulses(1.0, 0.05, 0.2 * k as f64).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn strobe_s_fixed_points() {
        let m = baseline(0.3);
        assert_eq!(strobe_s(&m, 0.0), 0.0);
        let no_vax = baseline(0.0);
        assert!((strobe_s(&no_vax, 1.0) - 1.0).abs() < 1e-15);

        let fp = fixed_points_s(&m);
        assert!((fp.x1 - 0.694_402_791_890_867_7).abs() < 1e-14);
        assert!(!fp.nonphysical);
        assert_eq!(fp.x2, 0.0);
        // Residual at the fixed point.
        assert!((strobe_s(&m, fp.x1) - fp.x1).abs() <= 1e-12);

        // Oracle: iterate F_S from 0.5 until convergence.
        let mut x = 0.5;
        for _ in 0..200 {
            x = strobe_s(&m, x);
        }
        assert!((x - fp.x1).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_nonphysical_beyond_p1() {
        let fp = fixed_points_s(&baseline(0.99));
        assert!(fp.nonphysical);
        assert!((fp.x1 - (-0.008_470_786_760_136)).abs() < 1e-12);
    }

    #[test]
    fn disease_free_orbit_basics() {
        let m = baseline(0.3);
        let fp = fixed_points_s(&m);
        let at_pulse = disease_free_periodic_s(&m, 0.0).unwrap();
        assert!((at_pulse - fp.x1).abs() < 1e-14);
        for n in 1..5 {
            let v = disease_free_periodic_s(&m, n as f64 * m.period).unwrap();
            assert!((v - fp.x1).abs() < 1e-12);
        }
        // Periodicity on a sampled grid.
        for k in 0..40 {
            let t = 0.1 * k as f64;
            let v0 = disease_free_periodic_s(&m, t).unwrap();
            let v1 = disease_free_periodic_s(&m, t + m.period).unwrap();
            assert!((v0 - v1).abs() < 1e-12);
        }
        // Pre-jump limit reproduces the fixed point through the jump.
        let pre = disease_free_phase(&m, m.period).unwrap();
        assert!(((1.0 - m.p) * pre - fp.x1).abs() < 1e-13);
    }

    #[test]
    fn disease_free_orbit_independent_of_transmission() {
        let base = baseline(0.3);
        let mut other = baseline(0.3).with_seasonality(2.0, 3.0);
        other.beta0 = 5.5;
        for k in 0..20 {
            let t = 0.21 * k as f64;
            let v0 = disease_free_periodic_s(&base, t).unwrap();
            let v1 = disease_free_periodic_s(&other, t).unwrap();
            assert_eq!(v0, v1);
        }
    }

    #[test]
    fn disease_free_orbit_requires_p_below_p1() {
        assert!(matches!(
            disease_free_periodic_s(&baseline(0.99), 1.0),
            Err(Error::Existence(_))
        ));
    }

    #[test]
    fn orbit_integral_identity_against_quadrature() {
        let m = baseline(0.3);
        let analytic = disease_free_orbit_integral(&m).unwrap();
        assert!((analytic - 3.643_325_056_061_267_6).abs() < 1e-14);
        let quadrature = quad::adaptive_simpson(
            |u| disease_free_phase(&m, u).unwrap(),
            0.0,
            m.period,
            1e-10,
            40,
        )
        .unwrap();
        assert!((quadrature - analytic).abs() < 1e-8);
    }

    #[test]
    fn growth_factor_neutral_at_s_c() {
        let m = baseline(0.3);
        let v = strobe_i_growth_factor(&m, m.s_c() * m.period);
        assert!((v - 1.0).abs() < 1e-12);
        // No susceptibles: disease dies.
        assert!(strobe_i_growth_factor(&m, 0.0) < 1.0);
        // Worked value at the disease-free orbit integral.
        let g = strobe_i_growth_factor(&m, disease_free_orbit_integral(&m).unwrap());
        assert!((g - 1.614_447_108_617_667).abs() < 1e-12);
    }

    #[test]
    fn threshold_values_baseline_rates() {
        let m = baseline(0.3);
        let s = threshold_summary(&m);
        assert!((s.s_c - 0.777_777_777_777_777_8).abs() < 1e-15);
        assert!((s.r0 - 1.285_714_285_714_285_7).abs() < 1e-15);
        assert!((s.p1 - 0.981_684_361_111_266).abs() < 1e-12);
        assert!((s.p2.unwrap() - 0.588_887_709_492_813).abs() < 1e-12);
    }

    #[test]
    fn p2_unavailable_when_r0_below_one() {
        // A = 0.5 < S_c = 0.7/0.9.
        let m = ModelParams::new(0.5, 0.9, 0.2, 0.5).with_pulse(0.3, 4.0);
        assert!(m.r0() <= 1.0);
        let curves = ThresholdCurves::from_params(&m);
        assert!(curves.p2(4.0).is_err());
        assert!(curves.t2(0.3).is_err());
        assert!(threshold_summary(&m).p2.is_none());
    }

    #[test]
    fn p1_approaches_zero_with_t() {
        let curves = ThresholdCurves::from_params(&baseline(0.3));
        assert!(curves.p1(1e-12) < 2e-12);
    }

    #[test]
    fn inverse_consistency_on_log_grid() {
        let curves = ThresholdCurves::from_params(&baseline(0.3));
        let mut t = 0.01;
        while t <= 8.0 {
            let p1 = curves.p1(t);
            let p2 = curves.p2(t).unwrap();
            assert!(
                (curves.t1(p1).unwrap() - t).abs() <= 1e-12 * t.max(1.0),
                "T1(p1({t})) drift"
            );
            assert!(
                (curves.t2(p2).unwrap() - t).abs() <= 1e-12 * t.max(1.0),
                "T2(p2({t})) drift"
            );
            t *= 1.6;
        }
    }

    #[test]
    fn p1_dominates_p2() {
        let curves = ThresholdCurves::from_params(&baseline(0.3));
        let mut t = 1e-3;
        while t < 50.0 {
            assert!(curves.p1(t) > curves.p2(t).unwrap());
            t *= 2.0;
        }
    }

    #[test]
    fn reproduction_number_properties() {
        let m0 = baseline(0.0);
        assert_eq!(reproduction_number_rp(&m0), m0.r0());

        let m = baseline(0.3);
        assert!((reproduction_number_rp(&m) - 1.171_068_768_019_693).abs() < 1e-12);

        // Large T recovers R_0 (no-vaccination limit).
        let slow = baseline(0.3).with_pulse(0.3, 1e6);
        assert!((reproduction_number_rp(&slow) - m.r0()).abs() < 1e-6);

        // p = 1 diverges to -inf.
        let full = baseline(1.0);
        assert_eq!(reproduction_number_rp(&full), f64::NEG_INFINITY);
    }

    #[test]
    fn rp_oracle_via_quadrature() {
        // R_p = (1 / (S_c T)) int S~ dt.
        let m = baseline(0.3);
        let integral = quad::adaptive_simpson(
            |u| disease_free_phase(&m, u).unwrap(),
            0.0,
            m.period,
            1e-10,
            40,
        )
        .unwrap();
        let oracle = integral / (m.s_c() * m.period);
        assert!((reproduction_number_rp(&m) - oracle).abs() < 1e-8);
    }

    #[test]
    fn rp_monotonicity_grid() {
        // Finite-difference sign checks: increasing in T, decreasing in p.
        for &p in &[0.05, 0.3, 0.6, 0.9] {
            for &t in &[0.5, 1.0, 2.0, 5.0] {
                let base = reproduction_number_rp(&baseline(p).with_pulse(p, t));
                let bigger_t = reproduction_number_rp(&baseline(p).with_pulse(p, t + 1e-4));
                let bigger_p = reproduction_number_rp(&baseline(p).with_pulse(p + 1e-4, t));
                assert!(bigger_t > base, "R_p not increasing in T at (T={t}, p={p})");
                assert!(bigger_p < base, "R_p not decreasing in p at (T={t}, p={p})");
            }
        }
    }

    #[test]
    fn seasonal_threshold_reduces_to_p2() {
        let m = slow_seasonal(0.0);
        let curves = ThresholdCurves::from_params(&m);
        assert_eq!(p2_seasonal(&m).unwrap(), curves.p2(m.period).unwrap());
    }

    #[test]
    fn seasonal_threshold_exceeds_p2() {
        for gamma in [0.1, 0.5, 1.0] {
            let m = slow_seasonal(gamma);
            let p2 = ThresholdCurves::from_params(&m).p2(m.period).unwrap();
            assert!(p2_seasonal(&m).unwrap() > p2);
        }
    }

    #[test]
    fn seasonal_threshold_against_composite_simpson() {
        // Independent oracle: fixed-resolution composite Simpson.
        let m = slow_seasonal(0.5);
        let n = 8192;
        let h = m.period / n as f64;
        let f = |t: f64| {
            (1.0 + (m.omega * t).cos()) * disease_free_phase(&m, t).unwrap()
        };
        let mut acc = f(0.0) + f(m.period);
        for k in 1..n {
            acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = acc * h / 3.0;
        let oracle = -(-((m.a - m.s_c()) * m.period + m.gamma * integral)).exp_m1();
        let v = p2_seasonal(&m).unwrap();
        assert!((v - oracle).abs() <= 1e-8, "adaptive {v} vs simpson {oracle}");
        assert!((v - 0.615_784_991_270_317_9).abs() < 1e-10);
    }

    #[test]
    fn floquet_analytic_worked_values() {
        let m = baseline(0.3);
        let f = floquet_analytic(&m, OrbitKind::DiseaseFreePeriodic).unwrap();
        assert!((f.lambda1 - 0.026_165_198_412_477).abs() < 1e-12);
        assert!((f.lambda2 - 1.614_447_108_617_667).abs() < 1e-12);
        assert!(f.lambda2 > 1.0); // unstable in region 4

        let m8 = baseline(0.8);
        let f8 = floquet_analytic(&m8, OrbitKind::DiseaseFreePeriodic).unwrap();
        assert!((f8.lambda1 - 0.091_578_194_443_671).abs() < 1e-12);
        assert!((f8.lambda2 - 0.522_832_506_644_99).abs() < 1e-12);
        assert!(f8.lambda2 < 1.0); // stable in region 3
    }

    #[test]
    fn floquet_origin_full_coverage() {
        let m = baseline(1.0);
        let f = floquet_analytic(&m, OrbitKind::Origin).unwrap();
        assert_eq!(f.lambda1, 0.0);
        assert!((f.lambda2 - (-2.8f64).exp()).abs() < 1e-15);
        assert!(f.lambda2 < 1.0);
    }

    #[test]
    fn floquet_simplification_identity() {
        // (1-p) exp(AT - 2 int S~) == e^{-AT} / (1-p) to machine precision.
        for p in [0.1, 0.3, 0.5, 0.8] {
            let m = baseline(p);
            let int_s = disease_free_orbit_integral(&m).unwrap();
            let raw = (1.0 - p) * (m.a * m.period - 2.0 * int_s).exp();
            let simplified = (-m.a * m.period).exp() / (1.0 - p);
            assert!((raw - simplified).abs() <= 1e-14 * simplified);
        }
    }

    #[test]
    fn classification_baseline_rates() {
        assert_eq!(classify_analytic(&baseline(1.0)).unwrap(), RegimeLabel::FullCoverage);
        assert_eq!(
            classify_analytic(&baseline(0.99)).unwrap(),
            RegimeLabel::TrivialDiseaseFree
        );
        assert_eq!(
            classify_analytic(&baseline(0.7)).unwrap(),
            RegimeLabel::NontrivialDiseaseFree
        );
        assert_eq!(
            classify_analytic(&baseline(0.3)).unwrap(),
            RegimeLabel::EndemicPeriodic
        );
        assert_eq!(
            classify_analytic(&baseline(0.0)).unwrap(),
            RegimeLabel::EndemicEquilibrium
        );
    }

    #[test]
    fn classification_boundary_hits() {
        let curves = ThresholdCurves::from_params(&baseline(0.3));
        let on_p1 = baseline(curves.p1(4.0));
        assert_eq!(
            classify_analytic(&on_p1).unwrap(),
            RegimeLabel::SaddleNodeBoundary
        );
        let on_p2 = baseline(curves.p2(4.0).unwrap());
        assert_eq!(
            classify_analytic(&on_p2).unwrap(),
            RegimeLabel::TranscriticalBoundary
        );
    }

    #[test]
    fn classification_rejects_forced_model() {
        let m = baseline(0.3).with_seasonality(0.5, 6.0);
        assert!(classify_analytic(&m).is_err());
    }

    #[test]
    fn endemic_equilibrium_baseline_rates() {
        let (s, i) = endemic_equilibrium(&baseline(0.0)).unwrap();
        assert!((s - 0.777_777_777_777_777_8).abs() < 1e-15);
        assert!((i - 0.246_913_580_246_913_57).abs() < 1e-15);
        let sub = ModelParams::new(0.5, 0.9, 0.2, 0.5);
        assert!(endemic_equilibrium(&sub).is_err());
    }

    proptest! {
        // (lambda2 < 1) <=> (R_p < 1) <=> (p > p2(T)) on valid parameters
        // with A > S_c and an existing disease-free orbit.
        #[test]
        fn threshold_equivalences(
            a in 0.3..1.0f64,
            beta_scale in 1.1..6.0f64,
            sg in 0.02..0.6f64,
            t in 0.2..8.0f64,
            pfrac in 0.01..0.99f64,
        ) {
            let beta0 = beta_scale * sg / a; // ensures R_0 = beta_scale > 1
            let mut m = ModelParams::new(a, beta0, sg / 2.0, sg / 2.0);
            let curves = ThresholdCurves::from_params(&m);
            let p = pfrac * curves.p1(t); // below p1 so the orbit exists
            m = m.with_pulse(p, t);

            let lambda2 = floquet_analytic(&m, OrbitKind::DiseaseFreePeriodic)
                .unwrap()
                .lambda2;
            let rp = reproduction_number_rp(&m);
            let p2 = curves.p2(t).unwrap();

            prop_assert_eq!(lambda2 < 1.0, rp < 1.0);
            prop_assert_eq!(rp < 1.0, p > p2);
        }

        // Fixed-point residual of the strobe map stays at rounding level.
        #[test]
        fn strobe_fixed_point_residual(
            t in 0.2..8.0f64,
            p in 0.0..0.95f64,
        ) {
            let m = ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(p, t);
            let fp = fixed_points_s(&m);
            if !fp.nonphysical {
                prop_assert!((strobe_s(&m, fp.x1) - fp.x1).abs() <= 1e-12);
            }
            prop_assert_eq!(strobe_s(&m, 0.0), 0.0);
        }
    }
}
