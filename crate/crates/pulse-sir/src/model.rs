//! Model definition: parameters, seasonal forcing, vector field and the
//! pulse (jump) map.
//!
//! The flow between pulses is
//!
//! ```text
//! S' = S(A - S) - beta_gamma(t) I S
//! I' = beta_gamma(t) I S - (sigma + g) I
//! R' = g I - mu R
//! ```
//!
//! with `beta_gamma(t) = beta0 (1 + gamma Psi(omega t))`, and at every
//! `t = nT` the jump `S -> (1-p) S`, `R -> R + p S` is applied while `I`
//! is untouched.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Shape of the seasonal forcing profile `Psi`.
///
/// `Psi` must be periodic (period `tau` in its own argument) and
/// non-negative, so that `beta_gamma = beta0 (1 + gamma Psi) >= beta0 > 0`
/// for every `gamma >= 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub enum SeasonalForcing {
    /// `Psi(u) = 1 + cos(u)`, period `2π`. Smooth, non-negative, exactly two
    /// nondegenerate critical points per period. This is the default and the
    /// profile used throughout the numeric suites; its normalization
    /// (amplitude 2, mean 1) is a convention of this crate.
    #[default]
    CosineRaised,
    /// Piecewise-linear profile from tabulated `(u, Psi(u))` knots.
    Tabulated(TabulatedPsi),
}

/// Tabulated forcing profile, linearly interpolated and wrapped with period
/// `tau` = the last knot abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPsi {
    knots: Vec<(f64, f64)>,
}

impl TabulatedPsi {
    /// Builds a profile from knots `(u, value)`.
    ///
    /// Requirements: at least 3 knots, abscissas strictly increasing and
    /// starting at 0, all values finite and non-negative, and the last value
    /// equal to the first (periodic closure). The period is the last
    /// abscissa.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 3 {
            return Err(Error::InvalidParams(
                "tabulated Psi needs at least 3 knots".into(),
            ));
        }
        if knots[0].0 != 0.0 {
            return Err(Error::InvalidParams(
                "tabulated Psi must start at u = 0".into(),
            ));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParams(
                    "tabulated Psi abscissas must be strictly increasing".into(),
                ));
            }
        }
        for &(u, v) in &knots {
            if !u.is_finite() || !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "tabulated Psi value at u = {u} must be finite and non-negative"
                )));
            }
        }
        let first = knots[0].1;
        let last = knots[knots.len() - 1].1;
        if (first - last).abs() > 1e-12 * (1.0 + first.abs()) {
            return Err(Error::InvalidParams(
                "tabulated Psi must close periodically: Psi(tau) = Psi(0)".into(),
            ));
        }
        Ok(Self { knots })
    }

    pub fn tau(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    fn eval(&self, u: f64) -> f64 {
        let tau = self.tau();
        let mut x = u % tau;
        if x < 0.0 {
            x += tau;
        }
        // binary search for the bracketing knot pair
        let idx = self
            .knots
            .partition_point(|&(k, _)| k <= x)
            .saturating_sub(1)
            .min(self.knots.len() - 2);
        let (u0, v0) = self.knots[idx];
        let (u1, v1) = self.knots[idx + 1];
        v0 + (v1 - v0) * (x - u0) / (u1 - u0)
    }
}

impl SeasonalForcing {
    /// Period of `Psi` in its own argument.
    pub fn tau(&self) -> f64 {
        match self {
            SeasonalForcing::CosineRaised => TAU,
            SeasonalForcing::Tabulated(t) => t.tau(),
        }
    }

    /// Evaluates `Psi(u)`.
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            SeasonalForcing::CosineRaised => 1.0 + u.cos(),
            SeasonalForcing::Tabulated(t) => t.eval(u),
        }
    }
}

/// All rate constants, the pulse schedule and the seasonal forcing settings
/// for one model instance.
///
/// Note on `mu`: the reduced `(S, I)` analysis only involves the combined
/// removal rate `sigma = mu + d`; `mu` alone enters the decoupled `R`
/// equation. Constructors default to `mu = sigma` (no disease-induced
/// deaths, `d = 0`); override with [`ModelParams::with_mu`] when the split
/// matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Carrying capacity of the susceptibles, in `(0, 1]`.
    pub a: f64,
    /// Baseline transmission rate.
    pub beta0: f64,
    /// Combined removal rate of infectious individuals (`mu + d`).
    pub sigma: f64,
    /// Cure rate.
    pub g: f64,
    /// Natural death rate; used only by the `R` equation.
    pub mu: f64,
    /// Pulse vaccination proportion, in `[0, 1]`.
    pub p: f64,
    /// Pulse period `T > 0`.
    pub period: f64,
    /// Seasonal amplitude (`gamma = 0` switches forcing off).
    pub gamma: f64,
    /// Seasonal frequency.
    pub omega: f64,
    /// Forcing profile `Psi`.
    pub psi: SeasonalForcing,
}

impl ModelParams {
    /// New parameter set with the given rates, no vaccination and no
    /// seasonality. `mu` defaults to `sigma`.
    pub fn new(a: f64, beta0: f64, sigma: f64, g: f64) -> Self {
        Self {
            a,
            beta0,
            sigma,
            g,
            mu: sigma,
            p: 0.0,
            period: 1.0,
            gamma: 0.0,
            omega: 1.0,
            psi: SeasonalForcing::CosineRaised,
        }
    }

    /// Sets the pulse schedule.
    pub fn with_pulse(mut self, p: f64, period: f64) -> Self {
        self.p = p;
        self.period = period;
        self
    }

    /// Sets the seasonal forcing amplitude and frequency.
    pub fn with_seasonality(mut self, gamma: f64, omega: f64) -> Self {
        self.gamma = gamma;
        self.omega = omega;
        self
    }

    /// Overrides the natural death rate used by the `R` equation.
    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        for (name, v) in [
            ("A", self.a),
            ("beta0", self.beta0),
            ("sigma", self.sigma),
            ("g", self.g),
            ("mu", self.mu),
            ("p", self.p),
            ("T", self.period),
            ("gamma", self.gamma),
            ("omega", self.omega),
        ] {
            if !v.is_finite() {
                return fail(format!("{name} must be finite, got {v}"));
            }
        }
        if self.a <= 0.0 || self.a > 1.0 {
            return fail(format!("A must lie in (0, 1], got {}", self.a));
        }
        if self.beta0 <= 0.0 {
            return fail(format!("beta0 must be positive, got {}", self.beta0));
        }
        if self.sigma < 0.0 || self.g < 0.0 || self.mu < 0.0 || self.gamma < 0.0 {
            return fail("sigma, g, mu and gamma must be non-negative".into());
        }
        if self.sigma + self.g <= 0.0 {
            return fail("sigma + g must be positive (S_c would be degenerate)".into());
        }
        if !(0.0..=1.0).contains(&self.p) {
            return fail(format!("p must lie in [0, 1], got {}", self.p));
        }
        if self.period <= 0.0 {
            return fail(format!("T must be positive, got {}", self.period));
        }
        if self.omega <= 0.0 {
            return fail(format!("omega must be positive, got {}", self.omega));
        }
        if let SeasonalForcing::Tabulated(t) = &self.psi {
            if t.knots.len() < 3 {
                return fail("tabulated Psi must have at least 3 knots".into());
            }
        }
        Ok(())
    }

    /// Epidemic critical threshold `S_c = (sigma + g) / beta0`.
    pub fn s_c(&self) -> f64 {
        (self.sigma + self.g) / self.beta0
    }

    /// Basic reproduction number of the unvaccinated model,
    /// `R_0 = A beta0 / (sigma + g)`.
    pub fn r0(&self) -> f64 {
        self.a * self.beta0 / (self.sigma + self.g)
    }

    /// Upper bound of the trapping region for `S + I`:
    /// `A (sigma + g + A) / (sigma + g)`.
    pub fn trapping_bound(&self) -> f64 {
        self.a * (self.sigma + self.g + self.a) / (self.sigma + self.g)
    }

    /// Time-dependent transmission rate `beta_gamma(t) = beta0 (1 + gamma
    /// Psi(omega t))`; equals `beta0` exactly when `gamma = 0`.
    pub fn beta_gamma(&self, t: f64) -> f64 {
        self.beta_at_phase(self.omega * t)
    }

    /// Transmission rate as a function of the forcing phase `u = omega t`.
    /// The suspended system evaluates the forcing through this entry point
    /// so that a phase offset `theta0` shifts the season.
    pub fn beta_at_phase(&self, u: f64) -> f64 {
        if self.gamma == 0.0 {
            self.beta0
        } else {
            self.beta0 * (1.0 + self.gamma * self.psi.eval(u))
        }
    }

    /// Right-hand side of the flow at state `s` (uses `s.t` for the
    /// seasonal phase). Rejects non-finite inputs.
    pub fn vector_field(&self, s: &State) -> Result<(f64, f64, f64)> {
        if !(s.s.is_finite() && s.i.is_finite() && s.r.is_finite() && s.t.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite state (S={}, I={}, R={}, t={})",
                s.s, s.i, s.r, s.t
            )));
        }
        Ok(self.rhs(s.t, s.s, s.i, s.r))
    }

    /// Unchecked right-hand side; the integrator monitors finiteness itself.
    #[inline]
    pub(crate) fn rhs(&self, t: f64, s: f64, i: f64, r: f64) -> (f64, f64, f64) {
        let beta = self.beta_gamma(t);
        self.rhs_with_beta(beta, s, i, r)
    }

    #[inline]
    pub(crate) fn rhs_with_beta(&self, beta: f64, s: f64, i: f64, r: f64) -> (f64, f64, f64) {
        let infection = beta * i * s;
        let ds = s * (self.a - s) - infection;
        let di = infection - (self.sigma + self.g) * i;
        let dr = self.g * i - self.mu * r;
        (ds, di, dr)
    }

    /// Applies the vaccination jump `(S, I, R) -> ((1-p) S, I, R + p S)`.
    /// The caller guarantees `s.t` is a pulse instant; the jump conserves
    /// `S + I + R` up to rounding.
    pub fn apply_impulse(&self, s: &State) -> State {
        State {
            s: (1.0 - self.p) * s.s,
            i: s.i,
            r: s.r + self.p * s.s,
            t: s.t,
        }
    }

    /// True when the state lies in the positively flow-invariant region
    /// `0 <= S <= A`, `0 <= S + I <= A(sigma+g+A)/(sigma+g)` (up to `tol`).
    pub fn in_trapping_region(&self, s: &State, tol: f64) -> bool {
        s.s >= -tol
            && s.i >= -tol
            && s.s <= self.a + tol
            && s.s + s.i <= self.trapping_bound() + tol
    }
}

/// A point of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub s: f64,
    pub i: f64,
    pub r: f64,
    /// Time at which the point was sampled.
    pub t: f64,
}

impl State {
    pub fn new(s: f64, i: f64, r: f64, t: f64) -> Self {
        Self { s, i, r, t }
    }

    /// Initial condition at `t = 0` with no recovered individuals.
    pub fn initial(s: f64, i: f64) -> Self {
        Self::new(s, i, 0.0, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn baseline() -> ModelParams {
        ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(0.3, 4.0)
    }

    #[test]
    fn beta_without_forcing_is_beta0() {
        let m = baseline();
        for t in [0.0, 0.31, 7.9, 1e4] {
            assert_eq!(m.beta_gamma(t), 0.9);
        }
    }

    #[test]
    fn beta_at_forcing_minimum() {
        // Psi(u) = 1 + cos(u) vanishes at u = pi, so beta reduces to beta0.
        let m = ModelParams::new(1.0, 0.9, 0.2, 0.5).with_seasonality(1.0, 1.0);
        let t = std::f64::consts::PI;
        assert!((m.beta_gamma(t) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn beta_strong_seasonal_peak() {
        // gamma = 4.89, beta0 = 2, Psi(0) = 2 -> 2 (1 + 9.78) = 21.56.
        let m = ModelParams::new(1.0, 2.0, 0.2, 0.5).with_seasonality(4.89, 6.0);
        assert!((m.beta_gamma(0.0) - 21.56).abs() < 1e-12);
    }

    #[test]
    fn vector_field_disease_free_equilibrium() {
        let m = ModelParams::new(1.0, 0.9, 0.2, 0.5);
        let (ds, di, dr) = m
            .vector_field(&State::new(m.a, 0.0, 0.0, 0.0))
            .unwrap();
        assert_eq!((ds, di, dr), (0.0, 0.0, 0.0));
    }

    #[test]
    fn vector_field_neutral_at_s_c() {
        let m = ModelParams::new(1.0, 0.9, 0.2, 0.5);
        let (_, di, _) = m
            .vector_field(&State::new(m.s_c(), 0.37, 0.0, 0.0))
            .unwrap();
        assert!(di.abs() < 1e-15);
    }

    #[test]
    fn vector_field_baseline_rates_point() {
        let m = ModelParams::new(1.0, 0.9, 0.2, 0.5);
        let (ds, di, _) = m
            .vector_field(&State::new(0.5, 0.4, 0.0, 0.0))
            .unwrap();
        assert!((ds - 0.07).abs() < 1e-15);
        assert!((di + 0.1).abs() < 1e-15);
    }

    #[test]
    fn vector_field_rejects_non_finite() {
        let m = baseline();
        assert!(m
            .vector_field(&State::new(f64::NAN, 0.1, 0.0, 0.0))
            .is_err());
        assert!(m
            .vector_field(&State::new(0.1, f64::INFINITY, 0.0, 0.0))
            .is_err());
    }

    #[test]
    fn impulse_identity_when_p_zero() {
        let m = ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(0.0, 4.0);
        let x = State::new(0.5, 0.2, 0.3, 4.0);
        assert_eq!(m.apply_impulse(&x), x);
    }

    #[test]
    fn impulse_full_coverage() {
        let m = ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(1.0, 4.0);
        let x = m.apply_impulse(&State::new(0.5, 0.2, 0.3, 4.0));
        assert_eq!((x.s, x.i, x.r), (0.0, 0.2, 0.8));
    }

    #[test]
    fn impulse_partial_coverage() {
        let m = ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(0.4, 4.0);
        let x = m.apply_impulse(&State::new(0.5, 0.2, 0.3, 4.0));
        assert!((x.s - 0.3).abs() < 1e-15);
        assert_eq!(x.i, 0.2);
        assert!((x.r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sign_structure_of_di() {
        let m = ModelParams::new(1.0, 0.9, 0.2, 0.5);
        let sc = m.s_c();
        for (s, want_sign) in [(sc - 0.1, -1.0), (sc + 0.1, 1.0)] {
            let (_, di, _) = m.vector_field(&State::new(s, 0.25, 0.0, 0.0)).unwrap();
            assert!(di * want_sign > 0.0, "S = {s}: dI = {di}");
        }
    }

    #[test]
    fn tabulated_psi_interpolates_and_wraps() {
        let psi = TabulatedPsi::new(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 1.0)]).unwrap();
        assert_eq!(psi.tau(), 2.0);
        assert!((psi.eval(0.5) - 2.0).abs() < 1e-15);
        assert!((psi.eval(2.5) - 2.0).abs() < 1e-15); // wrapped
        assert!((psi.eval(-0.5) - 2.0).abs() < 1e-12); // negative argument
    }

    #[test]
    fn tabulated_psi_rejects_negative_values() {
        assert!(TabulatedPsi::new(vec![(0.0, 1.0), (1.0, -0.1), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn tabulated_psi_rejects_open_profile() {
        assert!(TabulatedPsi::new(vec![(0.0, 1.0), (1.0, 2.0), (2.0, 1.5)]).is_err());
    }

    #[test]
    fn validate_rejects_bad_parameters() {
        assert!(ModelParams::new(0.0, 0.9, 0.2, 0.5).validate().is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.2, 0.5).validate().is_err());
        assert!(baseline().with_pulse(1.5, 4.0).validate().is_err());
        assert!(baseline().with_pulse(0.3, 0.0).validate().is_err());
        assert!(baseline().with_seasonality(-0.1, 1.0).validate().is_err());
        assert!(baseline().validate().is_ok());
    }

    proptest! {
        // Jump conservation: S + I + R is preserved up to rounding.
        #[test]
        fn impulse_conserves_population(
            s in 0.0..2.0f64,
            i in 0.0..2.0f64,
            r in 0.0..2.0f64,
            p in 0.0..=1.0f64,
        ) {
            let m = ModelParams::new(1.0, 0.9, 0.2, 0.5).with_pulse(p, 4.0);
            let before = s + i + r;
            let x = m.apply_impulse(&State::new(s, i, r, 4.0));
            let after = x.s + x.i + x.r;
            prop_assert!((before - after).abs() <= 1e-14 * (1.0 + before));
        }

        // beta_gamma stays positive for every admissible forcing.
        #[test]
        fn beta_gamma_positive(gamma in 0.0..10.0f64, t in -100.0..100.0f64) {
            let m = ModelParams::new(1.0, 0.9, 0.2, 0.5).with_seasonality(gamma, 2.0);
            prop_assert!(m.beta_gamma(t) > 0.0);
        }
    }
}
