//! `(T, p)` parameter-plane sweeps with analytic overlay.

use crate::analysis::classify::{classify_empirical, ClassifySettings, LyapunovPolicy};
use crate::closedform::{classify_analytic, RegimeLabel, ThresholdCurves};
use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::model::{ModelParams, State};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Grid specification plus per-cell settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepGrid {
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub initial: State,
    pub settings: ClassifySettings,
    pub config: IntegratorConfig,
    /// Half-width (in `p`) of the band around `p1(T)`/`p2(T)` excluded from
    /// agreement statistics; bifurcation slowdown makes finite-horizon
    /// labels unreliable there.
    pub boundary_band: f64,
}

impl SweepGrid {
    /// Grid with default cell settings: shared initial condition
    /// `(0.5, 0.4)`, no per-cell Lyapunov runs, boundary band 0.02.
    pub fn new(t_values: Vec<f64>, p_values: Vec<f64>) -> Result<Self> {
        let grid = Self {
            t_values,
            p_values,
            initial: State::initial(0.5, 0.4),
            settings: ClassifySettings {
                lyapunov: LyapunovPolicy::Never,
                ..Default::default()
            },
            config: IntegratorConfig::default(),
            boundary_band: 0.02,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_values.is_empty() || self.p_values.is_empty() {
            return Err(Error::InvalidParams("sweep axes must be non-empty".into()));
        }
        for w in self.t_values.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParams(
                    "T values must be strictly increasing".into(),
                ));
            }
        }
        for w in self.p_values.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParams(
                    "p values must be strictly increasing".into(),
                ));
            }
        }
        if self.t_values[0] <= 0.0 {
            return Err(Error::InvalidParams("T values must be positive".into()));
        }
        if self.p_values[0] < 0.0 || *self.p_values.last().unwrap() > 1.0 {
            return Err(Error::InvalidParams("p values must lie in [0, 1]".into()));
        }
        if self.boundary_band < 0.0 {
            return Err(Error::InvalidParams("boundary_band must be >= 0".into()));
        }
        Ok(())
    }

    /// Evenly spaced grid over `[t_min, t_max] x [p_min, p_max]`.
    pub fn linspace(
        t_min: f64,
        t_max: f64,
        t_steps: usize,
        p_min: f64,
        p_max: f64,
        p_steps: usize,
    ) -> Result<Self> {
        let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            if n == 1 {
                return vec![lo];
            }
            (0..n)
                .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
                .collect()
        };
        Self::new(lin(t_min, t_max, t_steps), lin(p_min, p_max, p_steps))
    }
}

/// One grid cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub t: f64,
    pub p: f64,
    /// Analytic label; `None` when the analytic classifier does not apply
    /// (forced model, `R_0 <= 1`).
    pub analytic: Option<RegimeLabel>,
    /// Empirical label; `None` when the cell run failed.
    pub empirical: Option<RegimeLabel>,
    pub lyapunov: Option<f64>,
    pub residual: Option<f64>,
    /// Within `boundary_band` of `p1(T)` or `p2(T)` in `p`.
    pub near_boundary: bool,
    /// Per-cell failure, recorded instead of aborting the sweep.
    pub error: Option<String>,
}

/// Sweep outcome. `cells` is row-major: the outer loop runs over
/// `t_values`, the inner one over `p_values`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
    /// Cells where analytic and empirical labels were comparable (both
    /// present, away from the boundary band).
    pub comparable: usize,
    /// Comparable cells with matching labels.
    pub matched: usize,
    /// Indices into `cells` of comparable cells whose labels disagree.
    pub discrepancies: Vec<usize>,
}

impl SweepReport {
    /// Agreement fraction over comparable cells (1.0 when nothing was
    /// comparable).
    pub fn agreement_fraction(&self) -> f64 {
        if self.comparable == 0 {
            1.0
        } else {
            self.matched as f64 / self.comparable as f64
        }
    }
}

fn evaluate_cell(base: &ModelParams, grid: &SweepGrid, t: f64, p: f64) -> SweepCell {
    let params = base.clone().with_pulse(p, t);
    let analytic = classify_analytic(&params).ok();
    let near_boundary = {
        let curves = ThresholdCurves::from_params(&params);
        let d1 = (p - curves.p1(t)).abs();
        let d2 = curves.p2(t).map(|p2| (p - p2).abs()).unwrap_or(f64::INFINITY);
        d1 < grid.boundary_band || d2 < grid.boundary_band
    };
    match classify_empirical(&params, &grid.config, grid.initial, None, &grid.settings) {
        Ok(report) => SweepCell {
            t,
            p,
            analytic,
            empirical: Some(report.label),
            lyapunov: report.lyapunov,
            residual: Some(report.residual),
            near_boundary,
            error: None,
        },
        Err(e) => SweepCell {
            t,
            p,
            analytic,
            empirical: None,
            lyapunov: None,
            residual: None,
            near_boundary,
            error: Some(e.to_string()),
        },
    }
}

/// Classifies every `(T, p)` cell empirically (cells run in parallel) and
/// overlays the analytic labels where they exist. Per-cell failures are
/// recorded in the cell, not propagated.
pub fn sweep_bifurcation_plane(base: &ModelParams, grid: &SweepGrid) -> Result<SweepReport> {
    base.validate()?;
    grid.validate()?;

    let coords: Vec<(f64, f64)> = grid
        .t_values
        .iter()
        .flat_map(|&t| grid.p_values.iter().map(move |&p| (t, p)))
        .collect();

    let cells: Vec<SweepCell> = coords
        .par_iter()
        .map(|&(t, p)| evaluate_cell(base, grid, t, p))
        .collect();

    let mut comparable = 0;
    let mut matched = 0;
    let mut discrepancies = Vec::new();
    for (idx, cell) in cells.iter().enumerate() {
        let (Some(analytic), Some(empirical)) = (cell.analytic, cell.empirical) else {
            continue;
        };
        if cell.near_boundary || analytic.region_number().is_none() {
            continue;
        }
        comparable += 1;
        if analytic == empirical {
            matched += 1;
        } else {
            discrepancies.push(idx);
        }
    }

    Ok(SweepReport {
        cells,
        comparable,
        matched,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> ModelParams {
        ModelParams::new(1.0, 0.9, 0.2, 0.5)
    }

    #[test]
    fn single_cell_extremes() {
        let no_vax = SweepGrid::new(vec![4.0], vec![0.0]).unwrap();
        let report = sweep_bifurcation_plane(&baseline(), &no_vax).unwrap();
        assert_eq!(report.cells.len(), 1);
        assert_eq!(
            report.cells[0].empirical,
            Some(RegimeLabel::EndemicEquilibrium)
        );
        assert_eq!(report.matched, 1);

        let full = SweepGrid::new(vec![4.0], vec![1.0]).unwrap();
        let report = sweep_bifurcation_plane(&baseline(), &full).unwrap();
        assert_eq!(report.cells[0].empirical, Some(RegimeLabel::FullCoverage));
        assert_eq!(report.agreement_fraction(), 1.0);
    }

    #[test]
    fn small_grid_matches_analytic() {
        let grid = SweepGrid::linspace(2.0, 6.0, 3, 0.1, 0.9, 5).unwrap();
        let report = sweep_bifurcation_plane(&baseline(), &grid).unwrap();
        assert_eq!(report.cells.len(), 15);
        assert!(report.comparable > 0);
        assert_eq!(
            report.matched, report.comparable,
            "discrepancies at {:?}",
            report.discrepancies
        );
        // Row-major layout.
        assert_eq!(report.cells[0].t, 2.0);
        assert_eq!(report.cells[0].p, 0.1);
        assert_eq!(report.cells[5].t, 4.0);
    }

    #[test]
    fn grid_validation() {
        assert!(SweepGrid::new(vec![], vec![0.5]).is_err());
        assert!(SweepGrid::new(vec![4.0, 3.0], vec![0.5]).is_err());
        assert!(SweepGrid::new(vec![4.0], vec![0.5, 1.2]).is_err());
        assert!(SweepGrid::new(vec![-1.0], vec![0.5]).is_err());
    }
}
