//! CSV/JSON rendering of the library's result types.
//!
//! CSV uses a header row, `.` decimal separator and 17 significant digits
//! so any plotting tool can reproduce the numbers exactly.

use crate::analysis::SweepReport;
use crate::integrator::{SampleKind, Trajectory};

/// 17 significant digits, locale-independent.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Trajectory rows: `t,S,I,R[,theta],impulse` with `impulse` 0 = interior,
/// 1 = pre-jump, 2 = post-jump.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let with_theta = traj.thetas.is_some();
    let mut out = String::new();
    out.push_str(if with_theta {
        "t,S,I,R,theta,impulse\n"
    } else {
        "t,S,I,R,impulse\n"
    });
    for (idx, st) in traj.samples.iter().enumerate() {
        let marker = match traj.kind(idx) {
            SampleKind::Interior => 0,
            SampleKind::PreImpulse => 1,
            SampleKind::PostImpulse => 2,
        };
        out.push_str(&fmt_f64(st.t));
        out.push(',');
        out.push_str(&fmt_f64(st.s));
        out.push(',');
        out.push_str(&fmt_f64(st.i));
        out.push(',');
        out.push_str(&fmt_f64(st.r));
        out.push(',');
        if let Some(thetas) = &traj.thetas {
            out.push_str(&fmt_f64(thetas[idx]));
            out.push(',');
        }
        out.push_str(&marker.to_string());
        out.push('\n');
    }
    out
}

/// Threshold-curve rows: `T,p1,p2[,p2seas]`.
pub fn curves_csv(rows: &[(f64, f64, f64, Option<f64>)], seasonal: bool) -> String {
    let mut out = String::new();
    out.push_str(if seasonal { "T,p1,p2,p2seas\n" } else { "T,p1,p2\n" });
    for &(t, p1, p2, p2seas) in rows {
        out.push_str(&fmt_f64(t));
        out.push(',');
        out.push_str(&fmt_f64(p1));
        out.push(',');
        out.push_str(&fmt_f64(p2));
        if seasonal {
            out.push(',');
            out.push_str(&fmt_opt(p2seas));
        }
        out.push('\n');
    }
    out
}

/// Sweep matrix rows: `T,p,label_analytic,label_empirical,lyapunov,residual`.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("T,p,label_analytic,label_empirical,lyapunov,residual\n");
    for cell in &report.cells {
        out.push_str(&fmt_f64(cell.t));
        out.push(',');
        out.push_str(&fmt_f64(cell.p));
        out.push(',');
        if let Some(l) = cell.analytic {
            out.push_str(l.as_str());
        }
        out.push(',');
        if let Some(l) = cell.empirical {
            out.push_str(l.as_str());
        }
        out.push(',');
        out.push_str(&fmt_opt(cell.lyapunov));
        out.push(',');
        out.push_str(&fmt_opt(cell.residual));
        out.push('\n');
    }
    out
}
