//! Stabilization diagrams: eigenvalues as functions of box size.
//!
//! Sweeping the box size `c` drags every level `E_N(c)` downward; where a
//! level crosses a resonance energy it flattens into a plateau whose slope
//! and curvature encode the resonance parameters. This module builds the
//! sweeps, differentiates them analytically, and locates plateaus as
//! (max, min) pairs in the smoothed second derivative.

use crate::model::{BoxGrid, ShellModel};
use crate::numerics;
use crate::spectrum::{
    self, quantization_residual_dc, quantization_residual_dq, Level, SpectrumError,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Error raised while building or analyzing a diagram.
#[derive(Debug, Error)]
pub enum DiagramError {
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    /// The implicit-function derivative is undefined: `|dF/dq| < 1e-12`,
    /// which signals a level collision.
    #[error("degenerate root at q = {q}, c = {c}: |dF/dq| = {df:.3e}")]
    DegenerateRoot { q: f64, c: f64, df: f64 },
    /// No qualifying plateau on the requested level sweep.
    #[error("no plateau identified on level {n}")]
    NoPlateau { n: usize },
}

/// One level `E_N(c)` followed across a box-size grid, together with its
/// analytic first derivative and finite-difference second derivative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelSweep {
    pub model: ShellModel,
    /// 1-based level index.
    pub n: usize,
    pub grid: BoxGrid,
    pub q_of_c: Vec<f64>,
    pub e_of_c: Vec<f64>,
    pub de_dc: Vec<f64>,
    pub d2e_dc2: Vec<f64>,
}

/// A full stabilization diagram: the lowest `n` levels swept over one grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilizationDiagram {
    pub model: ShellModel,
    pub grid: BoxGrid,
    pub sweeps: Vec<LevelSweep>,
}

/// A flat stretch of one level sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Plateau {
    /// Level index the plateau was found on.
    pub n: usize,
    pub c_left: f64,
    pub c_right: f64,
    /// Midpoint `(c_left + c_right) / 2`.
    pub c_center: f64,
    /// Level energy at the midpoint, solved exactly.
    pub e_center: f64,
}

/// Slope of a level along the box-size sweep, by implicit differentiation
/// of the quantization condition:
/// `dE/dc = -2 q (dF/dc) / (dF/dq)`.
pub fn level_derivative(level: &Level, g: f64) -> Result<f64, DiagramError> {
    let (q, c) = (level.q, level.c);
    let fq = quantization_residual_dq(q, g, c);
    if fq.abs() < 1e-12 {
        return Err(DiagramError::DegenerateRoot { q, c, df: fq.abs() });
    }
    Ok(-2.0 * q * quantization_residual_dc(q, g, c) / fq)
}

/// Build the stabilization diagram of the lowest `n_levels` levels over
/// `grid`. First derivatives are analytic; second derivatives come from
/// second-order finite differences of the first.
pub fn build_diagram(
    model: &ShellModel,
    grid: &BoxGrid,
    n_levels: usize,
) -> Result<StabilizationDiagram, DiagramError> {
    let cs = grid.values();
    let mut q_cols = vec![Vec::with_capacity(cs.len()); n_levels];
    let mut e_cols = vec![Vec::with_capacity(cs.len()); n_levels];
    let mut d_cols = vec![Vec::with_capacity(cs.len()); n_levels];
    for &c in &cs {
        let levels = spectrum::solve_levels(model, c, n_levels)?;
        for (k, level) in levels.iter().enumerate() {
            q_cols[k].push(level.q);
            e_cols[k].push(level.e);
            d_cols[k].push(level_derivative(level, model.g)?);
        }
    }
    let sweeps = (0..n_levels)
        .map(|k| {
            let d2 = numerics::gradient(&d_cols[k], &cs);
            LevelSweep {
                model: *model,
                n: k + 1,
                grid: *grid,
                q_of_c: std::mem::take(&mut q_cols[k]),
                e_of_c: std::mem::take(&mut e_cols[k]),
                de_dc: std::mem::take(&mut d_cols[k]),
                d2e_dc2: d2,
            }
        })
        .collect();
    Ok(StabilizationDiagram {
        model: *model,
        grid: *grid,
        sweeps,
    })
}

/// Locate plateaus on a sweep with the default smoothing window (5 points)
/// and extremum threshold (5% of the largest smoothed curvature).
pub fn find_plateaus(sweep: &LevelSweep) -> Result<Vec<Plateau>, DiagramError> {
    find_plateaus_with(sweep, 5, 0.05)
}

/// Locate plateaus on a sweep.
///
/// The second derivative is smoothed by a centered moving average of
/// `smooth_window` points; interior extrema larger than `threshold_frac`
/// of the maximum smoothed magnitude are paired up, and each adjacent
/// (max, min) pair brackets a plateau candidate. Candidates wider than
/// `1.2 pi / q(c_center)` are discarded — a genuine plateau cannot outlast
/// the crossing of a single level through the resonance. Returns the
/// surviving plateaus ordered by `c`; an empty vector means none qualify
/// (callers that require one surface this as [`DiagramError::NoPlateau`]).
pub fn find_plateaus_with(
    sweep: &LevelSweep,
    smooth_window: usize,
    threshold_frac: f64,
) -> Result<Vec<Plateau>, DiagramError> {
    let cs = sweep.grid.values();
    let s = numerics::moving_average(&sweep.d2e_dc2, smooth_window);
    let thr = threshold_frac * s.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    // Interior extrema above threshold: strict on the left neighbor, loose
    // on the right so flat-topped extrema register once.
    let mut extrema: Vec<(usize, i8)> = Vec::new();
    for i in 1..s.len() - 1 {
        if s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] > thr {
            extrema.push((i, 1));
        } else if s[i] < s[i - 1] && s[i] <= s[i + 1] && s[i] < -thr {
            extrema.push((i, -1));
        }
    }
    let mut plateaus = Vec::new();
    for pair in extrema.windows(2) {
        let ((i1, t1), (i2, t2)) = (pair[0], pair[1]);
        if t1 != 1 || t2 != -1 {
            continue;
        }
        let c_left = cs[i1];
        let c_right = cs[i2];
        let c_center = 0.5 * (c_left + c_right);
        let center = spectrum::solve_levels(&sweep.model, c_center, sweep.n)?[sweep.n - 1];
        if c_right - c_left > 1.2 * PI / center.q {
            continue;
        }
        plateaus.push(Plateau {
            n: sweep.n,
            c_left,
            c_right,
            c_center,
            e_center: center.e,
        });
    }
    Ok(plateaus)
}

/// Render a diagram as CSV: a units comment, a header row, then one row
/// per grid point with 6-significant-digit values.
pub fn diagram_to_csv(diagram: &StabilizationDiagram) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# units: hbar^2/(2 m a^2), G={}\n",
        numerics::format_sig(diagram.model.g)
    ));
    out.push('c');
    for sweep in &diagram.sweeps {
        out.push_str(&format!(", E_{}", sweep.n));
    }
    out.push('\n');
    let cs = diagram.grid.values();
    for (i, &c) in cs.iter().enumerate() {
        out.push_str(&numerics::format_sig(c));
        for sweep in &diagram.sweeps {
            out.push_str(", ");
            out.push_str(&numerics::format_sig(sweep.e_of_c[i]));
        }
        out.push('\n');
    }
    out
}
