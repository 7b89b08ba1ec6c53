//! Resonance extraction from stabilization data.
//!
//! Three independent routes recover the resonance position `E_r` and width
//! `Gamma` from finite-volume spectra:
//!
//! * **fit** — the level curve through a plateau follows
//!   `E(L) = E_r + Gamma / (2 tan((L - L_N) / Delta L_N))`; a nonlinear fit
//!   inside a fraction of the plateau recovers both parameters;
//! * **dos** — the box-size density of states
//!   `rho(E) = sum_N (dE_N/dc)^{-1}` has a Lorentzian bump on a smooth
//!   background near each resonance;
//! * **qbp** — the quasi-bound probability ratio
//!   `R = [1/P_in - 1]^{-1}` of interior to exterior weight peaks as a
//!   Lorentzian when a level sweeps through the resonance.
//!
//! All fits share one damped Gauss-Newton (Levenberg-Marquardt) engine with
//! analytic Jacobians.

use crate::diagram::{DiagramError, LevelSweep, Plateau, StabilizationDiagram};
use crate::numerics;
use crate::spectrum::{self, Level, SpectrumError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Error raised by the extraction pipeline.
#[derive(Debug, Error)]
pub enum ExtractError {
    /// The least-squares engine hit its iteration cap.
    #[error("least-squares fit did not converge within {0} iterations")]
    NoConvergence(usize),
    /// The normal equations could not be solved at any damping.
    #[error("singular Jacobian in least-squares fit")]
    SingularJacobian,
    /// No selected level attains this energy inside the diagram's grid.
    #[error("no level reaches E = {e} inside the box-size grid")]
    EnergyOutOfRange { e: f64 },
    /// The curve has no interior maximum to build a window around.
    #[error("no interior peak found in the curve")]
    NoPeak,
    /// The peak does not rise far enough above the background trend.
    #[error("peak prominence is only {ratio:.3} of the background variation")]
    WeakPeak { ratio: f64 },
    /// No qualifying plateau for the tangent fit.
    #[error("no plateau available for the tangent fit")]
    NoPlateau,
    /// Malformed fit inputs.
    #[error("invalid fit problem: {0}")]
    InvalidProblem(String),
    /// A level collision broke implicit differentiation.
    #[error("degenerate root at q = {q}")]
    Degenerate { q: f64 },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

impl From<DiagramError> for ExtractError {
    fn from(err: DiagramError) -> Self {
        match err {
            DiagramError::NoPlateau { .. } => ExtractError::NoPlateau,
            DiagramError::DegenerateRoot { q, .. } => ExtractError::Degenerate { q },
            DiagramError::Spectrum(s) => ExtractError::Spectrum(s),
        }
    }
}

impl ExtractError {
    /// Stable machine-readable name, used in failure reports.
    pub fn code(&self) -> &'static str {
        match self {
            ExtractError::NoConvergence(_) => "NoConvergence",
            ExtractError::SingularJacobian => "SingularJacobian",
            ExtractError::EnergyOutOfRange { .. } => "EnergyOutOfRange",
            ExtractError::NoPeak => "NoPeak",
            ExtractError::WeakPeak { .. } => "WeakPeak",
            ExtractError::NoPlateau => "NoPlateau",
            ExtractError::InvalidProblem(_) => "InvalidProblem",
            ExtractError::Degenerate { .. } => "DegenerateRoot",
            ExtractError::Spectrum(SpectrumError::DomainError { .. }) => "DomainError",
            ExtractError::Spectrum(SpectrumError::RootLoss { .. }) => "RootLoss",
        }
    }
}

/// Extraction route a [`Resonance`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fit,
    Dos,
    Qbp,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Fit => "fit",
            Method::Dos => "dos",
            Method::Qbp => "qbp",
        })
    }
}

/// Fit byproducts attached to a resonance for inspection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostics {
    /// L2 norm of the final fit residual vector.
    pub residual_norm: f64,
    /// Final fit parameters in model order.
    pub params: Vec<f64>,
    /// Fit window: energies for dos/qbp, box sizes for fit.
    pub window: (f64, f64),
    /// Level indices that entered the extraction.
    pub level_indices: Vec<usize>,
}

/// An extracted resonance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resonance {
    pub e_r: f64,
    pub gamma: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

// ---------------------------------------------------------------------------
// Least-squares engine.
// ---------------------------------------------------------------------------

/// Registered fit models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `y = p0 + p1 x`.
    Linear,
    /// `y = p0 / ((x - p1)^2 + p2^2 / 4) + p3 + p4 x` — Lorentzian with
    /// amplitude `p0`, center `p1`, width `p2`, on a linear background.
    LorentzianLine,
    /// `y = p0 + p1 / (2 tan((x - p2) / p3))` — level curve through an
    /// avoided crossing with position `p0`, width `p1`, node `p2`, scale
    /// `p3`.
    PlateauTan,
}

impl FitModel {
    pub fn param_count(&self) -> usize {
        match self {
            FitModel::Linear => 2,
            FitModel::LorentzianLine => 5,
            FitModel::PlateauTan => 4,
        }
    }

    /// Model value at `x`.
    pub fn eval(&self, p: &[f64], x: f64) -> f64 {
        match self {
            FitModel::Linear => p[0] + p[1] * x,
            FitModel::LorentzianLine => {
                let d = (x - p[1]).powi(2) + p[2] * p[2] / 4.0;
                p[0] / d + p[3] + p[4] * x
            }
            FitModel::PlateauTan => p[0] + p[1] / (2.0 * ((x - p[2]) / p[3]).tan()),
        }
    }

    /// Analytic gradient with respect to the parameters at `x`.
    fn gradient(&self, p: &[f64], x: f64, out: &mut [f64]) {
        match self {
            FitModel::Linear => {
                out[0] = 1.0;
                out[1] = x;
            }
            FitModel::LorentzianLine => {
                let d = (x - p[1]).powi(2) + p[2] * p[2] / 4.0;
                out[0] = 1.0 / d;
                out[1] = p[0] * 2.0 * (x - p[1]) / (d * d);
                out[2] = -p[0] * p[2] / (2.0 * d * d);
                out[3] = 1.0;
                out[4] = x;
            }
            FitModel::PlateauTan => {
                let u = (x - p[2]) / p[3];
                let cot = 1.0 / u.tan();
                let csc2 = 1.0 + cot * cot;
                out[0] = 1.0;
                out[1] = 0.5 * cot;
                out[2] = p[1] * csc2 / (2.0 * p[3]);
                out[3] = p[1] * u * csc2 / (2.0 * p[3]);
            }
        }
    }
}

/// A nonlinear least-squares problem: fit `model` to samples `(xs, ys)`
/// starting from `p0`, optionally box-constrained.
#[derive(Debug, Clone)]
pub struct FitProblem {
    /// Sample abscissas, strictly increasing.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub model: FitModel,
    pub p0: Vec<f64>,
    /// Per-parameter `(lo, hi)` bounds, enforced by clamping trial steps.
    pub bounds: Option<Vec<(f64, f64)>>,
}

/// Converged fit.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub params: Vec<f64>,
    /// L2 norm of the residual vector.
    pub residual_norm: f64,
    pub iterations: usize,
}

const LM_MAX_ITER: usize = 500;
const LM_REL_TOL: f64 = 1e-10;
const LM_LAMBDA_MAX: f64 = 1e12;

/// Damped Gauss-Newton (Levenberg-Marquardt) minimization of the summed
/// squared residuals with analytic Jacobians.
///
/// The damping factor starts at `1e-3`, shrinks tenfold on accepted steps
/// and grows tenfold on rejected ones; the fit converges when the relative
/// parameter change of a step drops below `1e-10`.
#[allow(clippy::needless_range_loop)] // index loops mirror the matrix algebra
pub fn least_squares_fit(problem: &FitProblem) -> Result<FitOutcome, ExtractError> {
    validate_problem(problem)?;
    let n = problem.model.param_count();
    let clamp = |p: &mut [f64]| {
        if let Some(bounds) = &problem.bounds {
            for (v, &(lo, hi)) in p.iter_mut().zip(bounds) {
                *v = v.clamp(lo, hi);
            }
        }
    };
    let residuals = |p: &[f64]| -> Vec<f64> {
        problem
            .xs
            .iter()
            .zip(&problem.ys)
            .map(|(&x, &y)| problem.model.eval(p, x) - y)
            .collect()
    };
    let cost_of = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut p = problem.p0.clone();
    clamp(&mut p);
    let mut r = residuals(&p);
    let mut cost = cost_of(&r);
    if !cost.is_finite() {
        return Err(ExtractError::InvalidProblem(
            "initial guess evaluates to a non-finite residual".into(),
        ));
    }
    let mut lambda = 1e-3;
    let mut grad_row = vec![0.0; n];
    for iter in 0..LM_MAX_ITER {
        // Normal equations J^T J and J^T r from the analytic Jacobian.
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for (i, &x) in problem.xs.iter().enumerate() {
            problem.model.gradient(&p, x, &mut grad_row);
            for j in 0..n {
                jtr[j] += grad_row[j] * r[i];
                for k in j..n {
                    jtj[j][k] += grad_row[j] * grad_row[k];
                }
            }
        }
        for j in 0..n {
            for k in 0..j {
                jtj[j][k] = jtj[k][j];
            }
            if !jtj[j][j].is_finite() {
                return Err(ExtractError::SingularJacobian);
            }
        }

        let mut accepted = false;
        while lambda <= LM_LAMBDA_MAX {
            let mut a = jtj.clone();
            for (j, row) in a.iter_mut().enumerate() {
                row[j] = jtj[j][j] * (1.0 + lambda);
            }
            let mut b: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(delta) = numerics::solve_dense(&mut a, &mut b) else {
                lambda *= 10.0;
                continue;
            };
            let mut p_try: Vec<f64> = p.iter().zip(&delta).map(|(v, d)| v + d).collect();
            clamp(&mut p_try);
            let rel = p_try
                .iter()
                .zip(&p)
                .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
                .fold(0.0, f64::max);
            let r_try = residuals(&p_try);
            let cost_try = cost_of(&r_try);
            if cost_try.is_finite() && cost_try <= cost {
                p = p_try;
                r = r_try;
                cost = cost_try;
                lambda = (lambda / 10.0).max(1e-14);
                accepted = true;
                if rel < LM_REL_TOL {
                    return Ok(FitOutcome {
                        params: p,
                        residual_norm: cost.sqrt(),
                        iterations: iter + 1,
                    });
                }
                break;
            }
            // The step is so small that no progress is possible: converged
            // at the current minimum.
            if rel < LM_REL_TOL {
                return Ok(FitOutcome {
                    params: p,
                    residual_norm: cost.sqrt(),
                    iterations: iter + 1,
                });
            }
            lambda *= 10.0;
        }
        if !accepted {
            return Err(ExtractError::SingularJacobian);
        }
    }
    Err(ExtractError::NoConvergence(LM_MAX_ITER))
}

fn validate_problem(problem: &FitProblem) -> Result<(), ExtractError> {
    let n = problem.model.param_count();
    if problem.xs.len() != problem.ys.len() {
        return Err(ExtractError::InvalidProblem(format!(
            "{} abscissas vs {} ordinates",
            problem.xs.len(),
            problem.ys.len()
        )));
    }
    if problem.xs.len() < n + 1 {
        return Err(ExtractError::InvalidProblem(format!(
            "{} samples cannot constrain {} parameters",
            problem.xs.len(),
            n
        )));
    }
    if problem.p0.len() != n {
        return Err(ExtractError::InvalidProblem(format!(
            "initial guess has {} parameters, model needs {}",
            problem.p0.len(),
            n
        )));
    }
    if !problem.xs.windows(2).all(|w| w[0] < w[1]) {
        return Err(ExtractError::InvalidProblem(
            "abscissas must be strictly increasing".into(),
        ));
    }
    if problem.p0.iter().any(|v| !v.is_finite()) || problem.ys.iter().any(|v| !v.is_finite()) {
        return Err(ExtractError::InvalidProblem("non-finite input".into()));
    }
    if let Some(bounds) = &problem.bounds {
        if bounds.len() != n {
            return Err(ExtractError::InvalidProblem(format!(
                "{} bounds for {} parameters",
                bounds.len(),
                n
            )));
        }
        if bounds.iter().any(|&(lo, hi)| lo > hi) {
            return Err(ExtractError::InvalidProblem("empty bound interval".into()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Peak selection.
// ---------------------------------------------------------------------------

/// Choose a symmetric fit window around the dominant peak of `curve`
/// (pairs `(x, y)` with ascending `x`).
///
/// The half-width is the smaller of (a) the distance to the nearest local
/// minimum on either side and (b) twice the distance to the half-maximum
/// crossing, clipped to the data range. A maximum on the boundary means
/// there is no interior peak.
pub fn select_peak_window(curve: &[(f64, f64)]) -> Result<(f64, f64), ExtractError> {
    let n = curve.len();
    if n < 3 {
        return Err(ExtractError::NoPeak);
    }
    let ys: Vec<f64> = curve.iter().map(|&(_, y)| y).collect();
    let xs: Vec<f64> = curve.iter().map(|&(x, _)| x).collect();
    let i0 = numerics::argmax(&ys);
    if i0 == 0 || i0 == n - 1 {
        return Err(ExtractError::NoPeak);
    }
    let xp = xs[i0];
    let mut candidates: Vec<f64> = Vec::new();
    // Nearest local minimum on each side.
    for side in [-1isize, 1] {
        let mut i = i0 as isize;
        loop {
            i += side;
            if i <= 0 || i >= (n - 1) as isize {
                break;
            }
            let u = i as usize;
            if ys[u] < ys[u - 1] && ys[u] <= ys[u + 1] {
                candidates.push((xs[u] - xp).abs());
                break;
            }
        }
    }
    // Twice the distance to the half-maximum crossing on each side.
    let half = ys[i0] / 2.0;
    for side in [-1isize, 1] {
        let mut i = i0 as isize;
        loop {
            i += side;
            if i < 0 || i > (n - 1) as isize {
                break;
            }
            let u = i as usize;
            if ys[u] <= half {
                candidates.push(2.0 * (xs[u] - xp).abs());
                break;
            }
        }
    }
    let d = candidates.into_iter().fold(f64::INFINITY, f64::min);
    if !d.is_finite() {
        return Err(ExtractError::NoPeak);
    }
    Ok((xs[0].max(xp - d), xs[n - 1].min(xp + d)))
}

/// Lorentzian-plus-line initial guess from the curve shape: peak position,
/// full width at half prominence over the endpoint chord, and the chord
/// itself as background.
fn lorentzian_guess(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let i0 = numerics::argmax(ys);
    let ep = xs[i0];
    let b1 = (ys[n - 1] - ys[0]) / (xs[n - 1] - xs[0]);
    let b0 = ys[0] - b1 * xs[0];
    let line_ep = ys[0] + (ys[n - 1] - ys[0]) * (ep - xs[0]) / (xs[n - 1] - xs[0]);
    let h = ys[i0] - line_ep;
    let half = line_ep + h / 2.0;
    let mut il = i0;
    while il > 0 && ys[il] > half {
        il -= 1;
    }
    let mut ir = i0;
    while ir < n - 1 && ys[ir] > half {
        ir += 1;
    }
    let ga0 = (xs[ir] - xs[il]).max(2.0 * (xs[1] - xs[0]));
    let a0 = h * ga0 * ga0 / 4.0;
    vec![a0, ep, ga0, b0, b1]
}

// ---------------------------------------------------------------------------
// Method 1: tangent fit through a plateau.
// ---------------------------------------------------------------------------

/// Extract a resonance by fitting the avoided-crossing tangent form to the
/// level curve inside `window_fraction` of the plateau width, centered on
/// the plateau.
///
/// Initial guesses come from the sweep itself: `E_r ~ E(c_center)`,
/// `Delta L ~ W / pi`, `Gamma ~ 2 |dE/dc| Delta L`, and the node sits a
/// quarter period below the center.
pub fn extract_plateau_fit(
    sweep: &LevelSweep,
    plateau: &Plateau,
    window_fraction: f64,
) -> Result<Resonance, ExtractError> {
    assert!(window_fraction > 0.0 && window_fraction <= 1.0);
    let model = sweep.model;
    let n = sweep.n;
    let w = plateau.c_right - plateau.c_left;
    let cc = plateau.c_center;
    let half = 0.5 * window_fraction * w;
    let ls = numerics::linspace(cc - half, cc + half, 201);
    let mut es = Vec::with_capacity(ls.len());
    for &l in &ls {
        es.push(spectrum::solve_levels(&model, l, n)?[n - 1].e);
    }
    let center = spectrum::solve_levels(&model, cc, n)?[n - 1];
    let slope = crate::diagram::level_derivative(&center, model.g)?;
    let dl0 = w / PI;
    let p0 = vec![center.e, 2.0 * slope.abs() * dl0, cc - 0.5 * PI * dl0, dl0];
    let fit = least_squares_fit(&FitProblem {
        xs: ls,
        ys: es,
        model: FitModel::PlateauTan,
        p0,
        bounds: None,
    })?;
    Ok(Resonance {
        e_r: fit.params[0],
        gamma: fit.params[1].abs(),
        method: Method::Fit,
        diagnostics: Diagnostics {
            residual_norm: fit.residual_norm,
            params: fit.params,
            window: (cc - half, cc + half),
            level_indices: vec![n],
        },
    })
}

// ---------------------------------------------------------------------------
// Method 2: density of states.
// ---------------------------------------------------------------------------

/// Box-size density of states `rho(E) = sum_N |dE_N/dc|^{-1}` over the
/// selected level indices, evaluated in closed form by inverting the
/// quantization condition: level `N` reaches energy `E` at
/// `c_N(E) = (M pi - eta(q)) / q` with `M = N +` (bound-state offset), and
/// `|dE/dc|^{-1} = (c + eta'(q)) / (2 E)`.
///
/// Levels whose `c_N(E)` falls outside the diagram's grid do not
/// contribute; an energy no level attains is [`ExtractError::EnergyOutOfRange`].
pub fn build_dos(
    diagram: &StabilizationDiagram,
    levels: &[usize],
    energy_grid: &[f64],
) -> Result<Vec<(f64, f64)>, ExtractError> {
    validate_levels(diagram, levels)?;
    let g = diagram.model.g;
    let offset = spectrum::levinson_offset(g);
    let (c_lo, c_hi) = (diagram.grid.c_min, diagram.grid.c_max);
    let mut curve = Vec::with_capacity(energy_grid.len());
    for &e in energy_grid {
        if e <= 0.0 {
            return Err(ExtractError::InvalidProblem(format!(
                "density of states needs positive energies, got {e}"
            )));
        }
        let q = e.sqrt();
        let eta = spectrum::phase_shift(q, g);
        let eta_prime = spectrum::phase_shift_derivative(q, g);
        let mut rho = 0.0;
        let mut attained = false;
        for &n in levels {
            let m = (n + offset) as f64;
            let c = (m * PI - eta) / q;
            if c >= c_lo - 1e-9 && c <= c_hi + 1e-9 {
                rho += (c + eta_prime) / (2.0 * e);
                attained = true;
            }
        }
        if !attained {
            return Err(ExtractError::EnergyOutOfRange { e });
        }
        curve.push((e, rho));
    }
    Ok(curve)
}

fn validate_levels(diagram: &StabilizationDiagram, levels: &[usize]) -> Result<(), ExtractError> {
    if levels.is_empty() {
        return Err(ExtractError::InvalidProblem("empty level set".into()));
    }
    for &n in levels {
        if n == 0 || n > diagram.sweeps.len() {
            return Err(ExtractError::InvalidProblem(format!(
                "level {n} outside the diagram ({} levels)",
                diagram.sweeps.len()
            )));
        }
    }
    Ok(())
}

/// Extract a resonance from the density of states summed over `levels`.
///
/// The curve is sampled on 801 points across `segment`; unless an explicit
/// `window` is given, a fit window is chosen around the dominant peak (a
/// missing interior peak reports [`ExtractError::WeakPeak`] — the
/// resonance is too broad to stand out). A Lorentzian on a linear
/// background is then fitted on a 301-point resample of the window, and
/// the peak must rise above the background variation by at least 1.5x.
pub fn extract_dos(
    diagram: &StabilizationDiagram,
    levels: &[usize],
    segment: (f64, f64),
    window: Option<(f64, f64)>,
) -> Result<Resonance, ExtractError> {
    assert!(
        segment.0 > 0.0 && segment.1 > segment.0,
        "segment must be ordered and positive"
    );
    let grid = numerics::linspace(segment.0, segment.1, 801);
    let curve = build_dos(diagram, levels, &grid)?;
    let (w_lo, w_hi) = match window {
        Some(w) => w,
        None => select_peak_window(&curve).map_err(|err| match err {
            ExtractError::NoPeak => ExtractError::WeakPeak { ratio: 0.0 },
            other => other,
        })?,
    };
    let wgrid = numerics::linspace(w_lo, w_hi, 301);
    let wcurve = build_dos(diagram, levels, &wgrid)?;
    let xs: Vec<f64> = wcurve.iter().map(|&(x, _)| x).collect();
    let ys: Vec<f64> = wcurve.iter().map(|&(_, y)| y).collect();
    let p0 = lorentzian_guess(&xs, &ys);
    let fit = least_squares_fit(&FitProblem {
        xs,
        ys: ys.clone(),
        model: FitModel::LorentzianLine,
        p0,
        bounds: None,
    })?;
    // Prominence gate on the fitted window: the peak must beat the
    // background trend decisively.
    let y_peak = ys[numerics::argmax(&ys)];
    let prominence = y_peak - ys[0].min(ys[ys.len() - 1]);
    let background = (ys[ys.len() - 1] - ys[0]).abs();
    if prominence < 1.5 * background {
        return Err(ExtractError::WeakPeak {
            ratio: if background > 0.0 {
                prominence / background
            } else {
                f64::INFINITY
            },
        });
    }
    Ok(Resonance {
        e_r: fit.params[1],
        gamma: fit.params[2].abs(),
        method: Method::Dos,
        diagnostics: Diagnostics {
            residual_norm: fit.residual_norm,
            params: fit.params,
            window: (w_lo, w_hi),
            level_indices: levels.to_vec(),
        },
    })
}

// ---------------------------------------------------------------------------
// Method 3: quasi-bound probability.
// ---------------------------------------------------------------------------

/// Quasi-bound probability ratio of one level along its sweep:
/// `R = [1/P - 1]^{-1}` with `P` the probability of finding the particle
/// left of `x0`. Returns `(E, R)` pairs sorted by ascending energy.
pub fn qbp_curve(sweep: &LevelSweep, x0: f64) -> Result<Vec<(f64, f64)>, ExtractError> {
    let cs = sweep.grid.values();
    let mut curve = Vec::with_capacity(cs.len());
    for (i, &c) in cs.iter().enumerate() {
        // Boxes too small to contain the matching point have no
        // interior/exterior split to measure; skip them.
        if c <= x0 {
            continue;
        }
        let level = Level {
            n: sweep.n,
            q: sweep.q_of_c[i],
            e: sweep.e_of_c[i],
            c,
        };
        let p = spectrum::interior_probability(&level, sweep.model.g, x0)?;
        curve.push((level.e, p / (1.0 - p)));
    }
    curve.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(curve)
}

/// Extract a resonance from the quasi-bound probability of one sweep.
///
/// Unless an explicit energy `window` is given, one is selected around the
/// dominant peak of the ratio curve. The Lorentzian-plus-line fit runs on
/// the raw sweep samples inside the window (no resampling: the sweep
/// itself sets the resolution).
pub fn extract_qbp(
    sweep: &LevelSweep,
    x0: f64,
    window: Option<(f64, f64)>,
) -> Result<Resonance, ExtractError> {
    let curve = qbp_curve(sweep, x0)?;
    let (w_lo, w_hi) = match window {
        Some(w) => w,
        None => select_peak_window(&curve)?,
    };
    let pts: Vec<(f64, f64)> = curve
        .into_iter()
        .filter(|&(e, _)| e >= w_lo && e <= w_hi)
        .collect();
    if pts.len() < 6 {
        return Err(ExtractError::NoPeak);
    }
    let xs: Vec<f64> = pts.iter().map(|&(x, _)| x).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, y)| y).collect();
    let p0 = lorentzian_guess(&xs, &ys);
    let fit = least_squares_fit(&FitProblem {
        xs,
        ys,
        model: FitModel::LorentzianLine,
        p0,
        bounds: None,
    })?;
    Ok(Resonance {
        e_r: fit.params[1],
        gamma: fit.params[2].abs(),
        method: Method::Qbp,
        diagnostics: Diagnostics {
            residual_norm: fit.residual_norm,
            params: fit.params,
            window: (w_lo, w_hi),
            level_indices: vec![sweep.n],
        },
    })
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

/// One extraction condensed for export. Failures carry `status: "failed"`
/// and the error code instead of numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractReport {
    pub method: Method,
    pub status: String,
    #[serde(rename = "G")]
    pub g: f64,
    pub units: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_indices: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    #[serde(rename = "E_r", skip_serializing_if = "Option::is_none")]
    pub e_r: Option<f64>,
    #[serde(rename = "Gamma", skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub const ENERGY_UNITS: &str = "hbar^2/(2 m a^2)";

fn round_sig(x: f64) -> f64 {
    numerics::format_sig(x).parse().unwrap_or(x)
}

/// Successful-extraction report with values rounded to output precision.
pub fn report_ok(resonance: &Resonance, g: f64, x0: Option<f64>) -> ExtractReport {
    let d = &resonance.diagnostics;
    ExtractReport {
        method: resonance.method,
        status: "ok".into(),
        g,
        units: ENERGY_UNITS.into(),
        level_indices: Some(d.level_indices.clone()),
        x0,
        window: Some((round_sig(d.window.0), round_sig(d.window.1))),
        e_r: Some(round_sig(resonance.e_r)),
        gamma: Some(round_sig(resonance.gamma)),
        residual_norm: Some(round_sig(d.residual_norm)),
        params: Some(d.params.iter().map(|&v| round_sig(v)).collect()),
        error: None,
    }
}

/// Failure report: the method ran and concluded "no resonance here".
pub fn report_failure(method: Method, g: f64, err: &ExtractError) -> ExtractReport {
    ExtractReport {
        method,
        status: "failed".into(),
        g,
        units: ENERGY_UNITS.into(),
        level_indices: None,
        x0: None,
        window: None,
        e_r: None,
        gamma: None,
        residual_norm: None,
        params: None,
        error: Some(err.code().into()),
    }
}
