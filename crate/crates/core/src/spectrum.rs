//! Finite-volume spectrum of the delta-shell model.
//!
//! A particle lives on `x in [-a, L]` with hard walls at both ends and a
//! delta shell of strength `G` at `x = 0`. In internal units (`a = 1`,
//! `c = L/a`) a positive-energy eigenstate with momentum `q` satisfies the
//! quantization condition
//!
//! ```text
//! F(q; G, c) = q sin(q (c + 1)) + G sin(q) sin(q c) = 0,
//! ```
//!
//! equivalently `q c + eta(q) = M pi` where `eta` is the continuum phase
//! shift of the shell. This module locates those roots, evaluates the
//! eigenfunctions in closed form, and provides the phase shift on its
//! continuous branch.

use crate::model::ShellModel;
use crate::numerics;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

/// Error raised by spectrum computations.
#[derive(Debug, Error)]
pub enum SpectrumError {
    /// A position argument left the box `[-1, c]`.
    #[error("position {xi} is outside the box [-1, {c}]")]
    DomainError { xi: f64, c: f64 },
    /// Root tracking lost a level (step too large, or the level left the
    /// positive-energy spectrum).
    #[error("lost track of level {n} near G = {g}")]
    RootLoss { n: usize, g: f64 },
}

/// One positive-energy box eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// 1-based index; levels are ordered by ascending energy.
    pub n: usize,
    /// Dimensionless momentum `q = k a > 0`.
    pub q: f64,
    /// Energy `E = q^2` in units of `hbar^2 / (2 m a^2)`.
    pub e: f64,
    /// Box size `c = L / a` the state was solved at.
    pub c: f64,
}

/// The single bound state of an attractive shell (`G < -1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    /// Decay momentum `kappa > 0`.
    pub kappa: f64,
    /// Binding energy `E = -kappa^2`.
    pub e: f64,
}

/// Quantization residual `F(q; G, c) = q sin(q(c+1)) + G sin(q) sin(qc)`.
///
/// Zeros in `q > 0` are the box eigenmomenta.
pub fn quantization_residual(q: f64, g: f64, c: f64) -> f64 {
    q * (q * (c + 1.0)).sin() + g * q.sin() * (q * c).sin()
}

/// Partial derivative of [`quantization_residual`] with respect to `q`.
pub fn quantization_residual_dq(q: f64, g: f64, c: f64) -> f64 {
    let s = (q * (c + 1.0)).sin();
    s + q * (c + 1.0) * (q * (c + 1.0)).cos()
        + g * (q.cos() * (q * c).sin() + c * q.sin() * (q * c).cos())
}

/// Partial derivative of [`quantization_residual`] with respect to `c`.
pub fn quantization_residual_dc(q: f64, g: f64, c: f64) -> f64 {
    q * q * (q * (c + 1.0)).cos() + g * q * q.sin() * (q * c).cos()
}

/// Lowest `n_levels` positive-energy eigenstates at box size `c`.
///
/// The residual is scanned upward from `q = 0+` with step
/// `min(0.01, pi / (4 (c + 1)))` — a quarter of the asymptotic level
/// spacing — and every sign change is refined by Brent's method to relative
/// tolerance `1e-12` or better. Validated for `|G| <= 1e3`.
pub fn solve_levels(
    model: &ShellModel,
    c: f64,
    n_levels: usize,
) -> Result<Vec<Level>, SpectrumError> {
    assert!(c > 0.0 && c.is_finite(), "box size must be positive");
    assert!(n_levels >= 1, "need at least one level");
    let g = model.g;
    let h = 0.01f64.min(PI / (4.0 * (c + 1.0)));
    // Even at extreme couplings the n-th root sits below (n + 2) pi scaled
    // by the smaller of the two wall distances; past that the scan must
    // have skipped a root.
    let q_bound = (n_levels as f64 + 2.0) * PI * 1.0f64.max(1.0 / c) + PI;
    let mut qs: Vec<f64> = Vec::with_capacity(n_levels);
    let mut q = h * 1e-3;
    let mut fa = quantization_residual(q, g, c);
    while qs.len() < n_levels {
        let b = q + h;
        let fb = quantization_residual(b, g, c);
        if fa == 0.0 {
            qs.push(q);
        } else if fa * fb < 0.0 {
            qs.push(numerics::brent_root(
                |x| quantization_residual(x, g, c),
                q,
                b,
                1e-15,
                1e-15,
            ));
        }
        q = b;
        fa = fb;
        if qs.len() < n_levels && q > q_bound {
            return Err(SpectrumError::RootLoss { n: qs.len() + 1, g });
        }
    }
    Ok(qs
        .into_iter()
        .enumerate()
        .map(|(i, q)| Level {
            n: i + 1,
            q,
            e: q * q,
            c,
        })
        .collect())
}

/// Number of bound states of the shell, which by Levinson's theorem equals
/// `eta(0+) / pi`: 1 for `G < -1`, else 0.
pub fn levinson_offset(g: f64) -> usize {
    if g < -1.0 {
        1
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// Continuum phase shift on its continuous branch.
// ---------------------------------------------------------------------------

/// Principal-value phase shift `atan2(Y, X)` with
/// `X = q cos q + G sin q`, `Y = q sin q`.
fn eta_principal(q: f64, g: f64) -> f64 {
    let x = q * q.cos() + g * q.sin();
    let y = q * q.sin();
    y.atan2(x)
}

const ETA_Q0: f64 = 1e-9;
const ETA_STEP: f64 = 1e-4;

/// Phase-shift branch table for one coupling: the principal value is
/// unwrapped along a fine `q` grid anchored at `q = 0+`, which pins the
/// continuous branch (`eta(0+) = 0` for `G >= -1`, `pi` for `G < -1`).
struct PhaseTable {
    g: f64,
    qmax: f64,
    etas: Vec<f64>,
}

impl PhaseTable {
    fn build(g: f64, qmax: f64) -> Self {
        let n = ((qmax + 0.01 - ETA_Q0) / ETA_STEP).ceil() as usize;
        let mut etas = Vec::with_capacity(n);
        let mut prev = eta_principal(ETA_Q0, g);
        let mut offset = 0.0;
        etas.push(prev);
        for i in 1..n {
            let q = ETA_Q0 + i as f64 * ETA_STEP;
            let raw = eta_principal(q, g);
            let d = raw - prev;
            offset -= 2.0 * PI * ((d + PI) / (2.0 * PI)).floor();
            etas.push(raw + offset);
            prev = raw;
        }
        Self { g, qmax, etas }
    }

    /// Continuous-branch phase shift at `q`, exact up to floating point:
    /// the table only decides the `2 pi k` branch index (an integer), the
    /// value itself comes from `atan2`.
    fn eta(&self, q: f64) -> f64 {
        let n = self.etas.len();
        let pos = (q - ETA_Q0) / ETA_STEP;
        let approx = if pos <= 0.0 {
            self.etas[0]
        } else if pos >= (n - 1) as f64 {
            self.etas[n - 1]
        } else {
            let i = pos.floor() as usize;
            let t = pos - i as f64;
            self.etas[i] + t * (self.etas[i + 1] - self.etas[i])
        };
        let principal = eta_principal(q, self.g);
        principal + 2.0 * PI * ((approx - principal) / (2.0 * PI)).round()
    }
}

fn phase_table(g: f64, qmax_needed: f64) -> Arc<PhaseTable> {
    static CACHE: OnceLock<Mutex<Vec<Arc<PhaseTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(t) = guard.iter().find(|t| t.g == g && t.qmax >= qmax_needed) {
        return Arc::clone(t);
    }
    let table = Arc::new(PhaseTable::build(g, qmax_needed.max(60.0)));
    guard.retain(|t| t.g != g);
    if guard.len() >= 32 {
        guard.remove(0);
    }
    guard.push(Arc::clone(&table));
    table
}

/// Scattering phase shift `eta(q)` of the shell on the half line, on the
/// continuous branch anchored at threshold (`q -> 0+`).
///
/// Requires `q > 0`. The branch is tabulated per coupling on a grid of
/// spacing `1e-4`, which resolves the unwrapping for `|G|` up to about
/// `1e2`; the returned value itself is evaluated in closed form.
pub fn phase_shift(q: f64, g: f64) -> f64 {
    assert!(q > 0.0, "phase shift is defined for q > 0");
    phase_table(g, q + 1.0).eta(q)
}

/// Closed-form derivative `d eta / d q` of the continuous phase shift.
pub fn phase_shift_derivative(q: f64, g: f64) -> f64 {
    let x = q * q.cos() + g * q.sin();
    let y = q * q.sin();
    (q * q + g * q.sin().powi(2)) / (x * x + y * y)
}

// ---------------------------------------------------------------------------
// Wavefunctions.
// ---------------------------------------------------------------------------

/// Exterior amplitude and principal exterior phase of the eigenfunction:
/// `psi(xi) = sin(q (xi + 1))` for `xi <= 0` continues to
/// `B sin(q xi + eta_p)` for `xi > 0`.
fn exterior_params(q: f64, g: f64) -> (f64, f64) {
    let x = q * q.cos() + g * q.sin();
    let y = q * q.sin();
    (x.hypot(y) / q, y.atan2(x))
}

/// Exact antiderivative-based integral of
/// `sin(alpha x + beta) sin(gamma x + delta)` over `[x1, x2]`, with the
/// degenerate equal-frequency branch handled explicitly.
fn sin_sin_integral(alpha: f64, beta: f64, gamma: f64, delta: f64, x1: f64, x2: f64) -> f64 {
    if (alpha - gamma).abs() < 1e-12 {
        let sum = alpha + gamma;
        0.5 * ((x2 - x1) * (beta - delta).cos()
            - ((sum * x2 + beta + delta).sin() - (sum * x1 + beta + delta).sin()) / sum)
    } else {
        let dif = alpha - gamma;
        let sum = alpha + gamma;
        let at = |x: f64| {
            0.5 * ((dif * x + beta - delta).sin() / dif - (sum * x + beta + delta).sin() / sum)
        };
        at(x2) - at(x1)
    }
}

/// Squared norm of the unnormalized eigenfunction over the box.
fn norm_integral(q: f64, g: f64, c: f64) -> f64 {
    let (b, eta_p) = exterior_params(q, g);
    sin_sin_integral(q, q, q, q, -1.0, 0.0) + b * b * sin_sin_integral(q, eta_p, q, eta_p, 0.0, c)
}

/// Eigenfunction of `level` at position `xi = x / a in [-1, c]`.
///
/// The interior branch is `sin(q (xi + 1))`; the exterior branch follows by
/// matching across the shell. With `normalized` the result is divided by
/// the exact L2 norm over the box.
pub fn wavefunction(
    level: &Level,
    g: f64,
    xi: f64,
    normalized: bool,
) -> Result<f64, SpectrumError> {
    if xi < -1.0 || xi > level.c {
        return Err(SpectrumError::DomainError { xi, c: level.c });
    }
    let q = level.q;
    let raw = if xi <= 0.0 {
        (q * (xi + 1.0)).sin()
    } else {
        let (b, eta_p) = exterior_params(q, g);
        b * (q * xi + eta_p).sin()
    };
    Ok(if normalized {
        raw / norm_integral(q, g, level.c).sqrt()
    } else {
        raw
    })
}

/// Probability `integral of |psi|^2 from -1 to x0` of the normalized
/// eigenfunction, in closed form. Requires `-1 < x0 <= c`.
pub fn interior_probability(level: &Level, g: f64, x0: f64) -> Result<f64, SpectrumError> {
    if x0 <= -1.0 || x0 > level.c {
        return Err(SpectrumError::DomainError { xi: x0, c: level.c });
    }
    let q = level.q;
    let numerator = if x0 <= 0.0 {
        sin_sin_integral(q, q, q, q, -1.0, x0)
    } else {
        let (b, eta_p) = exterior_params(q, g);
        sin_sin_integral(q, q, q, q, -1.0, 0.0)
            + b * b * sin_sin_integral(q, eta_p, q, eta_p, 0.0, x0)
    };
    Ok(numerator / norm_integral(q, g, level.c))
}

/// Overlap integral of two normalized eigenfunctions of the same box, in
/// closed form. Same-index overlaps evaluate the norm; distinct levels of
/// one Hamiltonian are orthogonal.
pub fn overlap(a: &Level, b: &Level, g: f64) -> f64 {
    assert_eq!(a.c, b.c, "overlap requires a common box");
    let (ba, ea) = exterior_params(a.q, g);
    let (bb, eb) = exterior_params(b.q, g);
    let raw = sin_sin_integral(a.q, a.q, b.q, b.q, -1.0, 0.0)
        + ba * bb * sin_sin_integral(a.q, ea, b.q, eb, 0.0, a.c);
    raw / (norm_integral(a.q, g, a.c) * norm_integral(b.q, g, b.c)).sqrt()
}

// ---------------------------------------------------------------------------
// Bound state.
// ---------------------------------------------------------------------------

/// Bound state of the attractive shell, or `None` when `G >= -1`.
///
/// The decay momentum solves `G + kappa (1 + coth kappa) = 0`, which has a
/// single positive root exactly when `G < -1`.
pub fn bound_state(model: &ShellModel) -> Option<BoundState> {
    let g = model.g;
    if g >= -1.0 {
        return None;
    }
    let f = |k: f64| g + k * (1.0 + 1.0 / k.tanh());
    let hi = 60.0f64.max(-g);
    let kappa = numerics::brent_root(f, 1e-12, hi, 1e-15, 1e-15);
    Some(BoundState {
        kappa,
        e: -kappa * kappa,
    })
}

// ---------------------------------------------------------------------------
// Continuation validator.
// ---------------------------------------------------------------------------

/// Validate a spectrum by continuation in the coupling: start from the free
/// box (`G = 0`, roots `n pi / (c + 1)`) and follow each root while `G`
/// steps toward `model.g` in increments of at most `g_step`.
///
/// At every step each root is re-bracketed inside a window of half the
/// free-box spacing around its previous position; an empty window or an
/// ordering collision reports [`SpectrumError::RootLoss`]. Steps above
/// `|Delta G| ~ 0.5` are unreliable, and for `G < -1` the lowest level
/// genuinely leaves the positive-energy spectrum (it becomes the bound
/// state), so continuation cannot follow it. Direct scanning
/// ([`solve_levels`]) is the production path; this is a cross-check.
pub fn track_levels_from_free(
    model: &ShellModel,
    c: f64,
    n_levels: usize,
    g_step: f64,
) -> Result<Vec<Level>, SpectrumError> {
    assert!(c > 0.0 && n_levels >= 1 && g_step > 0.0);
    let target = model.g;
    let mut qs: Vec<f64> = (1..=n_levels).map(|n| n as f64 * PI / (c + 1.0)).collect();
    if target == 0.0 {
        return Ok(finish_tracked(qs, c));
    }
    let n_steps = (target.abs() / g_step).ceil().max(1.0) as usize;
    let w = PI / (2.0 * (c + 1.0));
    let scan = (w / 8.0).min(0.005);
    for k in 1..=n_steps {
        let gk = target * k as f64 / n_steps as f64;
        for (idx, q) in qs.iter_mut().enumerate() {
            let lo = (*q - w).max(ETA_Q0);
            let hi = *q + w;
            // Find the sign-change bracket closest to the predicted root.
            let mut best: Option<(f64, f64)> = None;
            let mut a = lo;
            let mut fa = quantization_residual(a, gk, c);
            while a < hi {
                let b = (a + scan).min(hi);
                let fb = quantization_residual(b, gk, c);
                if fa == 0.0 || fa * fb < 0.0 {
                    let mid = 0.5 * (a + b);
                    if best.is_none_or(|(m, _)| (mid - *q).abs() < (m - *q).abs()) {
                        best = Some((mid, a));
                    }
                }
                a = b;
                fa = fb;
            }
            let Some((_, bracket_lo)) = best else {
                return Err(SpectrumError::RootLoss { n: idx + 1, g: gk });
            };
            *q = numerics::brent_root(
                |x| quantization_residual(x, gk, c),
                bracket_lo,
                (bracket_lo + scan).min(hi),
                1e-15,
                1e-15,
            );
        }
        for i in 1..qs.len() {
            if qs[i] - qs[i - 1] < 1e-9 {
                return Err(SpectrumError::RootLoss { n: i + 1, g: gk });
            }
        }
    }
    Ok(finish_tracked(qs, c))
}

fn finish_tracked(qs: Vec<f64>, c: f64) -> Vec<Level> {
    qs.into_iter()
        .enumerate()
        .map(|(i, q)| Level {
            n: i + 1,
            q,
            e: q * q,
            c,
        })
        .collect()
}
