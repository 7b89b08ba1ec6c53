//! Exact references the finite-volume methods are benchmarked against.
//!
//! For the delta-shell on the half line the outgoing S-matrix is known in
//! closed form, so resonances are located directly as its poles in the
//! lower-half `q` plane; every extraction method must reproduce these pole
//! positions and widths. A 3x3 coupled-channel toy model provides an
//! independent caricature of the avoided crossings that make up the
//! stabilization diagram.

use crate::model::{energy_from_q_complex, ShellModel};
use crate::numerics;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Error raised by the pole search.
#[derive(Debug, Error)]
pub enum OracleError {
    /// Too few poles converged from every seeding strategy.
    #[error("pole search converged on {found} of {requested} poles")]
    NoConvergence { found: usize, requested: usize },
}

/// One S-matrix pole.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PoleResult {
    /// Pole momentum in the lower half plane (`Re q > 0`, `Im q < 0`).
    pub q: Complex64,
    /// Complex energy `q^2 = E_r - i Gamma / 2`.
    pub e_complex: Complex64,
    /// Resonance position `Re q^2`.
    pub e_r: f64,
    /// Resonance width `Gamma = -2 Im q^2 > 0`.
    pub gamma: f64,
    /// 1-based index by ascending `Re q`.
    pub n: usize,
}

/// Outgoing-wave S-matrix of the shell on the half line:
/// `S(q) = (i q sin q + q cos q + G sin q) / (i q sin q - q cos q - G sin q)`.
///
/// Unimodular on the real axis; the chosen convention satisfies
/// `S = -exp(2 i eta)` with `eta` the phase shift of [`crate::spectrum::phase_shift`].
pub fn s_matrix(q: Complex64, g: f64) -> Complex64 {
    let i = Complex64::i();
    let s = q.sin();
    let c = q.cos();
    (i * q * s + q * c + g * s) / (i * q * s - q * c - g * s)
}

/// Denominator of the S-matrix, whose lower-half-plane zeros are the
/// resonance poles: `D(q) = i q sin q - q cos q - G sin q`.
///
/// Evaluated as `D(q) = -q exp(-iq) - G sin q`: deep in the lower half
/// plane `i sin q` and `cos q` are separately huge and cancel to the tiny
/// `exp(-iq)`, so the trigonometric form loses all significance exactly
/// where the Newton iteration probes.
pub fn pole_function(q: Complex64, g: f64) -> Complex64 {
    let i = Complex64::i();
    -q * (-i * q).exp() - g * q.sin()
}

/// Analytic derivative `dD/dq = (iq - 1) exp(-iq) - G cos q`.
pub fn pole_function_derivative(q: Complex64, g: f64) -> Complex64 {
    let i = Complex64::i();
    (i * q - 1.0) * (-i * q).exp() - g * q.cos()
}

const NEWTON_MAX_ITER: usize = 200;
const NEWTON_STEP_TOL: f64 = 1e-14;
const POLE_RESIDUAL_TOL: f64 = 1e-10;

fn newton_pole(seed: Complex64, g: f64) -> Option<Complex64> {
    let mut q = seed;
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let d = pole_function(q, g);
        let dp = pole_function_derivative(q, g);
        if !d.is_finite() || !dp.is_finite() || dp.norm() == 0.0 {
            return None;
        }
        let step = d / dp;
        q -= step;
        if step.norm() < NEWTON_STEP_TOL {
            converged = true;
            break;
        }
    }
    // A stalled iteration must not pass the residual test: far down the
    // lower half plane |D| decays like exp(Im q) without any root nearby.
    let valid = converged
        && q.is_finite()
        && pole_function(q, g).norm() < POLE_RESIDUAL_TOL
        && q.re > 1e-6
        && q.im < 0.0;
    valid.then_some(q)
}

fn push_unique(poles: &mut Vec<Complex64>, q: Complex64) {
    if poles.iter().all(|p| (p - q).norm() > 1e-6) {
        poles.push(q);
    }
}

/// Locate the `n_poles` lowest resonance poles by Newton iteration on
/// [`pole_function`].
///
/// Primary seeds sit near `k pi (1 - 1/|G|)` just below the real axis
/// (the strong-coupling pole positions); misses are retried from
/// perturbed seeds and finally from a coarse rectangular grid over
/// `Re q in (0, n pi + 2)`, `Im q in (-3, 0)`. Poles are returned
/// deduplicated, sorted by ascending `Re q`.
pub fn find_poles(model: &ShellModel, n_poles: usize) -> Result<Vec<PoleResult>, OracleError> {
    assert!(n_poles >= 1);
    let g = model.g;
    let mut qs: Vec<Complex64> = Vec::new();
    if g != 0.0 {
        let base = 1.0 - 1.0 / g.abs();
        for k in 1..=n_poles + 2 {
            let seed = Complex64::new(k as f64 * PI * base, -0.05);
            if let Some(q) = newton_pole(seed, g) {
                push_unique(&mut qs, q);
            }
        }
        if qs.len() < n_poles {
            for k in 1..=n_poles + 2 {
                for (dr, di) in [(0.2, 0.0), (-0.2, 0.0), (0.0, -0.15), (0.2, -0.15)] {
                    let seed = Complex64::new(k as f64 * PI * base + dr, -0.05 + di);
                    if let Some(q) = newton_pole(seed, g) {
                        push_unique(&mut qs, q);
                    }
                }
            }
        }
    }
    if qs.len() < n_poles {
        let re_max = n_poles as f64 * PI + 2.0;
        let mut re = 0.25;
        while re < re_max {
            let mut im = -2.85;
            while im < 0.0 {
                if let Some(q) = newton_pole(Complex64::new(re, im), g) {
                    push_unique(&mut qs, q);
                }
                im += 0.3;
            }
            re += 0.5;
        }
    }
    qs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    qs.truncate(n_poles);
    if qs.len() < n_poles {
        return Err(OracleError::NoConvergence {
            found: qs.len(),
            requested: n_poles,
        });
    }
    Ok(qs
        .into_iter()
        .enumerate()
        .map(|(i, q)| {
            let e = energy_from_q_complex(q);
            PoleResult {
                q,
                e_complex: e,
                e_r: e.re,
                gamma: -2.0 * e.im,
                n: i + 1,
            }
        })
        .collect())
}

/// Render poles as CSV with a units comment.
pub fn poles_to_csv(poles: &[PoleResult], g: f64) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# units: hbar^2/(2 m a^2), G={}\n",
        numerics::format_sig(g)
    ));
    out.push_str("n, Re_q, Im_q, E_r, Gamma\n");
    for p in poles {
        out.push_str(&format!(
            "{}, {}, {}, {}, {}\n",
            p.n,
            numerics::format_sig(p.q.re),
            numerics::format_sig(p.q.im),
            numerics::format_sig(p.e_r),
            numerics::format_sig(p.gamma)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Toy coupled-channel model.
// ---------------------------------------------------------------------------

/// A 3x3 caricature of the stabilization diagram: one interior state at
/// fixed energy `e_int` coupled to the two nearest exterior box modes
/// `(i pi / L)^2`, whose energies slide with the box size.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ToyModel {
    pub e_int: f64,
    /// Couplings of the interior state to the two exterior modes.
    pub delta: (f64, f64),
}

/// Energy of the `i`-th exterior box mode at box size `l`.
pub fn exterior_level(i: usize, l: f64) -> f64 {
    (i as f64 * PI / l).powi(2)
}

/// Interior-exterior couplings from the derivative overlap at the shell:
/// `Delta_i = -(1/G) psi_int'(0) psi_ext,i'(0)
///          = 2 k i pi^2 (-1)^{k+1} / (G c^{3/2})`
/// for interior mode `k` and exterior modes `i` at box size `c`.
pub fn toy_couplings(
    model: &ShellModel,
    interior_mode: usize,
    exterior_modes: (usize, usize),
    c: f64,
) -> (f64, f64) {
    assert!(c > 0.0 && interior_mode >= 1);
    let k = interior_mode as f64;
    let sign = if interior_mode % 2 == 1 { 1.0 } else { -1.0 };
    let delta = |i: usize| 2.0 * k * i as f64 * PI * PI * sign / (model.g * c.powf(1.5));
    (delta(exterior_modes.0), delta(exterior_modes.1))
}

/// Eigenvalues of the toy Hamiltonian along a box-size grid, ascending
/// within each row.
pub fn toy_spectrum(toy: &ToyModel, l_grid: &[f64]) -> Vec<[f64; 3]> {
    l_grid
        .iter()
        .map(|&l| {
            let h = [
                [toy.e_int, toy.delta.0, toy.delta.1],
                [toy.delta.0, exterior_level(1, l), 0.0],
                [toy.delta.1, 0.0, exterior_level(2, l)],
            ];
            eigen3_sym(&h)
        })
        .collect()
}

/// Closed-form eigenvalues of a symmetric 3x3 matrix (trigonometric
/// method), sorted ascending.
fn eigen3_sym(h: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = h[0][1] * h[0][1] + h[0][2] * h[0][2] + h[1][2] * h[1][2];
    let mut eig = if p1 == 0.0 {
        [h[0][0], h[1][1], h[2][2]]
    } else {
        let q = (h[0][0] + h[1][1] + h[2][2]) / 3.0;
        let p2 = (h[0][0] - q).powi(2) + (h[1][1] - q).powi(2) + (h[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = [
            [(h[0][0] - q) / p, h[0][1] / p, h[0][2] / p],
            [h[0][1] / p, (h[1][1] - q) / p, h[1][2] / p],
            [h[0][2] / p, h[1][2] / p, (h[2][2] - q) / p],
        ];
        let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        let r = (det_b / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
        let e2 = 3.0 * q - e1 - e3;
        [e1, e2, e3]
    };
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    // First two poles per coupling: (G, Re q, Im q).
    const POLES: [(f64, [(f64, f64); 2]); 6] = [
        (
            20.0,
            [
                (2.995775176181, -0.020542952649),
                (6.010923107875, -0.074375699644),
            ],
        ),
        (
            10.0,
            [
                (2.877577458458, -0.066510672490),
                (5.841379586076, -0.206480096302),
            ],
        ),
        (
            5.0,
            [
                (2.710381731824, -0.177999234346),
                (5.671931257884, -0.440579352545),
            ],
        ),
        (
            -20.0,
            [
                (3.300591221178, -0.027070147880),
                (6.571767103402, -0.092988347067),
            ],
        ),
        (
            -10.0,
            [
                (3.437990504224, -0.103812119336),
                (6.736737965829, -0.268372813705),
            ],
        ),
        (
            -5.0,
            [
                (3.596188085879, -0.300281964265),
                (6.859402048246, -0.549761013374),
            ],
        ),
    ];

    #[test]
    fn s_matrix_is_unitary_on_the_real_axis() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let q = Complex64::new(rng.gen_range(0.05..12.0), 0.0);
            let g: f64 = rng.gen_range(-25.0..25.0);
            assert!((s_matrix(q, g).norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn s_matrix_has_pinned_free_value() {
        // G = 0 at q = pi/4: S = -exp(2 i q) rotated by the wall, = -i.
        let s = s_matrix(Complex64::new(PI / 4.0, 0.0), 0.0);
        assert!((s - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn s_matrix_matches_phase_shift_convention() {
        // S = -exp(2 i eta) with eta on the continuous branch.
        for &(g, q) in &[(20.0, 2.9), (-10.0, 1.7), (5.0, 4.4), (0.0, 0.8)] {
            let eta = spectrum::phase_shift(q, g);
            let expect = -(Complex64::i() * 2.0 * eta).exp();
            let got = s_matrix(Complex64::new(q, 0.0), g);
            assert!((got - expect).norm() < 1e-10, "G={g} q={q}");
        }
    }

    #[test]
    fn s_matrix_diverges_at_a_pole() {
        let q = Complex64::new(2.995775176181, -0.020542952649);
        assert!(s_matrix(q + Complex64::new(1e-6, 0.0), 20.0).norm() > 1e3);
    }

    #[test]
    fn poles_match_reference_values() {
        for &(g, expected) in &POLES {
            let model = ShellModel::new(g);
            let poles = find_poles(&model, 2).unwrap();
            assert_eq!(poles.len(), 2);
            for (pole, &(re, im)) in poles.iter().zip(&expected) {
                assert_relative_eq!(pole.q.re, re, epsilon = 1e-9);
                assert_relative_eq!(pole.q.im, im, epsilon = 1e-9);
                assert!(pole_function(pole.q, g).norm() < 1e-10);
                assert!(pole.gamma > 0.0);
                let (qr, qi) = (pole.q.re, pole.q.im);
                assert_relative_eq!(pole.e_r, qr * qr - qi * qi, max_relative = 1e-12);
                assert_relative_eq!(pole.gamma, -4.0 * qr * qi, max_relative = 1e-12);
            }
            assert!(poles[0].q.re < poles[1].q.re);
            assert_eq!((poles[0].n, poles[1].n), (1, 2));
        }
    }

    #[test]
    fn higher_poles_broaden_monotonically() {
        let expected_re = [
            2.9957751762,
            6.0109231079,
            9.0532507723,
            12.1204036332,
            15.2065865341,
            18.3064299945,
        ];
        let expected_im = [
            -0.0205429526,
            -0.0743756996,
            -0.1456510139,
            -0.2214822042,
            -0.2949923390,
            -0.3634811695,
        ];
        let model = ShellModel::new(20.0);
        let poles = find_poles(&model, 6).unwrap();
        for (i, pole) in poles.iter().enumerate() {
            assert_relative_eq!(pole.q.re, expected_re[i], epsilon = 1e-8);
            assert_relative_eq!(pole.q.im, expected_im[i], epsilon = 1e-8);
            assert!(pole.q.im < 0.0);
            if i > 0 {
                assert!(pole.q.im < poles[i - 1].q.im, "widths must grow with n");
                assert!(pole.gamma > poles[i - 1].gamma);
            }
        }
    }

    #[test]
    fn free_shell_has_no_poles() {
        let model = ShellModel::new(0.0);
        assert!(matches!(
            find_poles(&model, 1),
            Err(OracleError::NoConvergence { .. })
        ));
    }

    #[test]
    fn bound_state_sits_on_the_imaginary_axis() {
        // The same denominator vanishes at q = i kappa for every bound
        // state of the attractive shell.
        for &g in &[-20.0, -10.0, -5.0, -3.0, -2.0] {
            let b = spectrum::bound_state(&ShellModel::new(g)).unwrap();
            let q = Complex64::new(0.0, b.kappa);
            assert!(
                pole_function(q, g).norm() < 1e-9,
                "G={g}: |D(i kappa)| = {}",
                pole_function(q, g).norm()
            );
        }
    }

    #[test]
    fn pole_csv_has_header_and_rows() {
        let model = ShellModel::new(-5.0);
        let poles = find_poles(&model, 2).unwrap();
        let csv = poles_to_csv(&poles, -5.0);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# units: hbar^2/(2 m a^2), G=-5.00000");
        assert_eq!(lines[1], "n, Re_q, Im_q, E_r, Gamma");
        assert!(lines[2].starts_with("1, 3.59619, -0.300282, 12.8424, 4.31948"));
    }

    #[test]
    fn decoupled_toy_spectrum_is_the_bare_levels() {
        let toy = ToyModel {
            e_int: 9.0,
            delta: (0.0, 0.0),
        };
        let rows = toy_spectrum(&toy, &[1.5]);
        let mut bare = [9.0, exterior_level(1, 1.5), exterior_level(2, 1.5)];
        bare.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in rows[0].iter().zip(bare) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn toy_eigenvalues_satisfy_the_characteristic_equation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let toy = ToyModel {
                e_int: rng.gen_range(1.0..40.0),
                delta: (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            };
            let l: f64 = rng.gen_range(0.8..3.0);
            let eig = toy_spectrum(&toy, &[l])[0];
            let trace = toy.e_int + exterior_level(1, l) + exterior_level(2, l);
            assert_relative_eq!(eig.iter().sum::<f64>(), trace, max_relative = 1e-12);
            assert!(eig[0] <= eig[1] && eig[1] <= eig[2]);
            for &lambda in &eig {
                // det(H - lambda I) via the explicit arrow-matrix form.
                let det = (toy.e_int - lambda)
                    * (exterior_level(1, l) - lambda)
                    * (exterior_level(2, l) - lambda)
                    - toy.delta.0 * toy.delta.0 * (exterior_level(2, l) - lambda)
                    - toy.delta.1 * toy.delta.1 * (exterior_level(1, l) - lambda);
                let scale = trace.powi(3).abs().max(1.0);
                assert!(det.abs() < 1e-10 * scale, "det = {det}");
            }
        }
    }

    #[test]
    fn toy_couplings_match_reference_and_scale_inversely_with_g() {
        let model = ShellModel::new(20.0);
        let (d1, d2) = toy_couplings(&model, 1, (1, 2), 3.0);
        assert_relative_eq!(d1, 0.1899406253, epsilon = 1e-9);
        assert_relative_eq!(d2, 0.3798812505, epsilon = 1e-9);
        let (h1, h2) = toy_couplings(&ShellModel::new(40.0), 1, (1, 2), 3.0);
        assert_relative_eq!(2.0 * h1, d1, max_relative = 1e-12);
        assert_relative_eq!(2.0 * h2, d2, max_relative = 1e-12);
    }

    #[test]
    fn toy_gap_predicts_exact_avoided_crossings() {
        // The exact G = 20 diagram shows avoided crossings where exterior
        // modes meet the first resonance; the toy-model gap 2 Delta_i
        // should match the exact minimal gap to ~10%.
        let g = 20.0;
        let model = ShellModel::new(g);
        let e_res = 8.9742468933;
        let cases = [(1usize, 0.7, 1.4, 0), (2, 1.7, 2.5, 1)];
        for &(i, c_lo, c_hi, lo_level) in &cases {
            let mut min_gap = f64::INFINITY;
            let mut c = c_lo;
            while c <= c_hi {
                let levels = spectrum::solve_levels(&model, c, lo_level + 2).unwrap();
                let (e_lo, e_hi) = (levels[lo_level].e, levels[lo_level + 1].e);
                if ((e_lo + e_hi) / 2.0 - e_res).abs() < 3.0 {
                    min_gap = min_gap.min(e_hi - e_lo);
                }
                c += 0.002;
            }
            let c_i = i as f64 * PI / e_res.sqrt();
            let delta = toy_couplings(&model, 1, (i, i), c_i).0;
            let ratio = min_gap / (2.0 * delta);
            assert!(
                (ratio - 1.0).abs() < 0.25,
                "crossing {i}: gap {min_gap}, 2 Delta {}",
                2.0 * delta
            );
        }
    }
}
