//! Shared numerical primitives: bracketed root refinement, grid builders,
//! finite-difference stencils, small dense solves, and output formatting.

/// Refine a root of `f` inside the bracket `[xa, xb]` with Brent's method.
///
/// `f(xa)` and `f(xb)` must not have the same strict sign. Converges to
/// `xtol + rtol * |x|`; `rtol` should be at least a few machine epsilons.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, xa: f64, xb: f64, xtol: f64, rtol: f64) -> f64 {
    const MAX_ITER: usize = 100;
    let mut xpre = xa;
    let mut xcur = xb;
    let mut fpre = f(xpre);
    let mut fcur = f(xcur);
    assert!(
        fpre * fcur <= 0.0,
        "brent_root requires a sign-change bracket, got f({xa})={fpre}, f({xb})={fcur}"
    );
    if fpre == 0.0 {
        return xpre;
    }
    if fcur == 0.0 {
        return xcur;
    }
    let mut xblk = 0.0;
    let mut fblk = 0.0;
    let mut spre = 0.0;
    let mut scur = 0.0;
    for _ in 0..MAX_ITER {
        if fpre * fcur < 0.0 {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }
        let delta = (xtol + rtol * xcur.abs()) / 2.0;
        let sbis = (xblk - xcur) / 2.0;
        if fcur == 0.0 || sbis.abs() < delta {
            return xcur;
        }
        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                // Secant step.
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                // Inverse quadratic interpolation.
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }
        xpre = xcur;
        fpre = fcur;
        if scur.abs() > delta {
            xcur += scur;
        } else {
            xcur += if sbis > 0.0 { delta } else { -delta };
        }
        fcur = f(xcur);
    }
    xcur
}

/// Uniform grid of `n >= 2` points from `a` to `b` inclusive; the final
/// point is exactly `b`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (b - a) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| a + i as f64 * step).collect();
    out[n - 1] = b;
    out
}

/// Half-open uniform grid: values `start + k * step` for `k = 0, 1, ...`
/// while the value is strictly below `stop`.
pub fn arange(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && stop > start);
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let v = start + k as f64 * step;
        if v >= stop {
            break;
        }
        out.push(v);
        k += 1;
    }
    out
}

/// First-maximum index of a slice (ties resolve to the lowest index).
pub fn argmax(ys: &[f64]) -> usize {
    assert!(!ys.is_empty());
    let mut best = 0;
    for (i, &y) in ys.iter().enumerate().skip(1) {
        if y > ys[best] {
            best = i;
        }
    }
    best
}

/// Piecewise-linear interpolation of sample pairs `(xs, ys)` at `x`, with
/// `xs` ascending; `x` outside the range clamps to the boundary values.
pub fn interp(x: f64, xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    // partition_point returns the first index with xs[i] > x.
    let hi = xs.partition_point(|&v| v <= x);
    let lo = hi - 1;
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + t * (ys[hi] - ys[lo])
}

/// Second-order finite-difference derivative of `ys` sampled at `xs`
/// (one-sided at the endpoints, centered in the interior; spacing may be
/// non-uniform).
pub fn gradient(ys: &[f64], xs: &[f64]) -> Vec<f64> {
    let n = ys.len();
    assert_eq!(n, xs.len());
    assert!(n >= 2, "gradient needs at least two samples");
    let mut out = vec![0.0; n];
    out[0] = (ys[1] - ys[0]) / (xs[1] - xs[0]);
    out[n - 1] = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
    for i in 1..n - 1 {
        let hs = xs[i] - xs[i - 1];
        let hd = xs[i + 1] - xs[i];
        out[i] = (hs * hs * ys[i + 1] + (hd * hd - hs * hs) * ys[i] - hd * hd * ys[i - 1])
            / (hs * hd * (hd + hs));
    }
    out
}

/// Moving average of window `w` with zero padding outside the data, so the
/// output has the same length and the edges taper toward zero.
pub fn moving_average(ys: &[f64], w: usize) -> Vec<f64> {
    assert!(w >= 1 && w % 2 == 1, "window must be odd");
    let half = (w / 2) as isize;
    let n = ys.len() as isize;
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for j in -half..=half {
                let k = i + j;
                if k >= 0 && k < n {
                    acc += ys[k as usize];
                }
            }
            acc / w as f64
        })
        .collect()
}

/// Solve the dense linear system `a x = b` in place by Gaussian elimination
/// with partial pivoting. Returns `None` when a pivot collapses (singular or
/// numerically rank-deficient matrix).
#[allow(clippy::needless_range_loop)] // index loops mirror the matrix algebra
pub fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n);
    for row in a.iter() {
        assert_eq!(row.len(), n);
    }
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if !a[piv][col].is_finite() || a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let m = a[r][col] / a[col][col];
            if m != 0.0 {
                for c in col..n {
                    a[r][c] -= m * a[col][c];
                }
                b[r] -= m * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for c in col + 1..n {
            acc -= a[col][c] * x[c];
        }
        x[col] = acc / a[col][col];
        if !x[col].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    num / den
}

/// Format a float with 6 significant digits, switching to scientific
/// notation below `1e-3` in magnitude.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let ax = x.abs();
    if ax < 1e-3 {
        return format!("{x:.5e}");
    }
    let decimals = (5 - ax.log10().floor() as i32).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}
