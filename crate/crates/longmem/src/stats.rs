//! Shared numerical helpers: moments, ranks, correlation, least squares,
//! quantiles, kernel density, the standard normal distribution, fixed-order
//! Gauss-Legendre quadrature, adaptive Simpson integration, and the
//! grid-plus-golden-section scalar minimizer used by all Whittle-type and
//! copula objectives.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const SQRT_2PI: f64 = 2.5066282746310002;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with denominator `n - 1`.
pub fn variance(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
}

pub fn sd(x: &[f64]) -> f64 {
    variance(x).sqrt()
}

pub fn min_max(x: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in x {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    (lo, hi)
}

/// Ranks starting at 1, ties replaced by the average rank of the tied run.
/// Values must be finite.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[idx[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::domain("pearson: need two equal-length samples of size >= 2"));
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for i in 0..x.len() {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::numerical("pearson: zero variance sample"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    pearson(&rx, &ry)
}

#[derive(Clone, Copy, Debug)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual variance with denominator `n - 2` (zero when `n == 2`).
    pub resid_var: f64,
    pub r2: f64,
}

/// Simple least-squares line fit.
pub fn ols(x: &[f64], y: &[f64]) -> Result<OlsFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::domain("ols: need two equal-length samples of size >= 2"));
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return Err(Error::numerical("ols: regressor has zero variance"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut sse = 0.0;
    for i in 0..n {
        let e = y[i] - intercept - slope * x[i];
        sse += e * e;
    }
    let resid_var = if n > 2 { sse / (n - 2) as f64 } else { 0.0 };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(OlsFit { slope, intercept, resid_var, r2 })
}

/// Type-7 (linear interpolation of order statistics) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let p = p.clamp(0.0, 1.0);
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Silverman's rule-of-thumb bandwidth, `0.9 min(sd, IQR/1.34) n^{-1/5}`.
pub fn silverman_bandwidth(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::domain("bandwidth: need at least 2 points"));
    }
    let s = sd(x);
    let mut sorted = x.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let mut scale = if iqr > 0.0 { s.min(iqr / 1.34) } else { s };
    if !(scale > 0.0) {
        scale = s;
    }
    if !(scale > 0.0) {
        return Err(Error::numerical("bandwidth: sample has zero spread"));
    }
    Ok(0.9 * scale * (x.len() as f64).powf(-0.2))
}

/// Gaussian kernel density estimate at `x`.
pub fn kde_density(data: &[f64], bandwidth: f64, x: f64) -> f64 {
    let mut s = 0.0;
    for &v in data {
        let t = (x - v) / bandwidth;
        s += (-0.5 * t * t).exp();
    }
    s / (data.len() as f64 * bandwidth * SQRT_2PI)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse standard normal CDF (Wichura's PPND16 rational approximations,
/// relative accuracy about 1e-16). Returns +/- infinity at p = 1 / p = 0.
pub fn normal_ppf(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = q * poly(
            r,
            &[
                3.3871328727963666080e0,
                1.3314166789178437745e2,
                1.9715909503065514427e3,
                1.3731693765509461125e4,
                4.5921953931549871457e4,
                6.7265770927008700853e4,
                3.3430575583588128105e4,
                2.5090809287301226727e3,
            ],
        );
        let den = poly(
            r,
            &[
                1.0,
                4.2313330701600911252e1,
                6.8718700749205790830e2,
                5.3941960214247511077e3,
                2.1213794301586595867e4,
                3.9307895800092710610e4,
                2.8729085735721942674e4,
                5.2264952788528545610e3,
            ],
        );
        return num / den;
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(
            r,
            &[
                1.42343711074968357734e0,
                4.63033784615654529590e0,
                5.76949722146069140550e0,
                3.64784832476320460504e0,
                1.27045825245236838258e0,
                2.41780725177450611770e-1,
                2.27238449892691845833e-2,
                7.74545014278341407640e-4,
            ],
        ) / poly(
            r,
            &[
                1.0,
                2.05319162663775882187e0,
                1.67638483018380384940e0,
                6.89767334985100004550e-1,
                1.48103976427480074590e-1,
                1.51986665636164571966e-2,
                5.47593808499534494600e-4,
                1.05075007164441684324e-9,
            ],
        )
    } else {
        let r = r - 5.0;
        poly(
            r,
            &[
                6.65790464350110377720e0,
                5.46378491116411436990e0,
                1.78482653991729133580e0,
                2.96560571828504891230e-1,
                2.65321895265761230930e-2,
                1.24266094738807843860e-3,
                2.71155556874348757815e-5,
                2.01033439929228813265e-7,
            ],
        ) / poly(
            r,
            &[
                1.0,
                5.99832206555887937690e-1,
                1.36929880922735805310e-1,
                1.48753612908506148525e-2,
                7.86869131145613259100e-4,
                1.84631831751005468180e-5,
                1.42151175831644588870e-7,
                2.04426310338993978564e-15,
            ],
        )
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

fn poly(x: f64, coeffs: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Gauss-Legendre nodes and weights of the given order, mapped to (0, 1).
/// Weights sum to 1. Nodes are strictly inside the interval and ascending.
pub fn gauss_legendre_unit(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d2) = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 + x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
    let nodes_sorted: Vec<f64> = idx.iter().map(|&i| nodes[i]).collect();
    let weights_sorted: Vec<f64> = idx.iter().map(|&i| weights[i]).collect();
    (nodes_sorted, weights_sorted)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Cached order-64 rule used by the copula integral.
pub fn gauss_legendre_64() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_unit(64))
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[derive(Clone, Copy, Debug)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Memory-parameter search grid: -0.499 to 0.491 in steps of 0.01, plus the
/// upper endpoint 0.499.
pub fn d_search_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..100).map(|k| -0.499 + 0.01 * k as f64).collect();
    g.push(0.499);
    g
}

/// Evaluate `f` on the grid, then refine around the best grid point with
/// golden-section search until the bracket is narrower than `tol`. Returns
/// the best point seen over all evaluations.
pub fn minimize_scalar<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: f64) -> Minimum {
    debug_assert!(grid.len() >= 2);
    let mut best_i = 0;
    let mut best_f = f64::INFINITY;
    let mut values = Vec::with_capacity(grid.len());
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x);
        values.push(v);
        if v < best_f {
            best_f = v;
            best_i = i;
        }
    }
    let mut best = Minimum { x: grid[best_i], value: best_f };
    let mut a = grid[best_i.saturating_sub(1)];
    let mut b = grid[(best_i + 1).min(grid.len() - 1)];
    if !(b > a) {
        return best;
    }
    let phi = (3.0 - 5f64.sqrt()) / 2.0;
    let mut x1 = a + phi * (b - a);
    let mut x2 = b - phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - phi * (b - a);
            f2 = f(x2);
        }
        if f1 < best.value {
            best = Minimum { x: x1, value: f1 };
        }
        if f2 < best.value {
            best = Minimum { x: x2, value: f2 };
        }
    }
    best
}
