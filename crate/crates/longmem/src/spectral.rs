//! Frequency-domain memory estimators: the periodogram, log-periodogram
//! (GPH) regression, local Whittle, and exact local Whittle with fractional
//! differencing.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arfima::pi_coeffs;
use crate::error::{Error, Result};
use crate::result::EstimateResult;
use crate::stats::{d_search_grid, mean, minimize_scalar, ols};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Optimum within this distance of the search endpoints counts as pinned.
pub const BOUNDARY_TOL: f64 = 1e-5;
pub const D_SEARCH_MAX: f64 = 0.499;

pub fn at_search_boundary(d: f64) -> bool {
    d.abs() >= D_SEARCH_MAX - BOUNDARY_TOL
}

fn check_finite(y: &[f64]) -> Result<()> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(
            "series contains missing or non-finite values; impute before spectral estimation",
        ));
    }
    Ok(())
}

/// Periodogram ordinates I(lambda_j) = |sum_t y_t e^{-i lambda_j t}|^2 / (2 pi n)
/// at every Fourier frequency j = 0..n-1.
pub fn periodogram_full(y: &[f64]) -> Result<Vec<f64>> {
    if y.len() < 2 {
        return Err(Error::domain("periodogram needs a series of length >= 2"));
    }
    check_finite(y)?;
    let n = y.len();
    let mut buf: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    Ok(buf.iter().map(|v| v.norm_sqr() / (TWO_PI * n as f64)).collect())
}

/// Periodogram at the positive Fourier frequencies j = 1..floor(n/2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    pub n: usize,
    pub freqs: Vec<f64>,
    pub ordinates: Vec<f64>,
}

pub fn periodogram(y: &[f64]) -> Result<Periodogram> {
    let full = periodogram_full(y)?;
    let n = y.len();
    let half = n / 2;
    let freqs: Vec<f64> = (1..=half).map(|j| TWO_PI * j as f64 / n as f64).collect();
    let ordinates: Vec<f64> = (1..=half).map(|j| full[j]).collect();
    Ok(Periodogram { n, freqs, ordinates })
}

/// Default bandwidth floor(1 + sqrt(len)).
pub fn default_bandwidth(len: usize) -> usize {
    (1.0 + (len as f64).sqrt()).floor() as usize
}

fn resolve_bandwidth(m: Option<usize>, len: usize) -> Result<usize> {
    let m = m.unwrap_or_else(|| default_bandwidth(len));
    if m < 2 {
        return Err(Error::domain(format!("bandwidth m = {} too small (need >= 2)", m)));
    }
    if 2 * m >= len {
        return Err(Error::domain(format!(
            "bandwidth m = {} too large for series length {}",
            m, len
        )));
    }
    Ok(m)
}

/// Log-periodogram regression on precomputed positive-frequency ordinates.
/// `ordinates[j-1]` must hold I(lambda_j) for a series of length `n`.
pub fn gph_from_ordinates(ordinates: &[f64], n: usize, m: usize) -> Result<EstimateResult> {
    if m < 2 || m > ordinates.len() {
        return Err(Error::domain(format!("bandwidth m = {} out of range", m)));
    }
    let mut x = Vec::with_capacity(m);
    let mut logy = Vec::with_capacity(m);
    for j in 1..=m {
        let i = ordinates[j - 1];
        if !(i > 0.0) {
            return Err(Error::numerical(format!(
                "zero periodogram ordinate at frequency index {}",
                j
            )));
        }
        let lam = TWO_PI * j as f64 / n as f64;
        x.push(-2.0 * (2.0 * (lam / 2.0).sin()).ln());
        logy.push(i.ln());
    }
    let fit = ols(&x, &logy)?;
    let mut res = EstimateResult::new("gph", fit.slope, m);
    res.diagnostics.insert("intercept".to_string(), fit.intercept);
    res.diagnostics.insert("resid_var".to_string(), fit.resid_var);
    res.diagnostics.insert("r2".to_string(), fit.r2);
    Ok(res)
}

/// GPH log-periodogram estimator. Regresses log I(lambda_j) on
/// -2 log(2 sin(lambda_j / 2)) over j = 1..m; the slope estimates d.
pub fn gph(y: &[f64], m: Option<usize>) -> Result<EstimateResult> {
    let pg = periodogram(y)?;
    let m = resolve_bandwidth(m, y.len())?;
    gph_from_ordinates(&pg.ordinates, y.len(), m)
}

/// Local Whittle estimator: minimizes
/// R(d) = log( mean_j lambda_j^{2d} I(lambda_j) ) - 2d mean_j log lambda_j
/// over the search grid with golden-section refinement.
pub fn local_whittle(y: &[f64], m: Option<usize>) -> Result<EstimateResult> {
    let pg = periodogram(y)?;
    let m = resolve_bandwidth(m, y.len())?;
    for j in 1..=m {
        if !(pg.ordinates[j - 1] > 0.0) {
            return Err(Error::numerical(format!(
                "zero periodogram ordinate at frequency index {}",
                j
            )));
        }
    }
    let loglam: Vec<f64> = pg.freqs[..m].iter().map(|l| l.ln()).collect();
    let ords = &pg.ordinates[..m];
    let mean_loglam = mean(&loglam);
    let objective = |d: f64| -> f64 {
        let mut g = 0.0;
        for j in 0..m {
            g += (2.0 * d * loglam[j]).exp() * ords[j];
        }
        g /= m as f64;
        if !(g > 0.0) || !g.is_finite() {
            return f64::INFINITY;
        }
        g.ln() - 2.0 * d * mean_loglam
    };
    let opt = minimize_scalar(objective, &d_search_grid(), 1e-6);
    if !opt.value.is_finite() {
        return Err(Error::estimation("local Whittle objective is degenerate on this series"));
    }
    let mut res = EstimateResult::new("lw", opt.x, m).boundary_estimate(at_search_boundary(opt.x));
    res.objective_at_opt = Some(opt.value);
    Ok(res)
}

/// Apply the fractional difference filter (1 - L)^d by truncated
/// convolution: z_t = sum_{j=0..t} pi_j y_{t-j}.
pub fn fracdiff_apply(y: &[f64], d: f64) -> Result<Vec<f64>> {
    check_finite(y)?;
    if y.is_empty() {
        return Err(Error::domain("cannot difference an empty series"));
    }
    let pi = pi_coeffs(d, y.len())?;
    let n = y.len();
    let mut z = vec![0.0; n];
    for t in 0..n {
        let mut s = 0.0;
        for j in 0..=t {
            s += pi[j] * y[t - j];
        }
        z[t] = s;
    }
    Ok(z)
}

/// Exact local Whittle estimator. The series is anchored at its first
/// observation (z_t = y_{t+1} - y_1, giving n-1 points), and the objective
/// recomputes the periodogram of the fractionally differenced series at each
/// candidate d:
/// R(d) = log( mean_j I_{(1-L)^d z}(lambda_j) ) - 2d mean_j log lambda_j.
pub fn elw(y: &[f64], m: Option<usize>) -> Result<EstimateResult> {
    check_finite(y)?;
    if y.len() < 7 {
        return Err(Error::domain("exact local Whittle needs a series of length >= 7"));
    }
    let z: Vec<f64> = y[1..].iter().map(|v| v - y[0]).collect();
    let nz = z.len();
    let m = resolve_bandwidth(m, nz)?;
    let loglam: Vec<f64> = (1..=m).map(|j| (TWO_PI * j as f64 / nz as f64).ln()).collect();
    let mean_loglam = mean(&loglam);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(nz);
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); nz];
    let norm = TWO_PI * nz as f64;
    let objective = |d: f64| -> f64 {
        let pi = match pi_coeffs(d, nz) {
            Ok(p) => p,
            Err(_) => return f64::INFINITY,
        };
        for t in 0..nz {
            let mut s = 0.0;
            for j in 0..=t {
                s += pi[j] * z[t - j];
            }
            buf[t] = Complex64::new(s, 0.0);
        }
        fft.process(&mut buf);
        let mut g = 0.0;
        for j in 1..=m {
            g += buf[j].norm_sqr() / norm;
        }
        g /= m as f64;
        if !(g > 0.0) || !g.is_finite() {
            return f64::INFINITY;
        }
        g.ln() - 2.0 * d * mean_loglam
    };
    let opt = minimize_scalar(objective, &d_search_grid(), 1e-6);
    if !opt.value.is_finite() {
        return Err(Error::estimation("exact local Whittle objective is degenerate on this series"));
    }
    let mut res = EstimateResult::new("elw", opt.x, m).boundary_estimate(at_search_boundary(opt.x));
    res.objective_at_opt = Some(opt.value);
    Ok(res)
}
