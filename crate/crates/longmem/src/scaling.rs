//! Time-domain scaling estimators: rescaled range (R/S) and detrended
//! fluctuation analysis (DFA).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::result::EstimateResult;
use crate::stats::{ols, sd};

fn check_finite(y: &[f64]) -> Result<()> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(
            "series contains missing or non-finite values; impute before scaling estimation",
        ));
    }
    Ok(())
}

/// Rescaled adjusted range of one window: the range of the bridge
/// x_t - (t/k) x_k over the partial sums x_t, divided by the window's
/// sample standard deviation.
pub fn rs_statistic(window: &[f64]) -> Result<f64> {
    let k = window.len();
    if k < 2 {
        return Err(Error::domain("R/S window needs at least 2 points"));
    }
    check_finite(window)?;
    let s = sd(window);
    if !(s > 0.0) {
        return Err(Error::numerical("R/S window has zero variance"));
    }
    let kf = k as f64;
    let mut partial = 0.0;
    let total: f64 = window.iter().sum();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (t, &v) in window.iter().enumerate() {
        partial += v;
        let bridge = partial - (t + 1) as f64 / kf * total;
        if bridge > hi {
            hi = bridge;
        }
        if bridge < lo {
            lo = bridge;
        }
    }
    Ok((hi - lo) / s)
}

/// R/S estimator configuration. `stride = None` tiles windows without
/// overlap (stride equal to the window size).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsConfig {
    pub window_sizes: Vec<usize>,
    pub stride: Option<usize>,
}

impl Default for RsConfig {
    fn default() -> Self {
        RsConfig { window_sizes: vec![16, 32, 64, 128, 256, 512], stride: None }
    }
}

impl RsConfig {
    fn validate(&self, n: usize) -> Result<()> {
        let mut sizes = self.window_sizes.clone();
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.len() < 3 {
            return Err(Error::domain("R/S needs at least 3 distinct window sizes"));
        }
        if sizes[0] < 8 {
            return Err(Error::domain("R/S window sizes must all be >= 8"));
        }
        if *sizes.last().unwrap() > n {
            return Err(Error::domain(format!(
                "largest R/S window {} exceeds series length {}",
                sizes.last().unwrap(),
                n
            )));
        }
        if let Some(s) = self.stride {
            if s == 0 {
                return Err(Error::domain("R/S stride must be positive"));
            }
        }
        Ok(())
    }
}

/// Pooled R/S estimator: log R/S of every window of every size is regressed
/// on log window size; the memory parameter is the slope minus 1/2.
pub fn rs_estimate(y: &[f64], config: &RsConfig) -> Result<EstimateResult> {
    check_finite(y)?;
    let n = y.len();
    config.validate(n)?;
    let mut sizes = config.window_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let mut logk = Vec::new();
    let mut logrs = Vec::new();
    let mut skipped = 0usize;
    for &k in &sizes {
        let stride = config.stride.unwrap_or(k);
        let mut used = 0usize;
        let mut start = 0usize;
        while start + k <= n {
            match rs_statistic(&y[start..start + k]) {
                Ok(rs) => {
                    logk.push((k as f64).ln());
                    logrs.push(rs.ln());
                    used += 1;
                }
                Err(_) => skipped += 1,
            }
            start += stride;
        }
        if used == 0 {
            return Err(Error::numerical(format!(
                "every window of size {} has zero variance",
                k
            )));
        }
    }
    let fit = ols(&logk, &logrs)?;
    let mut res = EstimateResult::new("rs", fit.slope - 0.5, logk.len());
    res.diagnostics.insert("slope".to_string(), fit.slope);
    res.diagnostics.insert("r2".to_string(), fit.r2);
    res.diagnostics.insert("resid_var".to_string(), fit.resid_var);
    res.diagnostics.insert("windows_skipped".to_string(), skipped as f64);
    Ok(res)
}

/// DFA configuration: detrending polynomial degree is `degree + 1` applied
/// to the integrated series, boxes have `m + 1` points for each entry `m` of
/// `box_sizes`, and the log-log fit uses sizes in `[fit_min, fit_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfaConfig {
    pub degree: usize,
    pub box_sizes: Vec<usize>,
    pub fit_min: usize,
    pub fit_max: usize,
}

impl Default for DfaConfig {
    fn default() -> Self {
        DfaConfig { degree: 0, box_sizes: (50..=100).collect(), fit_min: 50, fit_max: 100 }
    }
}

/// Mean squared fluctuation per box size, with its log-sqrt column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationTable {
    pub box_sizes: Vec<usize>,
    pub f2: Vec<f64>,
    pub log_fluct: Vec<f64>,
}

/// Detrended fluctuation function. The series is integrated, cut into
/// consecutive disjoint boxes of m + 1 points (a trailing partial box is
/// discarded), a polynomial of degree `degree + 1` is removed from each box
/// by least squares, and F^2(m) is the mean over boxes of the mean squared
/// residual.
pub fn dfa_fluctuation(y: &[f64], config: &DfaConfig) -> Result<FluctuationTable> {
    check_finite(y)?;
    let n = y.len();
    if config.box_sizes.is_empty() {
        return Err(Error::domain("DFA needs at least one box size"));
    }
    let mut integrated = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &v in y {
        acc += v;
        integrated.push(acc);
    }
    let ncols = config.degree + 2;
    let mut box_sizes = config.box_sizes.clone();
    box_sizes.sort_unstable();
    box_sizes.dedup();
    let mut f2_col = Vec::with_capacity(box_sizes.len());
    let mut log_col = Vec::with_capacity(box_sizes.len());
    for &m in &box_sizes {
        let len = m + 1;
        if m < ncols {
            return Err(Error::domain(format!(
                "box size {} too small for detrending degree {}",
                m, config.degree
            )));
        }
        let boxes = n / len;
        if boxes == 0 {
            return Err(Error::domain(format!("box size {} exceeds series length {}", m, n)));
        }
        let q = orthonormal_polynomial_basis(len, ncols);
        let mut f2_sum = 0.0;
        for b in 0..boxes {
            let seg = &integrated[b * len..(b + 1) * len];
            let mut sse = 0.0;
            let mut coefs = vec![0.0; ncols];
            for (c, qc) in q.iter().enumerate() {
                let mut dot = 0.0;
                for i in 0..len {
                    dot += qc[i] * seg[i];
                }
                coefs[c] = dot;
            }
            for i in 0..len {
                let mut fitted = 0.0;
                for (c, qc) in q.iter().enumerate() {
                    fitted += coefs[c] * qc[i];
                }
                let e = seg[i] - fitted;
                sse += e * e;
            }
            f2_sum += sse / len as f64;
        }
        let f2 = f2_sum / boxes as f64;
        f2_col.push(f2);
        log_col.push(0.5 * f2.ln());
    }
    Ok(FluctuationTable { box_sizes, f2: f2_col, log_fluct: log_col })
}

/// Orthonormal basis of the polynomial design 1, t, ..., t^{ncols-1} on
/// t = 1..=len, by twice-iterated Gram-Schmidt.
fn orthonormal_polynomial_basis(len: usize, ncols: usize) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = (0..ncols)
        .map(|c| (1..=len).map(|t| (t as f64).powi(c as i32)).collect())
        .collect();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(ncols);
    for j in 0..ncols {
        let mut v = cols[j].clone();
        for _ in 0..2 {
            for item in q.iter() {
                let dot: f64 = item.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                for i in 0..len {
                    v[i] -= dot * item[i];
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        cols[j] = v.clone();
        q.push(v);
    }
    q
}

/// DFA estimator: the slope of log sqrt(F^2(m)) on log m over the fit range
/// estimates d + 1/2.
pub fn dfa_estimate(y: &[f64], config: &DfaConfig) -> Result<EstimateResult> {
    let table = dfa_fluctuation(y, config)?;
    let mut logm = Vec::new();
    let mut logf = Vec::new();
    for (i, &m) in table.box_sizes.iter().enumerate() {
        if m < config.fit_min || m > config.fit_max {
            continue;
        }
        if !(table.f2[i] > 0.0) {
            return Err(Error::numerical(format!("zero fluctuation at box size {}", m)));
        }
        logm.push((m as f64).ln());
        logf.push(table.log_fluct[i]);
    }
    if logm.len() < 3 {
        return Err(Error::domain(format!(
            "only {} box sizes inside the fit range [{}, {}]; need at least 3",
            logm.len(),
            config.fit_min,
            config.fit_max
        )));
    }
    let fit = ols(&logm, &logf)?;
    let mut res = EstimateResult::new("dfa", fit.slope - 0.5, logm.len());
    res.diagnostics.insert("slope".to_string(), fit.slope);
    res.diagnostics.insert("r2".to_string(), fit.r2);
    res.diagnostics.insert("resid_var".to_string(), fit.resid_var);
    Ok(res)
}
