//! Copula-based memory estimation on gappy series.
//!
//! Lagged Spearman correlations of the pseudo-observations are mapped to
//! copula parameters, rescaled by a margin-dependent integral K, and matched
//! to the asymptotic autocovariance power law to recover the memory
//! parameter without imputing anything.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::gaps::GappySeries;
use crate::result::{EstimateResult, LagDiagnostic};
use crate::stats::{
    average_ranks, d_search_grid, gauss_legendre_64, gauss_legendre_unit, integrate, kde_density, minimize_scalar,
    normal_pdf, normal_ppf, quantile_sorted, silverman_bandwidth, spearman,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopulaFamily {
    Gaussian,
    Frank,
}

impl CopulaFamily {
    pub fn label(&self) -> &'static str {
        match self {
            CopulaFamily::Gaussian => "gaussian",
            CopulaFamily::Frank => "frank",
        }
    }
}

/// Rank-based pseudo-observations rank / (n_obs + 1) over the observed
/// values, with average ranks for ties. Gaps stay `None`.
pub fn pseudo_observations(series: &GappySeries) -> Result<Vec<Option<f64>>> {
    let obs = series.observed_values();
    if obs.len() < 2 {
        return Err(Error::domain("pseudo-observations need at least 2 observed points"));
    }
    let ranks = average_ranks(&obs);
    let denom = (obs.len() + 1) as f64;
    let mut out = Vec::with_capacity(series.len());
    let mut k = 0;
    for &o in series.observed() {
        if o {
            out.push(Some(ranks[k] / denom));
            k += 1;
        } else {
            out.push(None);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagSpearman {
    pub lag: usize,
    pub rho: f64,
    pub pairs_used: usize,
}

/// Spearman rank correlation of (x_t, x_{t+h}) over complete pairs, for each
/// lag h = first_lag..=last_lag. The pair sample is re-ranked before the
/// correlation. Lags with fewer than `min_pairs` complete pairs (or a
/// degenerate pair sample) are dropped.
pub fn spearman_by_lag(
    pseudo: &[Option<f64>],
    first_lag: usize,
    last_lag: usize,
    min_pairs: usize,
) -> Result<Vec<LagSpearman>> {
    let n = pseudo.len();
    if first_lag == 0 || first_lag > last_lag || last_lag >= n {
        return Err(Error::domain(format!(
            "lag range [{}, {}] invalid for series length {}",
            first_lag, last_lag, n
        )));
    }
    let mut out = Vec::new();
    for h in first_lag..=last_lag {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n - h {
            if let (Some(a), Some(b)) = (pseudo[i], pseudo[i + h]) {
                x.push(a);
                y.push(b);
            }
        }
        if x.len() < min_pairs {
            continue;
        }
        match spearman(&x, &y) {
            Ok(rho) => out.push(LagSpearman { lag: h, rho, pairs_used: x.len() }),
            Err(_) => continue,
        }
    }
    if out.is_empty() {
        return Err(Error::estimation(format!(
            "no usable lags in [{}, {}]: every lag had fewer than {} complete pairs or a degenerate pair sample",
            first_lag, last_lag, min_pairs
        )));
    }
    Ok(out)
}

/// Spearman's rho as a function of the copula parameter.
/// Gaussian: rho = (6/pi) arcsin(theta/2). Frank: the Debye-function
/// formula rho = 1 - 12 (D_1(theta) - D_2(theta)) / theta, with the odd
/// symmetry rho(-theta) = -rho(theta) and a series expansion near zero.
pub fn rho_from_theta(family: CopulaFamily, theta: f64) -> Result<f64> {
    match family {
        CopulaFamily::Gaussian => {
            if !(theta > -1.0 && theta < 1.0) {
                return Err(Error::domain(format!("Gaussian copula parameter {} outside (-1, 1)", theta)));
            }
            Ok(6.0 / std::f64::consts::PI * (theta / 2.0).asin())
        }
        CopulaFamily::Frank => {
            if !theta.is_finite() {
                return Err(Error::domain("Frank copula parameter must be finite"));
            }
            let t = theta.abs();
            let rho = if t < 1e-3 {
                t / 6.0 - t.powi(3) / 450.0
            } else {
                1.0 - 12.0 / t * (debye(1, t) - debye(2, t))
            };
            Ok(rho * theta.signum())
        }
    }
}

/// Debye function D_k(x) = (k / x^k) * integral_0^x t^k / (e^t - 1) dt.
fn debye(k: u32, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let f = |t: f64| -> f64 {
        if t == 0.0 {
            return if k == 1 { 1.0 } else { 0.0 };
        }
        t.powi(k as i32) / t.exp_m1()
    };
    let integral = integrate(&f, 0.0, x, 1e-12);
    k as f64 / x.powi(k as i32) * integral
}

const FRANK_THETA_MAX: f64 = 50.0;

/// Copula parameter implied by a Spearman correlation. Gaussian inverts in
/// closed form (theta = 2 sin(pi rho / 6)); Frank inverts the Debye formula
/// by bisection on [-50, 50] and reports an error when |rho| lies outside
/// the range that bracket can reach.
pub fn theta_from_rho(family: CopulaFamily, rho: f64) -> Result<f64> {
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(Error::domain(format!("Spearman correlation {} outside (-1, 1)", rho)));
    }
    match family {
        CopulaFamily::Gaussian => {
            let theta = 2.0 * (std::f64::consts::PI * rho / 6.0).sin();
            if theta.abs() >= 1.0 {
                return Err(Error::numerical(format!(
                    "Spearman correlation {} maps to a Gaussian parameter at the unit boundary",
                    rho
                )));
            }
            Ok(theta)
        }
        CopulaFamily::Frank => {
            if rho == 0.0 {
                return Ok(0.0);
            }
            let target = rho.abs();
            let reach = rho_from_theta(CopulaFamily::Frank, FRANK_THETA_MAX)?;
            if target >= reach {
                return Err(Error::numerical(format!(
                    "Spearman correlation {:.4} is outside the invertible Frank range (|rho| < {:.4})",
                    rho, reach
                )));
            }
            let mut lo = 0.0f64;
            let mut hi = FRANK_THETA_MAX;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let r = rho_from_theta(CopulaFamily::Frank, mid)?;
                if r < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-12 {
                    break;
                }
            }
            Ok(0.5 * (lo + hi) * rho.signum())
        }
    }
}

/// Copula CDF in the small-parameter regime used by the derivative
/// self-check. Frank is exact; Gaussian uses the tetrachoric expansion,
/// accurate to O(theta^4) which is far below the check tolerance at
/// theta = 1e-4.
fn copula_cdf_small_theta(family: CopulaFamily, u: f64, v: f64, theta: f64) -> f64 {
    match family {
        CopulaFamily::Gaussian => {
            let x = normal_ppf(u);
            let y = normal_ppf(v);
            let hermite = theta + theta * theta * x * y / 2.0
                + theta.powi(3) * (x * x - 1.0) * (y * y - 1.0) / 6.0;
            u * v + normal_pdf(x) * normal_pdf(y) * hermite
        }
        CopulaFamily::Frank => {
            let gu = (-theta * u).exp_m1();
            let gv = (-theta * v).exp_m1();
            let g1 = (-theta).exp_m1();
            -(gu * gv / g1).ln_1p() / theta
        }
    }
}

/// Derivative of the copula CDF in its parameter, at the independence point.
/// Gaussian: phi(PPF(u)) phi(PPF(v)). Frank: uv(1-u)(1-v)/2.
fn cdot(family: CopulaFamily, u: f64, v: f64) -> f64 {
    match family {
        CopulaFamily::Gaussian => normal_pdf(normal_ppf(u)) * normal_pdf(normal_ppf(v)),
        CopulaFamily::Frank => u * v * (1.0 - u) * (1.0 - v) / 2.0,
    }
}

/// Margin correction integral
/// K = integral_0^1 integral_0^1 Cdot(u, v) / (f(Q(u)) f(Q(v))) du dv,
/// by tensor-product Gauss-Legendre quadrature of the given order.
///
/// `density` and `quantile` describe the margin (typically a kernel density
/// estimate and an empirical quantile function of the observed values). The
/// analytic parameter derivative Cdot is verified against a centred finite
/// difference of the copula CDF on a subgrid of nodes before use.
pub fn khat_with_order(
    family: CopulaFamily,
    density: &dyn Fn(f64) -> f64,
    quantile: &dyn Fn(f64) -> f64,
    order: usize,
) -> Result<f64> {
    if order < 2 {
        return Err(Error::domain("quadrature order must be at least 2"));
    }
    let owned;
    let (nodes, weights): (&[f64], &[f64]) = if order == 64 {
        let rule = gauss_legendre_64();
        (&rule.0, &rule.1)
    } else {
        owned = gauss_legendre_unit(order);
        (&owned.0, &owned.1)
    };
    let h = 1e-4;
    let check_idx: Vec<usize> =
        [0usize, order / 4, order / 2, 3 * order / 4, order - 1].iter().copied().collect();
    for &i in &check_idx {
        for &j in &check_idx {
            let (u, v) = (nodes[i], nodes[j]);
            let analytic = cdot(family, u, v);
            let fd = (copula_cdf_small_theta(family, u, v, h)
                - copula_cdf_small_theta(family, u, v, -h))
                / (2.0 * h);
            // The floor must sit above the finite-difference rounding noise
            // eps/(2h) ~ 5e-13, which dominates near the unit corners where
            // the derivative itself vanishes.
            let tol = 1e-6 * analytic.abs().max(1e-5);
            if (fd - analytic).abs() > tol {
                return Err(Error::numerical(format!(
                    "copula derivative self-check failed at node (u, v) = ({:.6}, {:.6}): \
                     analytic {:.3e} vs finite difference {:.3e}",
                    u, v, analytic, fd
                )));
            }
        }
    }
    let mut inv_f = Vec::with_capacity(order);
    for (i, &u) in nodes.iter().enumerate() {
        let qv = quantile(u);
        if !qv.is_finite() {
            return Err(Error::numerical(format!(
                "margin quantile is not finite at node u = {:.6} (index {})",
                u, i
            )));
        }
        let f = density(qv);
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::numerical(format!(
                "margin density is not positive at node u = {:.6} (quantile {:.6})",
                u, qv
            )));
        }
        inv_f.push(1.0 / f);
    }
    let mut k = 0.0;
    for i in 0..order {
        let wi = weights[i] * inv_f[i];
        for j in 0..order {
            k += wi * weights[j] * inv_f[j] * cdot(family, nodes[i], nodes[j]);
        }
    }
    Ok(k)
}

/// Order-64 margin correction integral; see `khat_with_order`.
pub fn khat(
    family: CopulaFamily,
    density: &dyn Fn(f64) -> f64,
    quantile: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    khat_with_order(family, density, quantile, 64)
}

/// Configuration of the copula memory estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopulaConfig {
    pub family: CopulaFamily,
    /// First lag used (default 1).
    pub first_lag: usize,
    /// Last lag used (default 24).
    pub last_lag: usize,
    /// Kernel bandwidth for the margin density; Silverman's rule when absent.
    pub density_bandwidth: Option<f64>,
}

impl CopulaConfig {
    pub fn new(family: CopulaFamily) -> Self {
        CopulaConfig { family, first_lag: 1, last_lag: 24, density_bandwidth: None }
    }
}

const MIN_PAIRS_PER_LAG: usize = 10;
const MIN_USABLE_LAGS: usize = 5;

/// Asymptotic autocovariance constant Gamma(1-d)/Gamma(d), written via the
/// reflection formula as Gamma(1-d)^2 sin(pi d) / pi so it is smooth and
/// exactly zero at d = 0.
fn power_law_constant(d: f64) -> f64 {
    (2.0 * ln_gamma(1.0 - d)).exp() * (std::f64::consts::PI * d).sin() / std::f64::consts::PI
}

/// Copula memory estimator on a possibly gappy series.
///
/// Lagged Spearman correlations are inverted to per-lag copula parameters,
/// scaled by the margin integral K into autocovariance estimates, and the
/// memory parameter is chosen to minimize the squared distance to the
/// power law (Gamma(1-d)/Gamma(d)) h^{2d-1} over the usable lags.
pub fn estimate_d_copula(series: &GappySeries, config: &CopulaConfig) -> Result<EstimateResult> {
    let n = series.len();
    if config.first_lag == 0 || config.first_lag > config.last_lag || config.last_lag >= n {
        return Err(Error::domain(format!(
            "lag range [{}, {}] invalid for series length {}",
            config.first_lag, config.last_lag, n
        )));
    }
    if let Some(bw) = config.density_bandwidth {
        if !(bw > 0.0) || !bw.is_finite() {
            return Err(Error::domain(format!("density bandwidth {} must be positive", bw)));
        }
    }
    let pseudo = pseudo_observations(series)?;
    let lag_stats = spearman_by_lag(&pseudo, config.first_lag, config.last_lag, MIN_PAIRS_PER_LAG)?;
    let mut lags: Vec<LagDiagnostic> = Vec::with_capacity(lag_stats.len());
    for ls in &lag_stats {
        match theta_from_rho(config.family, ls.rho) {
            Ok(theta) => lags.push(LagDiagnostic {
                lag: ls.lag,
                rho: ls.rho,
                theta,
                pairs_used: ls.pairs_used,
            }),
            Err(_) => continue,
        }
    }
    if lags.len() < MIN_USABLE_LAGS {
        return Err(Error::estimation(format!(
            "only {} usable lags after dropping sparse or non-invertible ones; need at least {}",
            lags.len(),
            MIN_USABLE_LAGS
        )));
    }
    let obs = series.observed_values();
    let mut sorted = obs.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let bandwidth = match config.density_bandwidth {
        Some(bw) => bw,
        None => silverman_bandwidth(&obs)?,
    };
    let density = |x: f64| kde_density(&obs, bandwidth, x);
    let quantile = |p: f64| quantile_sorted(&sorted, p);
    let k_hat = khat(config.family, &density, &quantile)?;
    let scaled: Vec<f64> = lags.iter().map(|l| k_hat * l.theta).collect();
    let log_lags: Vec<f64> = lags.iter().map(|l| (l.lag as f64).ln()).collect();
    let objective = |d: f64| -> f64 {
        let c = power_law_constant(d);
        let mut s = 0.0;
        for (i, &target) in scaled.iter().enumerate() {
            let model = c * ((2.0 * d - 1.0) * log_lags[i]).exp();
            let e = target - model;
            s += e * e;
        }
        s
    };
    let opt = minimize_scalar(objective, &d_search_grid(), 1e-6);
    let dropped = (config.last_lag - config.first_lag + 1) - lags.len();
    let mut res = EstimateResult::new(
        match config.family {
            CopulaFamily::Gaussian => "copula-gaussian",
            CopulaFamily::Frank => "copula-frank",
        },
        opt.x,
        lags.len(),
    )
    .boundary_estimate(crate::spectral::at_search_boundary(opt.x));
    res.objective_at_opt = Some(opt.value);
    res.diagnostics.insert("khat".to_string(), k_hat);
    res.diagnostics.insert("bandwidth".to_string(), bandwidth);
    res.diagnostics.insert("lags_dropped".to_string(), dropped as f64);
    res.lags = lags;
    Ok(res)
}
