//! ARFIMA(p, d, q) models: fractional filter coefficients, exact
//! autocovariances, and exact Gaussian simulation by circulant embedding.

use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Stationary invertible ARFIMA(p, d, q) specification with innovation
/// variance `sigma2`. `phi` are the autoregressive coefficients, `theta` the
/// moving-average coefficients, both in lag order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArfimaModel {
    pub p: usize,
    pub d: f64,
    pub q: usize,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
}

impl ArfimaModel {
    pub fn new(d: f64, phi: Vec<f64>, theta: Vec<f64>, sigma2: f64) -> Result<Self> {
        let model = ArfimaModel { p: phi.len(), d, q: theta.len(), phi, theta, sigma2 };
        model.validate()?;
        Ok(model)
    }

    /// Pure fractional noise ARFIMA(0, d, 0) with unit innovation variance.
    pub fn fractional(d: f64) -> Result<Self> {
        ArfimaModel::new(d, Vec::new(), Vec::new(), 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.d.is_finite() || self.d <= -1.0 || self.d >= 0.5 {
            return Err(Error::domain(format!("memory parameter d = {} outside (-1, 0.5)", self.d)));
        }
        if self.p != self.phi.len() {
            return Err(Error::domain(format!("p = {} but phi has {} entries", self.p, self.phi.len())));
        }
        if self.q != self.theta.len() {
            return Err(Error::domain(format!("q = {} but theta has {} entries", self.q, self.theta.len())));
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::domain(format!("sigma2 = {} must be positive and finite", self.sigma2)));
        }
        if self.phi.iter().chain(self.theta.iter()).any(|c| !c.is_finite()) {
            return Err(Error::domain("AR/MA coefficients must be finite"));
        }
        let min_root = min_ar_root_modulus(&self.phi)?;
        if min_root <= 1.0 + 1e-8 {
            return Err(Error::domain(format!(
                "AR polynomial has a root of modulus {:.6} inside or too near the unit circle",
                min_root
            )));
        }
        Ok(())
    }

    /// Short-memory scale factor theta(1) / phi(1).
    fn arma_gain(&self) -> f64 {
        let num = 1.0 + self.theta.iter().sum::<f64>();
        let den = 1.0 - self.phi.iter().sum::<f64>();
        num / den
    }
}

/// Smallest root modulus of 1 - phi_1 z - ... - phi_p z^p, found with
/// Durand-Kerner iteration. Returns +infinity when the polynomial is
/// constant (no AR part).
fn min_ar_root_modulus(phi: &[f64]) -> Result<f64> {
    let mut coeffs: Vec<f64> = Vec::with_capacity(phi.len() + 1);
    coeffs.push(1.0);
    coeffs.extend(phi.iter().map(|c| -c));
    while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(f64::INFINITY);
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c / lead, 0.0)).collect();
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|j| Complex64::new(0.4, 0.9).powu(j as u32 + 1))
        .collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for j in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for k in 0..deg {
                if k != j {
                    denom *= roots[j] - roots[k];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let step = eval(roots[j]) / denom;
            roots[j] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-12 {
            break;
        }
    }
    let min_mod = roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min);
    if !min_mod.is_finite() {
        return Err(Error::numerical("AR root finding did not converge"));
    }
    Ok(min_mod)
}

fn check_frac_domain(d: f64) -> Result<()> {
    if !d.is_finite() || d <= -1.0 || d >= 0.5 {
        return Err(Error::domain(format!("memory parameter d = {} outside (-1, 0.5)", d)));
    }
    Ok(())
}

fn binomial_weights(d: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::domain("coefficient count must be at least 1"));
    }
    let mut w = Vec::with_capacity(count);
    w.push(1.0);
    for j in 1..count {
        let jf = j as f64;
        let next = w[j - 1] * (jf - 1.0 + d) / jf;
        w.push(next);
    }
    Ok(w)
}

/// First `count` coefficients of (1 - L)^{-d}: eta_0 = 1,
/// eta_j = eta_{j-1} (j - 1 + d) / j.
pub fn fracdiff_coeffs(d: f64, count: usize) -> Result<Vec<f64>> {
    check_frac_domain(d)?;
    binomial_weights(d, count)
}

/// First `count` coefficients of (1 - L)^{+d}: pi_0 = 1,
/// pi_j = pi_{j-1} (j - 1 - d) / j.
pub fn pi_coeffs(d: f64, count: usize) -> Result<Vec<f64>> {
    check_frac_domain(d)?;
    binomial_weights(-d, count)
}

/// Autocovariances gamma(0..=maxlag) of the model together with the
/// asymptotic power-law constant: gamma(h) ~ kappa_d h^{2d-1} as h grows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcvfTable {
    pub gamma: Vec<f64>,
    pub kappa_d: f64,
}

/// Autocovariances of fractional noise with unit innovation variance:
/// gamma(0) = Gamma(1-2d) / Gamma(1-d)^2, then the ratio recurrence
/// gamma(h) = gamma(h-1) (h - 1 + d) / (h - d).
fn fractional_acvf(d: f64, maxlag: usize) -> Vec<f64> {
    let g0 = (ln_gamma(1.0 - 2.0 * d) - 2.0 * ln_gamma(1.0 - d)).exp();
    let mut g = Vec::with_capacity(maxlag + 1);
    g.push(g0);
    for h in 1..=maxlag {
        let hf = h as f64;
        let next = g[h - 1] * (hf - 1.0 + d) / (hf - d);
        g.push(next);
    }
    g
}

/// MA(infinity) weights of theta(L) / phi(L), truncated where the tail has
/// decayed below 1e-16 of the largest weight.
fn arma_weights(phi: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
    let p = phi.len();
    let q = theta.len();
    let window = p.max(q).max(1);
    let cap = 200_000;
    let mut c = Vec::with_capacity(64);
    c.push(1.0);
    let mut scale = 1.0f64;
    let mut k = 1;
    loop {
        let mut v = if k <= q { theta[k - 1] } else { 0.0 };
        for i in 1..=p.min(k) {
            v += phi[i - 1] * c[k - i];
        }
        c.push(v);
        scale = scale.max(v.abs());
        if k >= window {
            let tail_max = c[c.len() - window..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if tail_max < 1e-16 * scale {
                break;
            }
        }
        if k >= cap {
            return Err(Error::numerical(
                "ARMA moving-average weights did not decay below tolerance; \
                 autocovariance truncation error would exceed the accuracy target",
            ));
        }
        k += 1;
    }
    Ok(c)
}

/// Lagged self-products b_m = sum_k c_k c_{k+m} for m = 0..len-1.
fn weight_autocorrelation(c: &[f64]) -> Vec<f64> {
    let k = c.len();
    if k <= 2048 {
        let mut b = vec![0.0; k];
        for m in 0..k {
            let mut s = 0.0;
            for i in 0..k - m {
                s += c[i] * c[i + m];
            }
            b[m] = s;
        }
        return b;
    }
    let size = (2 * k).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);
    let mut buf: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(size, Complex64::new(0.0, 0.0));
    fft.process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    ifft.process(&mut buf);
    (0..k).map(|m| buf[m].re / size as f64).collect()
}

/// Exact autocovariance table of the model up to `maxlag`.
///
/// For pure fractional noise the closed form is used directly. With AR/MA
/// terms the series is theta(L)/phi(L) applied to fractional noise, so its
/// autocovariance is the fractional autocovariance smoothed by the lagged
/// self-products of the short-memory weights.
pub fn arfima_acvf(model: &ArfimaModel, maxlag: usize) -> Result<AcvfTable> {
    model.validate()?;
    let d = model.d;
    let kappa_scale = model.arma_gain().powi(2);
    let kappa_d = model.sigma2
        * kappa_scale
        * ln_gamma(1.0 - 2.0 * d).exp()
        * (std::f64::consts::PI * d).sin()
        / std::f64::consts::PI;
    if model.p == 0 && model.q == 0 {
        let gamma: Vec<f64> = fractional_acvf(d, maxlag).iter().map(|g| g * model.sigma2).collect();
        return Ok(AcvfTable { gamma, kappa_d });
    }
    let c = arma_weights(&model.phi, &model.theta)?;
    let b = weight_autocorrelation(&c);
    let k = c.len();
    let gf = fractional_acvf(d, maxlag + k);
    let mut gamma = Vec::with_capacity(maxlag + 1);
    for h in 0..=maxlag {
        let mut s = b[0] * gf[h];
        for m in 1..k {
            let lo = (h as isize - m as isize).unsigned_abs();
            s += b[m] * (gf[lo] + gf[h + m]);
        }
        gamma.push(model.sigma2 * s);
    }
    Ok(AcvfTable { gamma, kappa_d })
}

/// A simulated Gaussian path together with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedSeries {
    pub values: Vec<f64>,
    pub seed: u64,
    pub model: ArfimaModel,
    pub burn: usize,
}

/// Exact zero-mean Gaussian sample path of length `n` after discarding a
/// burn-in prefix of length `burn`, via circulant embedding of the
/// autocovariance. Non-negativity of the embedding eigenvalues is checked;
/// tiny negative values (within 1e-8 of the largest, relatively) are clamped
/// to zero, and a genuinely indefinite embedding falls back to a dense
/// Cholesky factorization of the Toeplitz covariance.
pub fn simulate_gaussian(model: &ArfimaModel, n: usize, burn: usize, seed: u64) -> Result<SimulatedSeries> {
    model.validate()?;
    if n == 0 {
        return Err(Error::domain("series length n must be at least 1"));
    }
    let total = n + burn;
    let m_half = total.max(2).next_power_of_two();
    let table = arfima_acvf(model, m_half)?;
    let gamma = &table.gamma;
    let size = 2 * m_half;
    let mut row: Vec<Complex64> = Vec::with_capacity(size);
    for item in gamma.iter().take(m_half + 1) {
        row.push(Complex64::new(*item, 0.0));
    }
    for h in (1..m_half).rev() {
        row.push(Complex64::new(gamma[h], 0.0));
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut row);
    let lambda: Vec<f64> = row.iter().map(|v| v.re).collect();
    let lam_max = lambda.iter().fold(0.0f64, |m, &v| m.max(v));
    let lam_min = lambda.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let mut rng = rng_from_seed(seed);
    let values = if lam_min < -1e-8 * lam_max {
        toeplitz_cholesky_sample(gamma, total, &mut rng, lam_min)?
    } else {
        let mf = m_half as f64;
        let mut spec = vec![Complex64::new(0.0, 0.0); size];
        let draw = |r: &mut rand_chacha::ChaCha8Rng| -> f64 { StandardNormal.sample(r) };
        let l0 = lambda[0].max(0.0);
        spec[0] = Complex64::new((l0 / (2.0 * mf)).sqrt() * draw(&mut rng), 0.0);
        for k in 1..m_half {
            let lk = lambda[k].max(0.0);
            let scale = (lk / (4.0 * mf)).sqrt();
            let u = draw(&mut rng);
            let w = draw(&mut rng);
            spec[k] = Complex64::new(scale * u, scale * w);
            spec[size - k] = spec[k].conj();
        }
        let lm = lambda[m_half].max(0.0);
        spec[m_half] = Complex64::new((lm / (2.0 * mf)).sqrt() * draw(&mut rng), 0.0);
        planner.plan_fft_inverse(size).process(&mut spec);
        spec.iter().take(total).map(|v| v.re).collect::<Vec<f64>>()
    };
    Ok(SimulatedSeries {
        values: values[burn..].to_vec(),
        seed,
        model: model.clone(),
        burn,
    })
}

/// Fallback sampler: dense Cholesky of the order-`total` Toeplitz covariance.
fn toeplitz_cholesky_sample(
    gamma: &[f64],
    total: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
    lam_min: f64,
) -> Result<Vec<f64>> {
    let n = total;
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = gamma[i - j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::numerical(format!(
                        "covariance embedding failed: circulant eigenvalues reach {:.3e} and the \
                         Toeplitz Cholesky fallback hit a non-positive pivot at index {}",
                        lam_min, i
                    )));
                }
                l[i * n + j] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = 0.0;
        for k in 0..=i {
            s += l[i * n + k] * z[k];
        }
        x[i] = s;
    }
    Ok(x)
}
