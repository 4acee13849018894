//! Missing-data handling: gap injection, observed-sample statistics, and the
//! mean, linear, and truncated-normal random imputation schemes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::stats::{mean, normal_cdf, normal_ppf, sd};

/// A series with an observation mask. The first and last points are always
/// observed and every observed value is finite; unobserved slots hold NaN.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GappySeries {
    values: Vec<f64>,
    observed: Vec<bool>,
}

impl GappySeries {
    pub fn new(mut values: Vec<f64>, observed: Vec<bool>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("series must be non-empty"));
        }
        if values.len() != observed.len() {
            return Err(Error::domain("values and observation mask differ in length"));
        }
        if !observed[0] || !observed[observed.len() - 1] {
            return Err(Error::domain("first and last points must be observed"));
        }
        for i in 0..values.len() {
            if observed[i] {
                if !values[i].is_finite() {
                    return Err(Error::domain(format!("observed value at index {} is not finite", i)));
                }
            } else {
                values[i] = f64::NAN;
            }
        }
        Ok(GappySeries { values, observed })
    }

    /// A fully observed series.
    pub fn complete(values: Vec<f64>) -> Result<Self> {
        let observed = vec![true; values.len()];
        GappySeries::new(values, observed)
    }

    /// Build from optional values, `None` marking a gap.
    pub fn from_options(values: &[Option<f64>]) -> Result<Self> {
        let observed: Vec<bool> = values.iter().map(|v| v.is_some()).collect();
        let vals: Vec<f64> = values.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        GappySeries::new(vals, observed)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    pub fn n_observed(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    pub fn n_missing(&self) -> usize {
        self.len() - self.n_observed()
    }

    pub fn is_complete(&self) -> bool {
        self.n_missing() == 0
    }

    pub fn observed_values(&self) -> Vec<f64> {
        (0..self.len()).filter(|&i| self.observed[i]).map(|i| self.values[i]).collect()
    }
}

/// Missing-completely-at-random gap specification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissingSpec {
    /// Fraction of points to remove, in [0, 0.7].
    pub proportion: f64,
    pub seed: u64,
}

/// Remove `round(proportion * n)` interior points chosen uniformly at random
/// without replacement. Endpoints are never removed. For a fixed `(n, seed)`
/// the removal order is a fixed permutation of the interior indices, so masks
/// at increasing proportions are nested and independent of the values.
pub fn inject_missing(series: &[f64], spec: &MissingSpec) -> Result<GappySeries> {
    let n = series.len();
    if n < 3 {
        return Err(Error::domain("gap injection needs a series of length >= 3"));
    }
    if !(0.0..=0.7).contains(&spec.proportion) || !spec.proportion.is_finite() {
        return Err(Error::domain(format!(
            "missing proportion {} outside [0, 0.7]",
            spec.proportion
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("input series must be fully observed and finite"));
    }
    let k = (spec.proportion * n as f64 + 0.5).floor() as usize;
    if k > n - 2 {
        return Err(Error::domain(format!(
            "cannot remove {} of {} points while keeping both endpoints",
            k, n
        )));
    }
    let mut interior: Vec<usize> = (1..n - 1).collect();
    let mut rng = rng_from_seed(spec.seed);
    for i in (1..interior.len()).rev() {
        let j = rng.gen_range(0..=i);
        interior.swap(i, j);
    }
    let mut observed = vec![true; n];
    for &idx in interior.iter().take(k) {
        observed[idx] = false;
    }
    GappySeries::new(series.to_vec(), observed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservedStats {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub n_observed: usize,
}

/// Mean, standard deviation (denominator n-1), minimum, and maximum of the
/// observed values.
pub fn observed_stats(series: &GappySeries) -> Result<ObservedStats> {
    let obs = series.observed_values();
    if obs.len() < 2 {
        return Err(Error::domain("observed statistics need at least 2 observed points"));
    }
    let (lo, hi) = crate::stats::min_max(&obs);
    Ok(ObservedStats {
        mean: mean(&obs),
        sd: sd(&obs),
        min: lo,
        max: hi,
        n_observed: obs.len(),
    })
}

/// Replace every gap with the observed mean.
pub fn impute_mean(series: &GappySeries) -> Result<Vec<f64>> {
    let stats = observed_stats(series)?;
    Ok(series
        .values()
        .iter()
        .zip(series.observed())
        .map(|(&v, &o)| if o { v } else { stats.mean })
        .collect())
}

/// Replace every gap by linear interpolation between its nearest observed
/// neighbours.
pub fn impute_linear(series: &GappySeries) -> Result<Vec<f64>> {
    let n = series.len();
    let values = series.values();
    let observed = series.observed();
    let mut out = values.to_vec();
    let mut left = 0usize;
    let mut t = 1;
    while t < n {
        if observed[t] {
            if t > left + 1 {
                let span = (t - left) as f64;
                for s in left + 1..t {
                    let w = (s - left) as f64 / span;
                    out[s] = values[left] * (1.0 - w) + values[t] * w;
                }
            }
            left = t;
        }
        t += 1;
    }
    Ok(out)
}

/// Truncated normal parameters: location `mu`, scale `sigma`, support (a, b).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncNormalParams {
    pub mu: f64,
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
}

impl TruncNormalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::domain(format!("truncated normal scale {} must be positive", self.sigma)));
        }
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::domain("truncated normal support must satisfy a < b with finite bounds"));
        }
        if !self.mu.is_finite() {
            return Err(Error::domain("truncated normal location must be finite"));
        }
        Ok(())
    }
}

/// Density of the truncated normal.
pub fn trunc_normal_pdf(params: &TruncNormalParams, x: f64) -> f64 {
    if x < params.a || x > params.b {
        return 0.0;
    }
    let alpha = (params.a - params.mu) / params.sigma;
    let beta = (params.b - params.mu) / params.sigma;
    let z = normal_cdf(beta) - normal_cdf(alpha);
    let t = (x - params.mu) / params.sigma;
    crate::stats::normal_pdf(t) / (params.sigma * z)
}

/// One draw from the truncated normal by inverse-CDF sampling.
///
/// When the probability mass on (a, b) underflows (location far outside the
/// support relative to the scale), the draw degenerates to the location
/// clamped into the support and the flag is set.
pub struct TnDraw {
    pub value: f64,
    pub degenerate: bool,
}

pub fn sample_trunc_normal<R: Rng>(params: &TruncNormalParams, rng: &mut R) -> Result<TnDraw> {
    params.validate()?;
    let alpha = (params.a - params.mu) / params.sigma;
    let beta = (params.b - params.mu) / params.sigma;
    let plo = normal_cdf(alpha);
    let phi = normal_cdf(beta);
    let mass = phi - plo;
    if !(mass > 1e-300) {
        return Ok(TnDraw {
            value: params.mu.clamp(params.a, params.b),
            degenerate: true,
        });
    }
    let mut u: f64 = rng.gen();
    while u <= 0.0 {
        u = rng.gen();
    }
    let p = plo + u * mass;
    let mut x = params.mu + params.sigma * normal_ppf(p);
    if !(x > params.a) {
        x = params.a + (params.b - params.a) * 1e-12;
    }
    if !(x < params.b) {
        x = params.b - (params.b - params.a) * 1e-12;
    }
    Ok(TnDraw { value: x, degenerate: false })
}

/// Random imputation: fill gaps left to right with truncated normal draws
/// centred on the previous (possibly just imputed) value, with scale
/// `S / varsigma` where `S` is the observed standard deviation, truncated to
/// the observed range.
pub fn impute_random_tn(series: &GappySeries, varsigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(varsigma > 0.0) || !varsigma.is_finite() {
        return Err(Error::domain(format!("varsigma = {} must be positive", varsigma)));
    }
    let stats = observed_stats(series)?;
    let sigma = stats.sd / varsigma;
    let n = series.len();
    let observed = series.observed();
    let mut out = series.values().to_vec();
    let mut rng = rng_from_seed(seed);
    for t in 0..n {
        if observed[t] {
            continue;
        }
        let mu = out[t - 1];
        if sigma > 0.0 && stats.min < stats.max {
            let params = TruncNormalParams { mu, sigma, a: stats.min, b: stats.max };
            out[t] = sample_trunc_normal(&params, &mut rng)?.value;
        } else {
            out[t] = mu.clamp(stats.min, stats.max);
        }
    }
    Ok(out)
}
