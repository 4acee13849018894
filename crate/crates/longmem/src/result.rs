//! Common result type returned by every memory-parameter estimator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Per-lag detail reported by the copula estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagDiagnostic {
    pub lag: usize,
    /// Spearman rank correlation at this lag.
    pub rho: f64,
    /// Copula parameter implied by `rho`.
    pub theta: f64,
    /// Number of complete pairs the lag statistic was computed from.
    pub pairs_used: usize,
}

/// Output of a memory-parameter estimator.
///
/// `m_used` is the estimator's resolution count: the spectral bandwidth for
/// periodogram methods, the number of pooled window statistics for R/S, the
/// number of box sizes in the fit for DFA, and the number of usable lags for
/// the copula estimator. When `converged` is false, `reason` says why and
/// `d_hat` is still reported (for example pinned at the search boundary).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub method: String,
    pub d_hat: f64,
    #[serde(rename = "m")]
    pub m_used: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub objective_at_opt: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub lags: Vec<LagDiagnostic>,
}

impl EstimateResult {
    pub fn new(method: &str, d_hat: f64, m_used: usize) -> Self {
        EstimateResult {
            method: method.to_string(),
            d_hat,
            m_used,
            converged: true,
            reason: None,
            objective_at_opt: None,
            diagnostics: BTreeMap::new(),
            lags: Vec::new(),
        }
    }

    pub fn boundary_estimate(mut self, at_boundary: bool) -> Self {
        if at_boundary {
            self.converged = false;
            self.reason = Some("optimum at search boundary".to_string());
        }
        self
    }
}
