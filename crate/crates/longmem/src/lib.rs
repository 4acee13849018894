//! Long-range dependence estimation for time series with missing data.
//!
//! The crate covers the full pipeline: exact simulation of Gaussian ARFIMA
//! processes, missing-value injection and imputation, classical memory
//! estimators (log-periodogram, local Whittle, exact local Whittle, R/S,
//! DFA), a copula-based estimator that works directly on gappy series, and
//! a deterministic Monte Carlo harness that ties them together.

pub mod arfima;
pub mod copula;
pub mod error;
pub mod gaps;
pub mod harness;
pub mod result;
pub mod rng;
pub mod scaling;
pub mod seriesio;
pub mod spectral;
pub mod stats;

pub use arfima::{arfima_acvf, fracdiff_coeffs, pi_coeffs, simulate_gaussian, AcvfTable, ArfimaModel, SimulatedSeries};
pub use error::{Error, Result};
pub use gaps::{
    impute_linear, impute_mean, impute_random_tn, inject_missing, observed_stats, sample_trunc_normal, GappySeries,
    MissingSpec, ObservedStats, TruncNormalParams,
};
pub use result::EstimateResult;
