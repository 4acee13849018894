//! Deterministic Monte Carlo harness: factorial experiments over models,
//! missing proportions, imputation schemes, and estimators, plus the scale
//! tuning study and the timing bench. Reports are reproducible byte for
//! byte at any thread count.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arfima::{simulate_gaussian, ArfimaModel};
use crate::copula::{estimate_d_copula, CopulaConfig, CopulaFamily};
use crate::error::{Error, Result};
use crate::gaps::{impute_linear, impute_mean, impute_random_tn, inject_missing, observed_stats, GappySeries, MissingSpec};
use crate::result::EstimateResult;
use crate::rng::derive_seed;
use crate::scaling::{dfa_estimate, rs_estimate, DfaConfig, RsConfig};
use crate::spectral::{elw, gph, local_whittle};
use crate::stats::{mean, sd};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable consulted for the worker thread count when no
/// explicit count is given.
pub const THREADS_ENV: &str = "LONGMEM_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Imputation {
    /// No imputation: estimators see the gappy series as-is.
    None,
    Mean,
    Linear,
    Random,
}

impl Imputation {
    /// Report block label; the no-imputation block is called "native".
    pub fn block_label(&self) -> &'static str {
        match self {
            Imputation::None => "native",
            Imputation::Mean => "mean",
            Imputation::Linear => "linear",
            Imputation::Random => "random",
        }
    }

    const CANONICAL: [Imputation; 4] =
        [Imputation::None, Imputation::Mean, Imputation::Linear, Imputation::Random];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimatorKind {
    #[serde(rename = "gph")]
    Gph,
    #[serde(rename = "lw")]
    Lw,
    #[serde(rename = "elw")]
    Elw,
    #[serde(rename = "rs")]
    Rs,
    #[serde(rename = "dfa")]
    Dfa,
    #[serde(rename = "copula-gaussian")]
    CopulaGaussian,
    #[serde(rename = "copula-frank")]
    CopulaFrank,
}

impl EstimatorKind {
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorKind::Gph => "gph",
            EstimatorKind::Lw => "lw",
            EstimatorKind::Elw => "elw",
            EstimatorKind::Rs => "rs",
            EstimatorKind::Dfa => "dfa",
            EstimatorKind::CopulaGaussian => "copula-gaussian",
            EstimatorKind::CopulaFrank => "copula-frank",
        }
    }

    /// Copula estimators handle gaps natively; all others need complete data.
    pub fn handles_gaps(&self) -> bool {
        matches!(self, EstimatorKind::CopulaGaussian | EstimatorKind::CopulaFrank)
    }

    pub const ALL: [EstimatorKind; 7] = [
        EstimatorKind::Gph,
        EstimatorKind::Lw,
        EstimatorKind::Elw,
        EstimatorKind::Rs,
        EstimatorKind::Dfa,
        EstimatorKind::CopulaGaussian,
        EstimatorKind::CopulaFrank,
    ];
}

/// Run one estimator on a (possibly gappy) series with default settings.
/// `bandwidth` overrides the spectral bandwidth when given.
pub fn run_estimator(
    kind: EstimatorKind,
    series: &GappySeries,
    bandwidth: Option<usize>,
) -> Result<EstimateResult> {
    if !kind.handles_gaps() && !series.is_complete() {
        return Err(Error::domain(format!(
            "estimator {} requires a complete series; impute first",
            kind.label()
        )));
    }
    match kind {
        EstimatorKind::Gph => gph(series.values(), bandwidth),
        EstimatorKind::Lw => local_whittle(series.values(), bandwidth),
        EstimatorKind::Elw => elw(series.values(), bandwidth),
        EstimatorKind::Rs => rs_estimate(series.values(), &RsConfig::default()),
        EstimatorKind::Dfa => dfa_estimate(series.values(), &DfaConfig::default()),
        EstimatorKind::CopulaGaussian => {
            estimate_d_copula(series, &CopulaConfig::new(CopulaFamily::Gaussian))
        }
        EstimatorKind::CopulaFrank => {
            estimate_d_copula(series, &CopulaConfig::new(CopulaFamily::Frank))
        }
    }
}

fn default_n() -> usize {
    1000
}
fn default_burn() -> usize {
    1000
}
fn default_props() -> Vec<f64> {
    (0..=7).map(|k| k as f64 / 10.0).collect()
}
fn default_imputations() -> Vec<Imputation> {
    Imputation::CANONICAL.to_vec()
}
fn default_estimators() -> Vec<EstimatorKind> {
    EstimatorKind::ALL.to_vec()
}
fn default_varsigma() -> f64 {
    10.0
}
fn default_reps() -> usize {
    200
}

/// Factorial Monte Carlo experiment description. `n` is the analyzed length
/// retained after discarding `burn` initial points of each simulated path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub models: Vec<ArfimaModel>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_burn")]
    pub burn: usize,
    #[serde(default = "default_props")]
    pub missing_props: Vec<f64>,
    #[serde(default = "default_imputations")]
    pub imputations: Vec<Imputation>,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorKind>,
    #[serde(default = "default_varsigma")]
    pub varsigma: f64,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub bandwidth: Option<usize>,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn new(models: Vec<ArfimaModel>, master_seed: u64) -> Self {
        ExperimentConfig {
            models,
            n: default_n(),
            burn: default_burn(),
            missing_props: default_props(),
            imputations: default_imputations(),
            estimators: default_estimators(),
            varsigma: default_varsigma(),
            reps: default_reps(),
            bandwidth: None,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::config("experiment needs at least one model"));
        }
        for m in &self.models {
            m.validate().map_err(|e| Error::config(format!("invalid model: {}", e)))?;
        }
        if self.n < 3 {
            return Err(Error::config("analyzed length n must be at least 3"));
        }
        if self.missing_props.is_empty() || self.imputations.is_empty() || self.estimators.is_empty() {
            return Err(Error::config("proportions, imputations, and estimators must be non-empty"));
        }
        for &p in &self.missing_props {
            if !(0.0..=0.7).contains(&p) || !p.is_finite() {
                return Err(Error::config(format!("missing proportion {} outside [0, 0.7]", p)));
            }
        }
        if !(self.varsigma > 0.0) || !self.varsigma.is_finite() {
            return Err(Error::config(format!("varsigma = {} must be positive", self.varsigma)));
        }
        let mut seen_props = self.missing_props.clone();
        seen_props.sort_unstable_by(f64::total_cmp);
        seen_props.dedup();
        if seen_props.len() != self.missing_props.len() {
            return Err(Error::config("duplicate missing proportions"));
        }
        if self.grid_rows().is_empty() {
            return Err(Error::config(
                "the native (no-imputation) arm supports complete-data estimators only at \
                 missing proportion 0, which leaves this grid empty; drop the estimator, \
                 the arm, or the positive proportions",
            ));
        }
        Ok(())
    }

    fn canonical_imputations(&self) -> Vec<Imputation> {
        Imputation::CANONICAL
            .iter()
            .copied()
            .filter(|i| self.imputations.contains(i))
            .collect()
    }

    /// The feasible (block, estimator) rows of the report. A native row with
    /// a complete-data estimator exists only when no positive missing
    /// proportion is declared; imputation rows carry every estimator.
    fn grid_rows(&self) -> Vec<(Imputation, EstimatorKind)> {
        let has_positive_prop = self.missing_props.iter().any(|&p| p > 0.0);
        let mut rows = Vec::new();
        for &imputation in &self.canonical_imputations() {
            for &estimator in &self.estimators {
                if imputation == Imputation::None && !estimator.handles_gaps() && has_positive_prop
                {
                    continue;
                }
                rows.push((imputation, estimator));
            }
        }
        rows
    }
}

/// One aggregated cell of the experiment grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McCell {
    pub model: String,
    pub model_idx: usize,
    pub block: String,
    pub estimator: String,
    pub proportion: f64,
    /// Mean estimate over successful replications; None when all failed.
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub failures: usize,
    /// Successful replications whose optimum was pinned at the search
    /// boundary. They are included in the mean and tallied here.
    pub boundary: usize,
    pub reps_used: usize,
    pub wall_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub estimates: Option<Vec<Option<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub n: usize,
    pub burn: usize,
    pub reps: usize,
    pub proportions: Vec<f64>,
    pub cells: Vec<McCell>,
    pub wall_seconds_total: f64,
}

#[derive(Clone, Copy)]
struct CellSpec {
    model_idx: usize,
    imputation: Imputation,
    estimator: EstimatorKind,
    prop_idx: usize,
}

fn model_label(m: &ArfimaModel) -> String {
    format!("arfima({},{},{})", m.p, m.d, m.q)
}

fn config_hash(cfg: &ExperimentConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{:02x}", b)).collect()
}

fn resolve_threads(threads: Option<usize>) -> usize {
    if let Some(t) = threads {
        return t.max(1);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(t) = v.trim().parse::<usize>() {
            return t.max(1);
        }
    }
    std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1)
}

/// Run the experiment with threads resolved from the environment.
pub fn run_mc(cfg: &ExperimentConfig) -> Result<McReport> {
    run_mc_threads(cfg, None)
}

/// Run the experiment on an explicit number of worker threads. Results are
/// byte-identical for any thread count.
pub fn run_mc_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<McReport> {
    run_mc_with_hook(cfg, threads, None)
}

type FailureHook<'a> = &'a (dyn Fn(usize, usize) -> bool + Sync);

/// Test entry point: `hook(rep, cell_idx)` returning true forces that cell
/// to fail in that replication.
#[doc(hidden)]
pub fn run_mc_with_hook(
    cfg: &ExperimentConfig,
    threads: Option<usize>,
    hook: Option<FailureHook<'_>>,
) -> Result<McReport> {
    cfg.validate()?;
    let start = Instant::now();
    let hash = config_hash(cfg);
    let rows = cfg.grid_rows();
    let mut cells: Vec<CellSpec> = Vec::new();
    if cfg.reps > 0 {
        for model_idx in 0..cfg.models.len() {
            for &(imputation, estimator) in &rows {
                for prop_idx in 0..cfg.missing_props.len() {
                    cells.push(CellSpec { model_idx, imputation, estimator, prop_idx });
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_threads(threads))
        .build()
        .map_err(|e| Error::config(format!("cannot build thread pool: {}", e)))?;
    let per_rep: Vec<Vec<(Option<(f64, bool)>, f64)>> = pool.install(|| {
        (0..cfg.reps)
            .into_par_iter()
            .map(|rep| run_one_rep(cfg, &cells, rep, hook))
            .collect()
    });
    let mut out_cells = Vec::with_capacity(cells.len());
    for (ci, spec) in cells.iter().enumerate() {
        let mut estimates: Vec<Option<f64>> = Vec::with_capacity(cfg.reps);
        let mut boundary = 0usize;
        let mut wall = 0.0f64;
        for rep_row in &per_rep {
            let (outcome, secs) = rep_row[ci];
            wall += secs;
            match outcome {
                Some((d, at_boundary)) => {
                    estimates.push(Some(d));
                    if at_boundary {
                        boundary += 1;
                    }
                }
                None => estimates.push(None),
            }
        }
        let ok: Vec<f64> = estimates.iter().flatten().copied().collect();
        let failures = cfg.reps - ok.len();
        let cell_mean = if ok.is_empty() { None } else { Some(mean(&ok)) };
        let cell_sd = if ok.len() < 2 { None } else { Some(sd(&ok)) };
        out_cells.push(McCell {
            model: model_label(&cfg.models[spec.model_idx]),
            model_idx: spec.model_idx,
            block: spec.imputation.block_label().to_string(),
            estimator: spec.estimator.label().to_string(),
            proportion: cfg.missing_props[spec.prop_idx],
            mean: cell_mean,
            sd: cell_sd,
            failures,
            boundary,
            reps_used: ok.len(),
            wall_seconds: wall,
            estimates: Some(estimates),
        });
    }
    Ok(McReport {
        version: VERSION.to_string(),
        config_hash: hash,
        master_seed: cfg.master_seed,
        n: cfg.n,
        burn: cfg.burn,
        reps: cfg.reps,
        proportions: cfg.missing_props.clone(),
        cells: out_cells,
        wall_seconds_total: start.elapsed().as_secs_f64(),
    })
}

/// Seed for the gap mask of replication `rep` at series length `n`. Shared
/// across models and proportions so masks are common to every scenario of a
/// replication and nested across proportions.
#[doc(hidden)]
pub fn mask_seed(master: u64, n: usize, rep: usize) -> u64 {
    derive_seed(master, "mask", &[n as u64, rep as u64])
}

#[doc(hidden)]
pub fn sim_seed(master: u64, model_idx: usize, rep: usize) -> u64 {
    derive_seed(master, "sim", &[model_idx as u64, rep as u64])
}

#[doc(hidden)]
pub fn tn_seed(master: u64, model_idx: usize, prop: f64, rep: usize) -> u64 {
    let prop_key = (prop * 1000.0).round() as u64;
    derive_seed(master, "tn", &[model_idx as u64, prop_key, rep as u64])
}

fn run_one_rep(
    cfg: &ExperimentConfig,
    cells: &[CellSpec],
    rep: usize,
    hook: Option<FailureHook<'_>>,
) -> Vec<(Option<(f64, bool)>, f64)> {
    let mut sims: Vec<Option<Vec<f64>>> = vec![None; cfg.models.len()];
    let mut masked: HashMap<(usize, usize), Option<GappySeries>> = HashMap::new();
    let mut prepared: HashMap<(usize, usize, Imputation), Option<GappySeries>> = HashMap::new();
    let mut out = Vec::with_capacity(cells.len());
    for (ci, spec) in cells.iter().enumerate() {
        let t0 = Instant::now();
        if let Some(h) = hook {
            if h(rep, ci) {
                out.push((None, t0.elapsed().as_secs_f64()));
                continue;
            }
        }
        let outcome = run_one_cell(cfg, spec, rep, &mut sims, &mut masked, &mut prepared);
        out.push((outcome, t0.elapsed().as_secs_f64()));
    }
    out
}

fn run_one_cell(
    cfg: &ExperimentConfig,
    spec: &CellSpec,
    rep: usize,
    sims: &mut [Option<Vec<f64>>],
    masked: &mut HashMap<(usize, usize), Option<GappySeries>>,
    prepared: &mut HashMap<(usize, usize, Imputation), Option<GappySeries>>,
) -> Option<(f64, bool)> {
    let model_idx = spec.model_idx;
    if sims[model_idx].is_none() {
        let seed = sim_seed(cfg.master_seed, model_idx, rep);
        let sim = simulate_gaussian(&cfg.models[model_idx], cfg.n, cfg.burn, seed).ok()?;
        sims[model_idx] = Some(sim.values);
    }
    let values = sims[model_idx].as_ref()?.clone();
    let mask_key = (model_idx, spec.prop_idx);
    let gappy = masked
        .entry(mask_key)
        .or_insert_with(|| {
            let spec_m = MissingSpec {
                proportion: cfg.missing_props[spec.prop_idx],
                seed: mask_seed(cfg.master_seed, cfg.n, rep),
            };
            inject_missing(&values, &spec_m).ok()
        })
        .clone()?;
    let prep_key = (model_idx, spec.prop_idx, spec.imputation);
    let input = prepared
        .entry(prep_key)
        .or_insert_with(|| prepare_input(cfg, spec, rep, &gappy))
        .clone()?;
    let res = run_estimator(spec.estimator, &input, cfg.bandwidth).ok()?;
    Some((res.d_hat, !res.converged))
}

fn prepare_input(
    cfg: &ExperimentConfig,
    spec: &CellSpec,
    rep: usize,
    gappy: &GappySeries,
) -> Option<GappySeries> {
    match spec.imputation {
        Imputation::None => Some(gappy.clone()),
        Imputation::Mean => GappySeries::complete(impute_mean(gappy).ok()?).ok(),
        Imputation::Linear => GappySeries::complete(impute_linear(gappy).ok()?).ok(),
        Imputation::Random => {
            let seed = tn_seed(cfg.master_seed, spec.model_idx, cfg.missing_props[spec.prop_idx], rep);
            GappySeries::complete(impute_random_tn(gappy, cfg.varsigma, seed).ok()?).ok()
        }
    }
}

fn fmt_stat(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.6}", x),
        None => "NA".to_string(),
    }
}

/// Quote a CSV field per RFC 4180 when it contains a delimiter.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Write the aggregate report as CSV. The layout is one row per
/// (model, block, estimator, metric) with one column per missing proportion;
/// metrics are mean, sd, failures, boundary, and reps. Output contains no
/// timing information and is byte-identical across runs and thread counts.
pub fn write_mc_csv<W: Write>(report: &McReport, w: &mut W) -> Result<()> {
    writeln!(w, "# longmem monte carlo report")?;
    writeln!(w, "# version={}", report.version)?;
    writeln!(w, "# config_hash={}", report.config_hash)?;
    writeln!(w, "# master_seed={}", report.master_seed)?;
    writeln!(w, "# n={} burn={} reps={}", report.n, report.burn, report.reps)?;
    let mut header = String::from("model,block,estimator,metric");
    for p in &report.proportions {
        header.push_str(&format!(",p={}", p));
    }
    writeln!(w, "{}", header)?;
    let np = report.proportions.len();
    if np == 0 {
        return Ok(());
    }
    for group in report.cells.chunks(np) {
        if group.len() < np {
            return Err(Error::numerical("report cells are not a full proportion grid"));
        }
        let first = &group[0];
        let prefix = format!("{},{},{}", csv_field(&first.model), first.block, first.estimator);
        let mut row_mean = format!("{},mean", prefix);
        let mut row_sd = format!("{},sd", prefix);
        let mut row_fail = format!("{},failures", prefix);
        let mut row_bdry = format!("{},boundary", prefix);
        let mut row_reps = format!("{},reps", prefix);
        for cell in group {
            row_mean.push_str(&format!(",{}", fmt_stat(cell.mean)));
            row_sd.push_str(&format!(",{}", fmt_stat(cell.sd)));
            row_fail.push_str(&format!(",{}", cell.failures));
            row_bdry.push_str(&format!(",{}", cell.boundary));
            row_reps.push_str(&format!(",{}", cell.reps_used));
        }
        writeln!(w, "{}", row_mean)?;
        writeln!(w, "{}", row_sd)?;
        writeln!(w, "{}", row_fail)?;
        writeln!(w, "{}", row_bdry)?;
        writeln!(w, "{}", row_reps)?;
    }
    Ok(())
}

/// Write the report as JSON. Per-replication estimate vectors are included
/// only when `full` is set. JSON output includes wall-clock totals and is
/// therefore not byte-stable; the CSV is the reproducibility artifact.
pub fn write_mc_json<W: Write>(report: &McReport, w: &mut W, full: bool) -> Result<()> {
    let mut clone = report.clone();
    if !full {
        for c in clone.cells.iter_mut() {
            c.estimates = None;
        }
    }
    serde_json::to_writer_pretty(&mut *w, &clone).map_err(|e| Error::parse(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

/// Scale-tuning study configuration: a grid over memory parameters, missing
/// proportions, and varsigma values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaTuningConfig {
    pub d_values: Vec<f64>,
    pub proportions: Vec<f64>,
    pub varsigmas: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_burn")]
    pub burn: usize,
    #[serde(default = "default_reps")]
    pub reps: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaCell {
    pub d: f64,
    pub proportion: f64,
    pub varsigma: f64,
    /// Mean sample SD of the complete simulated series.
    pub complete_sd_mean: f64,
    /// Mean sample SD of the observed (post-gap) values.
    pub observed_sd_mean: f64,
    /// Mean and SD over replications of the imputed series' sample SD.
    pub imputed_sd_mean: f64,
    pub imputed_sd_sd: f64,
    pub reps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaReport {
    pub version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub cells: Vec<SigmaCell>,
}

/// Measure how the truncated-normal imputation's variance responds to the
/// varsigma scale divisor. The same simulations, masks, and uniform draws
/// are reused across varsigma values so columns are directly comparable.
pub fn run_sigma_tuning(cfg: &SigmaTuningConfig) -> Result<SigmaReport> {
    if cfg.d_values.is_empty() || cfg.proportions.is_empty() || cfg.varsigmas.is_empty() {
        return Err(Error::config("sigma tuning needs non-empty d, proportion, and varsigma grids"));
    }
    if cfg.n < 3 {
        return Err(Error::config("analyzed length n must be at least 3"));
    }
    for &v in &cfg.varsigmas {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::config(format!("varsigma = {} must be positive", v)));
        }
    }
    let models: Vec<ArfimaModel> = cfg
        .d_values
        .iter()
        .map(|&d| ArfimaModel::fractional(d))
        .collect::<Result<_>>()
        .map_err(|e| Error::config(format!("invalid d grid: {}", e)))?;
    for &p in &cfg.proportions {
        if !(0.0..=0.7).contains(&p) {
            return Err(Error::config(format!("missing proportion {} outside [0, 0.7]", p)));
        }
    }
    let json = serde_json::to_string(cfg).expect("config serializes");
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    let hash: String = hasher.finalize().iter().map(|b| format!("{:02x}", b)).collect();

    struct RepRow {
        complete_sd: Vec<f64>,
        observed_sd: Vec<Vec<f64>>,
        imputed_sd: Vec<Vec<Vec<f64>>>,
    }
    let rows: Vec<Result<RepRow>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| -> Result<RepRow> {
            let mut complete_sd = Vec::with_capacity(models.len());
            let mut observed_sd = vec![Vec::with_capacity(cfg.proportions.len()); models.len()];
            let mut imputed_sd =
                vec![vec![Vec::with_capacity(cfg.varsigmas.len()); cfg.proportions.len()]; models.len()];
            for (di, model) in models.iter().enumerate() {
                let sim = simulate_gaussian(model, cfg.n, cfg.burn, sim_seed(cfg.master_seed, di, rep))?;
                complete_sd.push(sd(&sim.values));
                for (pi, &p) in cfg.proportions.iter().enumerate() {
                    let gappy = inject_missing(
                        &sim.values,
                        &MissingSpec { proportion: p, seed: mask_seed(cfg.master_seed, cfg.n, rep) },
                    )?;
                    observed_sd[di].push(observed_stats(&gappy)?.sd);
                    for &vs in &cfg.varsigmas {
                        let imputed =
                            impute_random_tn(&gappy, vs, tn_seed(cfg.master_seed, di, p, rep))?;
                        imputed_sd[di][pi].push(sd(&imputed));
                    }
                }
            }
            Ok(RepRow { complete_sd, observed_sd, imputed_sd })
        })
        .collect();
    let rows: Vec<RepRow> = rows.into_iter().collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for (di, &d) in cfg.d_values.iter().enumerate() {
        for (pi, &p) in cfg.proportions.iter().enumerate() {
            for (vi, &vs) in cfg.varsigmas.iter().enumerate() {
                let complete: Vec<f64> = rows.iter().map(|r| r.complete_sd[di]).collect();
                let observed: Vec<f64> = rows.iter().map(|r| r.observed_sd[di][pi]).collect();
                let imputed: Vec<f64> = rows.iter().map(|r| r.imputed_sd[di][pi][vi]).collect();
                cells.push(SigmaCell {
                    d,
                    proportion: p,
                    varsigma: vs,
                    complete_sd_mean: mean(&complete),
                    observed_sd_mean: mean(&observed),
                    imputed_sd_mean: mean(&imputed),
                    imputed_sd_sd: sd(&imputed),
                    reps: cfg.reps,
                });
            }
        }
    }
    Ok(SigmaReport { version: VERSION.to_string(), config_hash: hash, master_seed: cfg.master_seed, cells })
}

pub fn write_sigma_csv<W: Write>(report: &SigmaReport, w: &mut W) -> Result<()> {
    writeln!(w, "# longmem sigma tuning report")?;
    writeln!(w, "# version={}", report.version)?;
    writeln!(w, "# config_hash={}", report.config_hash)?;
    writeln!(w, "# master_seed={}", report.master_seed)?;
    writeln!(
        w,
        "d,proportion,varsigma,complete_sd_mean,observed_sd_mean,imputed_sd_mean,imputed_sd_sd,reps"
    )?;
    for c in &report.cells {
        writeln!(
            w,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{}",
            c.d, c.proportion, c.varsigma, c.complete_sd_mean, c.observed_sd_mean, c.imputed_sd_mean,
            c.imputed_sd_sd, c.reps
        )?;
    }
    Ok(())
}

fn default_warmup() -> usize {
    5
}
fn default_timing_reps() -> usize {
    20
}

/// Timing bench configuration. Estimators run serially on pre-generated
/// complete series; `warmup` untimed calls precede the timed replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    pub estimators: Vec<EstimatorKind>,
    pub model: ArfimaModel,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_burn")]
    pub burn: usize,
    #[serde(default = "default_timing_reps")]
    pub reps: usize,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub estimator: String,
    pub n: usize,
    pub reps: usize,
    pub total_seconds: f64,
    pub per_call_seconds: f64,
    pub min_seconds: f64,
    pub max_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub version: String,
    pub master_seed: u64,
    pub rows: Vec<TimingRow>,
}

/// Time `reps` calls of `f` after `warmup` untimed calls of `f(0)`, on a
/// monotonic clock. Returns (total, min, max) in seconds.
#[doc(hidden)]
pub fn time_calls<F: FnMut(usize) -> Result<()>>(
    reps: usize,
    warmup: usize,
    mut f: F,
) -> Result<(f64, f64, f64)> {
    if reps == 0 {
        return Err(Error::config("timing needs at least one replication"));
    }
    for _ in 0..warmup {
        f(0)?;
    }
    let mut total = 0.0f64;
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for rep in 0..reps {
        let t0 = Instant::now();
        f(rep)?;
        let dt = t0.elapsed().as_secs_f64();
        total += dt;
        min = min.min(dt);
        max = max.max(dt);
    }
    Ok((total, min, max))
}

/// Per-call timing of each estimator on complete simulated series. All
/// inputs are generated before any clock starts; calls run serially.
pub fn run_timing(cfg: &TimingConfig) -> Result<TimingReport> {
    if cfg.estimators.is_empty() {
        return Err(Error::config("timing needs at least one estimator"));
    }
    cfg.model.validate().map_err(|e| Error::config(format!("invalid model: {}", e)))?;
    let mut series = Vec::with_capacity(cfg.reps);
    for rep in 0..cfg.reps.max(1) {
        let sim = simulate_gaussian(&cfg.model, cfg.n, cfg.burn, sim_seed(cfg.master_seed, 0, rep))?;
        series.push(GappySeries::complete(sim.values)?);
    }
    let mut rows = Vec::with_capacity(cfg.estimators.len());
    for &est in &cfg.estimators {
        let (total, min, max) = time_calls(cfg.reps, cfg.warmup, |rep| {
            run_estimator(est, &series[rep], None).map(|_| ())
        })?;
        rows.push(TimingRow {
            estimator: est.label().to_string(),
            n: cfg.n,
            reps: cfg.reps,
            total_seconds: total,
            per_call_seconds: total / cfg.reps as f64,
            min_seconds: min,
            max_seconds: max,
        });
    }
    Ok(TimingReport { version: VERSION.to_string(), master_seed: cfg.master_seed, rows })
}

pub fn write_timing_csv<W: Write>(report: &TimingReport, w: &mut W) -> Result<()> {
    writeln!(w, "# longmem timing report")?;
    writeln!(w, "# version={}", report.version)?;
    writeln!(w, "# master_seed={}", report.master_seed)?;
    writeln!(w, "estimator,n,reps,total_seconds,per_call_seconds,min_seconds,max_seconds")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{:.6},{:.9},{:.9},{:.9}",
            r.estimator, r.n, r.reps, r.total_seconds, r.per_call_seconds, r.min_seconds, r.max_seconds
        )?;
    }
    Ok(())
}
