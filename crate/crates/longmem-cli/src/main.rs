//! Command line front end: simulate series, inject and fill gaps, run the
//! estimators on CSV files, and drive the Monte Carlo, tuning, and timing
//! reports from JSON configs.
//!
//! Exit codes: 0 on success, 2 on configuration, domain, or estimation
//! errors (clap usage errors included), 3 on I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use longmem::arfima::{simulate_gaussian, ArfimaModel};
use longmem::copula::{estimate_d_copula, CopulaConfig, CopulaFamily};
use longmem::error::{Error, Result};
use longmem::gaps::{impute_linear, impute_mean, impute_random_tn, inject_missing, GappySeries, MissingSpec};
use longmem::harness::{
    run_mc_threads, run_sigma_tuning, run_timing, write_mc_csv, write_mc_json, write_sigma_csv,
    write_timing_csv, ExperimentConfig, SigmaTuningConfig, TimingConfig,
};
use longmem::result::EstimateResult;
use longmem::scaling::{dfa_estimate, rs_estimate, DfaConfig, RsConfig};
use longmem::seriesio::{read_series_file, write_series_file};
use longmem::spectral::{elw, gph, local_whittle};

#[derive(Parser)]
#[command(name = "longmem", version, about = "Long-range dependence estimation for gappy time series")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a Gaussian ARFIMA series to a CSV file
    Simulate(SimulateArgs),
    /// Mark a share of interior points missing, uniformly at random
    Inject(InjectArgs),
    /// Fill the gaps of a series
    Impute(ImputeArgs),
    /// Estimate the memory parameter of a series; prints JSON
    Estimate(EstimateArgs),
    /// Run a Monte Carlo experiment from a JSON config
    Mc(McArgs),
    /// Measure truncated-normal imputation dispersion over a (d, p, varsigma) grid
    TuneSigma(TuneSigmaArgs),
    /// Time estimator calls on pre-generated series
    Bench(BenchArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Fractional order d in (-1, 0.5)
    #[arg(long, allow_hyphen_values = true)]
    d: f64,
    /// AR coefficients, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phi: Vec<f64>,
    /// MA coefficients, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Vec<f64>,
    /// Innovation variance
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Series length kept after burn-in
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Initial points discarded
    #[arg(long, default_value_t = 1000)]
    burn: usize,
    #[arg(long)]
    seed: u64,
    out: PathBuf,
}

#[derive(Args)]
struct InjectArgs {
    /// Missing proportion in [0, 0.7]
    #[arg(long)]
    prop: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    input: PathBuf,
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ImputeMethod {
    Mean,
    Linear,
    Random,
}

#[derive(Args)]
struct ImputeArgs {
    #[arg(long, value_enum)]
    method: ImputeMethod,
    /// Scale divisor for the random method's draw SD
    #[arg(long, default_value_t = 10.0)]
    varsigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    input: PathBuf,
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimateMethod {
    Gph,
    Lw,
    Elw,
    Rs,
    Dfa,
    Copula,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Gaussian,
    Frank,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    method: EstimateMethod,
    /// Spectral bandwidth, or the last lag for the copula method
    #[arg(long)]
    m: Option<usize>,
    /// First lag for the copula method
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Copula family
    #[arg(long, value_enum, default_value_t = FamilyArg::Gaussian)]
    family: FamilyArg,
    /// R/S window sizes, comma separated
    #[arg(long, value_delimiter = ',')]
    rs_windows: Vec<usize>,
    /// R/S window stride (defaults to non-overlapping)
    #[arg(long)]
    rs_stride: Option<usize>,
    /// DFA box range as MIN:MAX
    #[arg(long, value_parser = parse_range)]
    dfa_range: Option<(usize, usize)>,
    /// DFA detrending degree
    #[arg(long, default_value_t = 0)]
    dfa_degree: usize,
    input: PathBuf,
}

#[derive(Args)]
struct McArgs {
    /// Experiment description, JSON
    #[arg(long)]
    config: PathBuf,
    /// CSV report path
    #[arg(long)]
    out: PathBuf,
    /// Also write the report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    /// Include per-replication estimates in the JSON report
    #[arg(long)]
    full: bool,
    /// Worker threads (default: LONGMEM_THREADS or all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct TuneSigmaArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV report path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected MIN:MAX, got '{}'", s))?;
    let lo: usize = a.trim().parse().map_err(|_| format!("bad range start '{}'", a))?;
    let hi: usize = b.trim().parse().map_err(|_| format!("bad range end '{}'", b))?;
    if lo >= hi {
        return Err(format!("range start {} must be below end {}", lo, hi));
    }
    Ok((lo, hi))
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::parse(format!("{}: {}", path.display(), e)))
}

fn complete_values(path: &Path) -> Result<Vec<f64>> {
    let series = read_series_file(path)?;
    if !series.is_complete() {
        return Err(Error::domain(format!(
            "{} has missing values; impute first or use the copula method",
            path.display()
        )));
    }
    Ok(series.values().to_vec())
}

fn run_estimate(args: &EstimateArgs) -> Result<EstimateResult> {
    match args.method {
        EstimateMethod::Gph => gph(&complete_values(&args.input)?, args.m),
        EstimateMethod::Lw => local_whittle(&complete_values(&args.input)?, args.m),
        EstimateMethod::Elw => elw(&complete_values(&args.input)?, args.m),
        EstimateMethod::Rs => {
            let mut cfg = RsConfig::default();
            if !args.rs_windows.is_empty() {
                cfg.window_sizes = args.rs_windows.clone();
            }
            cfg.stride = args.rs_stride;
            rs_estimate(&complete_values(&args.input)?, &cfg)
        }
        EstimateMethod::Dfa => {
            let mut cfg = DfaConfig::default();
            cfg.degree = args.dfa_degree;
            if let Some((lo, hi)) = args.dfa_range {
                cfg.box_sizes = (lo..=hi).collect();
                cfg.fit_min = lo;
                cfg.fit_max = hi;
            }
            dfa_estimate(&complete_values(&args.input)?, &cfg)
        }
        EstimateMethod::Copula => {
            let series = read_series_file(&args.input)?;
            let mut cfg = CopulaConfig::new(match args.family {
                FamilyArg::Gaussian => CopulaFamily::Gaussian,
                FamilyArg::Frank => CopulaFamily::Frank,
            });
            cfg.first_lag = args.s;
            if let Some(m) = args.m {
                cfg.last_lag = m;
            }
            estimate_d_copula(&series, &cfg)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Simulate(a) => {
            let model = ArfimaModel::new(a.d, a.phi.clone(), a.theta.clone(), a.sigma2)?;
            let sim = simulate_gaussian(&model, a.n, a.burn, a.seed)?;
            let series = GappySeries::complete(sim.values)?;
            write_series_file(&series, &a.out)
        }
        Cmd::Inject(a) => {
            let values = complete_values(&a.input)?;
            let gappy = inject_missing(&values, &MissingSpec { proportion: a.prop, seed: a.seed })?;
            write_series_file(&gappy, &a.out)
        }
        Cmd::Impute(a) => {
            let series = read_series_file(&a.input)?;
            let filled = match a.method {
                ImputeMethod::Mean => impute_mean(&series)?,
                ImputeMethod::Linear => impute_linear(&series)?,
                ImputeMethod::Random => impute_random_tn(&series, a.varsigma, a.seed)?,
            };
            write_series_file(&GappySeries::complete(filled)?, &a.out)
        }
        Cmd::Estimate(a) => {
            let res = run_estimate(&a)?;
            let json = serde_json::to_string_pretty(&res)
                .map_err(|e| Error::parse(e.to_string()))?;
            use std::io::Write;
            writeln!(std::io::stdout().lock(), "{}", json)?;
            Ok(())
        }
        Cmd::Mc(a) => {
            let cfg: ExperimentConfig = read_config(&a.config)?;
            let report = run_mc_threads(&cfg, a.threads)?;
            let mut out = std::io::BufWriter::new(std::fs::File::create(&a.out)?);
            write_mc_csv(&report, &mut out)?;
            if let Some(json_path) = a.json {
                let mut jw = std::io::BufWriter::new(std::fs::File::create(&json_path)?);
                write_mc_json(&report, &mut jw, a.full)?;
            }
            Ok(())
        }
        Cmd::TuneSigma(a) => {
            let cfg: SigmaTuningConfig = read_config(&a.config)?;
            let report = run_sigma_tuning(&cfg)?;
            let mut out = std::io::BufWriter::new(std::fs::File::create(&a.out)?);
            write_sigma_csv(&report, &mut out)
        }
        Cmd::Bench(a) => {
            let cfg: TimingConfig = read_config(&a.config)?;
            let report = run_timing(&cfg)?;
            match a.out {
                Some(path) => {
                    let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
                    write_timing_csv(&report, &mut out)
                }
                None => write_timing_csv(&report, &mut std::io::stdout().lock()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::Io(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
