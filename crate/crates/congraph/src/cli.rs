//! Command-line interface: graph selection on CSV data, Monte-Carlo FWER
//! experiments, and threshold inspection. Exit codes are stable: 0 success,
//! 2 invalid input or parse failure, 3 degenerate matrix, 4 numerical
//! failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dist::{
    beta_quantile, null_beta_params, partial_corr_null_quantile, std_normal_quantile,
    NullCorrDensityParams,
};
use crate::error::{Error, Result};
use crate::matrix::{
    sample_covariance_with_divisor, CovarianceDivisor, ObservationMatrix, SymMatrix,
};
use crate::selection::{
    individual_level, pair_count, select_graph_from_covariance, ProcedureConfig, ProcedureMethod,
};
use crate::simulation::{estimate_fwer, FwerExperiment, MvnModel};

#[derive(Parser)]
#[command(
    name = "congraph",
    version,
    about = "Concentration graph selection for Gaussian data",
    long_about = "Selects the concentration graph of a multivariate Gaussian sample with \
                  Bonferroni-type procedures built on exact conditional edge tests (delta2) \
                  or the asymptotic Fisher-z test (delta1), and estimates their family-wise \
                  error rate by simulation."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Fisher-z individual tests (standard)
    Delta1,
    /// Exact conditional individual tests (optimal)
    Delta2,
}

impl From<MethodArg> for ProcedureMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Delta1 => ProcedureMethod::Delta1Fisher,
            MethodArg::Delta2 => ProcedureMethod::Delta2Neyman,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DivisorArg {
    /// Divide covariances by n
    N,
    /// Divide covariances by n - 1
    #[value(name = "n-1")]
    NMinusOne,
}

#[derive(Subcommand)]
enum Command {
    /// Select a concentration graph from a CSV of observations
    ///
    /// Rows are observations and columns are variables; pass --transpose for
    /// the other layout. The first line may be a header.
    Select {
        /// Input CSV (rows = observations, columns = variables)
        #[arg(long)]
        input: PathBuf,
        /// Family-wise error level
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Selection procedure
        #[arg(long, value_enum, default_value = "delta2")]
        method: MethodArg,
        /// Output path for the edge list (one "i,j" line per edge, 1-based)
        #[arg(long, default_value = "edges.txt")]
        edges_out: PathBuf,
        /// Output path for the dense 0/1 adjacency CSV
        #[arg(long, default_value = "adjacency.csv")]
        matrix_out: PathBuf,
        /// Treat CSV rows as variables and columns as observations
        #[arg(long)]
        transpose: bool,
        /// Covariance divisor convention
        #[arg(long, value_enum, default_value = "n")]
        divisor: DivisorArg,
    },
    /// Estimate FWER curves over a grid of sample sizes by simulation
    Simulate {
        /// Number of variables (ignored if --lambda is given)
        #[arg(long, default_value_t = 10)]
        n_vars: usize,
        /// Sample-size grid: comma-separated items, each "n", "a:b", or
        /// "a:b:step" (inclusive)
        #[arg(long)]
        n_grid: String,
        /// Family-wise error level
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// Monte-Carlo replications per grid point
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        /// Procedures to run, comma-separated (delta1, delta2)
        #[arg(long, default_value = "delta1,delta2")]
        methods: String,
        /// Random seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path
        #[arg(long, default_value = "fwer.csv")]
        out: PathBuf,
        /// Worker threads (default: available parallelism); the output does
        /// not depend on this
        #[arg(long)]
        workers: Option<usize>,
        /// Optional CSV with a custom covariance matrix (default: identity)
        #[arg(long)]
        lambda: Option<PathBuf>,
        /// Count degenerate-covariance replications as family-wise errors
        /// instead of excluding them
        #[arg(long)]
        non_pd_as_error: bool,
    },
    /// Print individual-test thresholds for a given (N, n, alpha)
    Thresholds {
        /// Number of variables N
        #[arg(long)]
        n_vars: usize,
        /// Number of observations n (must exceed N)
        #[arg(long)]
        n_obs: usize,
        /// Individual significance level
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) | Error::Parse { .. } | Error::Io(_) => 2,
        Error::DegenerateMatrix(_) => 3,
        Error::Numerical(_) => 4,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Select {
            input,
            alpha,
            method,
            edges_out,
            matrix_out,
            transpose,
            divisor,
        } => cmd_select(
            &input,
            alpha,
            method.into(),
            &edges_out,
            &matrix_out,
            transpose,
            divisor,
        ),
        Command::Simulate {
            n_vars,
            n_grid,
            alpha,
            reps,
            methods,
            seed,
            out,
            workers,
            lambda,
            non_pd_as_error,
        } => cmd_simulate(
            n_vars,
            &n_grid,
            alpha,
            reps,
            &methods,
            seed,
            &out,
            workers,
            lambda.as_deref(),
            non_pd_as_error,
        ),
        Command::Thresholds {
            n_vars,
            n_obs,
            alpha,
        } => cmd_thresholds(n_vars, n_obs, alpha),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_select(
    input: &std::path::Path,
    alpha: f64,
    method: ProcedureMethod,
    edges_out: &std::path::Path,
    matrix_out: &std::path::Path,
    transpose: bool,
    divisor: DivisorArg,
) -> Result<()> {
    let mut data = ObservationMatrix::read_csv(input)?;
    if transpose {
        data = data.transpose()?;
    }
    let divisor = match divisor {
        DivisorArg::N => CovarianceDivisor::SampleSize,
        DivisorArg::NMinusOne => CovarianceDivisor::SampleSizeMinusOne,
    };
    let s = sample_covariance_with_divisor(&data, divisor)?;
    let config = ProcedureConfig::new(alpha, method)?;
    let graph = select_graph_from_covariance(&s, &config)?;

    std::fs::write(edges_out, graph.to_edge_list())?;
    std::fs::write(matrix_out, graph.to_dense_csv())?;

    let n_vars = data.n_vars();
    println!("variables (N): {n_vars}");
    println!("observations (n): {}", data.n_obs());
    println!("pairs (M): {}", pair_count(n_vars));
    println!("family level: {alpha}");
    println!("individual level: {}", individual_level(alpha, n_vars));
    println!("method: {}", method.label());
    println!("edges found: {}", graph.edge_count());
    println!("wrote edge list: {}", edges_out.display());
    println!("wrote adjacency matrix: {}", matrix_out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    n_vars: usize,
    grid_spec: &str,
    alpha: f64,
    reps: usize,
    methods_spec: &str,
    seed: u64,
    out: &std::path::Path,
    workers: Option<usize>,
    lambda: Option<&std::path::Path>,
    non_pd_as_error: bool,
) -> Result<()> {
    let model = match lambda {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let covariance = SymMatrix::parse_csv(&text)?;
            MvnModel::new(vec![0.0; covariance.dim()], covariance)?
        }
        None => MvnModel::standard(n_vars)?,
    };
    let grid = parse_grid(grid_spec)?;
    let methods = parse_methods(methods_spec)?;
    let experiment = FwerExperiment::new(model, grid, alpha, reps, seed, methods)?
        .with_non_pd_as_error(non_pd_as_error);

    let curve = match workers {
        Some(w) => {
            if w == 0 {
                return Err(Error::InvalidInput("--workers must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?;
            pool.install(|| estimate_fwer(&experiment))?
        }
        None => estimate_fwer(&experiment)?,
    };
    curve.write_csv(out)?;
    println!("wrote {} rows: {}", curve.rows().len(), out.display());
    for method in [ProcedureMethod::Delta1Fisher, ProcedureMethod::Delta2Neyman] {
        let rows: Vec<_> = curve.rows().iter().filter(|r| r.method == method).collect();
        if rows.is_empty() {
            continue;
        }
        let lo = rows.iter().map(|r| r.fwer).fold(f64::INFINITY, f64::min);
        let hi = rows
            .iter()
            .map(|r| r.fwer)
            .fold(f64::NEG_INFINITY, f64::max);
        let failures: usize = rows.iter().map(|r| r.failures).sum();
        println!(
            "{}: fwer range [{lo}, {hi}] over n in [{}, {}], failures {failures}",
            method.label(),
            rows.iter().map(|r| r.n_obs).min().unwrap(),
            rows.iter().map(|r| r.n_obs).max().unwrap(),
        );
    }
    Ok(())
}

fn cmd_thresholds(n_vars: usize, n_obs: usize, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let beta = null_beta_params(n_obs, n_vars)?;
    let k = (n_obs as f64 - n_vars as f64 - 2.0) / 2.0;
    let q = beta_quantile(&beta, alpha / 2.0)?;
    let r_threshold = 1.0 - 2.0 * q;
    let exact = partial_corr_null_quantile(
        &NullCorrDensityParams::new(n_obs, n_vars)?,
        1.0 - alpha / 2.0,
    )?;
    let z = std_normal_quantile(1.0 - alpha / 2.0)?;
    println!("N = {n_vars}, n = {n_obs}, alpha = {alpha}");
    println!("K = (n - N - 2) / 2: {k}");
    println!("beta shape K + 1: {}", beta.alpha_shape);
    println!("q (alpha/2 beta quantile): {q}");
    println!("r threshold 1 - 2q: {r_threshold}");
    println!("exact r threshold c: {exact}");
    println!("|c - (1 - 2q)|: {:e}", (exact - r_threshold).abs());
    println!("fisher z threshold: {z}");
    Ok(())
}

/// Grid spec: comma-separated items, each "n", "a:b", or "a:b:step".
fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    let mut grid = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let parts: Vec<&str> = item.split(':').collect();
        let parse = |s: &str| -> Result<usize> {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad grid value {s:?}")))
        };
        match parts.len() {
            1 => grid.push(parse(parts[0])?),
            2 | 3 => {
                let start = parse(parts[0])?;
                let stop = parse(parts[1])?;
                let step = if parts.len() == 3 {
                    parse(parts[2])?
                } else {
                    1
                };
                if step == 0 {
                    return Err(Error::InvalidInput("grid step must be positive".into()));
                }
                if start > stop {
                    return Err(Error::InvalidInput(format!(
                        "grid range {start}:{stop} is empty"
                    )));
                }
                grid.extend((start..=stop).step_by(step));
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "bad grid item {item:?}; expected n, a:b, or a:b:step"
                )))
            }
        }
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty sample-size grid".into()));
    }
    Ok(grid)
}

fn parse_methods(spec: &str) -> Result<Vec<ProcedureMethod>> {
    let mut methods = Vec::new();
    for item in spec.split(',') {
        if item.trim().is_empty() {
            continue;
        }
        let m = ProcedureMethod::parse(item)?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(Error::InvalidInput("no procedures selected".into()));
    }
    Ok(methods)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("4:40").unwrap().len(), 37);
        assert_eq!(parse_grid("5").unwrap(), vec![5]);
        assert_eq!(parse_grid("5,7,9").unwrap(), vec![5, 7, 9]);
        assert_eq!(parse_grid("10:20:5").unwrap(), vec![10, 15, 20]);
        assert_eq!(
            parse_grid("41,45,50:70:10").unwrap(),
            vec![41, 45, 50, 60, 70]
        );
        assert!(parse_grid("").is_err());
        assert!(parse_grid("9:3").is_err());
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn method_list_parsing() {
        assert_eq!(
            parse_methods("delta1,delta2").unwrap(),
            vec![ProcedureMethod::Delta1Fisher, ProcedureMethod::Delta2Neyman]
        );
        assert_eq!(parse_methods("delta2").unwrap().len(), 1);
        assert!(parse_methods("delta9").is_err());
        assert!(parse_methods("").is_err());
    }
}
