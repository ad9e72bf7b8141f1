//! `sepca` command line interface.
//!
//! Subcommands: `generate` synthetic matrices, `select` coordinates,
//! `estimate` the full two-stage triple, `bench` a Monte Carlo grid,
//! `theory` detection boundary curves, `geometry` pairwise power
//! comparisons, and `sigma` noise level estimation.
//!
//! Exit codes: 0 success, 2 configuration error, 3 i/o error, 4 numerical
//! failure.

use clap::{Args, Parser, Subcommand};
use sepca_cli::bench::{run_experiment, theory_curves, CurveConfig};
use sepca_cli::config::{
    BenchAlgorithm, ExperimentConfig, VProfileConfig,
};
use sepca_cli::io::{
    read_matrix, write_curves, write_matrix, write_results, MatrixFormat, TableFormat,
};
use sepca_cli::sigma::estimate_sigma;
use sepca_cli::{from_core, CliError};
use serde_json::json;
use std::path::PathBuf;
use std::str::FromStr;

use sepca::{
    estimate_two_stage, fdr_penalty, fdr_select, generate_data, geometry_compare, hc_select,
    make_u, make_v, pvalues, rank1_svd, select_fwer, Algorithm, DataMatrix, GeometryParams,
    SelectionResult, SignalModel, StatKind, USpec, VProfile,
};

#[derive(Parser)]
#[command(
    name = "sepca",
    about = "Sparse equisigned PCA: selection, estimation, and benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic matrix theta*u*v' + sigma*G and write it to a file.
    Generate(GenerateArgs),
    /// Run one coordinate selection stage on a matrix file.
    Select(SelectArgs),
    /// Run selection plus the rank-1 SVD second stage.
    Estimate(SelectArgs),
    /// Monte Carlo benchmark over an (n, theta) grid.
    Bench(BenchArgs),
    /// Detection boundary curves over an n grid.
    Theory(TheoryArgs),
    /// Pairwise geometric power comparison.
    Geometry(GeometryArgs),
    /// Estimate the noise scale of a matrix file.
    Sigma(SigmaArgs),
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 200)]
    p: usize,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// rise-fall | power-decay | uniform
    #[arg(long, default_value = "rise-fall")]
    v_profile: String,
    /// Comma separated support indices of u (0-based).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    u_support: Vec<usize>,
    /// Comma separated values on the support; normalized to unit norm.
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    u_values: Vec<f64>,
    /// Use the worst-case u with m small coordinates instead of an explicit
    /// support.
    #[arg(long)]
    worst_case_m: Option<usize>,
    /// Size parameter r of the worst-case u.
    #[arg(long, default_value_t = 0.5)]
    worst_case_r: f64,
}

impl ModelArgs {
    fn v_profile(&self) -> Result<VProfile, CliError> {
        Ok(match self.v_profile.as_str() {
            "rise-fall" => VProfile::RiseFall { n: self.n },
            "power-decay" => VProfile::PowerDecay { n: self.n },
            "uniform" => VProfile::Uniform { n: self.n },
            other => {
                return Err(CliError::config(format!(
                    "unknown v profile {other:?} (expected rise-fall, power-decay or uniform)"
                )))
            }
        })
    }

    fn build(&self) -> Result<SignalModel, CliError> {
        let spec = match self.worst_case_m {
            Some(m) => USpec::WorstCase {
                m,
                r: self.worst_case_r,
            },
            None => USpec::Explicit {
                support: self.u_support.clone(),
                values: self.u_values.clone(),
            },
        };
        let u = make_u(self.p, &spec).map_err(from_core)?;
        let v = make_v(&self.v_profile()?).map_err(from_core)?;
        SignalModel::new(self.theta, u, v.vector, self.sigma).map_err(from_core)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    /// csv | bin
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct SelectArgs {
    /// Matrix file (CSV or binary; sniffed from the leading bytes).
    #[arg(long)]
    input: PathBuf,
    /// sum | ell1 | ell2 | hc-sum | hc-ell2 | fdr
    #[arg(long)]
    algorithm: String,
    /// Known noise scale; omit together with --estimate-sigma to infer it.
    #[arg(long)]
    sigma: Option<f64>,
    /// Estimate sigma from the matrix instead of passing it.
    #[arg(long, default_value_t = false)]
    estimate_sigma: bool,
    /// exact | table-bound (sum statistic only)
    #[arg(long, default_value = "exact")]
    sum_variant: String,
    /// downward-closed | per-rank (Higher Criticism only)
    #[arg(long, default_value = "downward-closed")]
    hc_rule: String,
    #[arg(long, default_value_t = 1.02)]
    zeta: f64,
    #[arg(long, default_value_t = std::f64::consts::E * std::f64::consts::E)]
    nu: f64,
    /// Fall back to the plain SVD when nothing is selected (estimate only).
    #[arg(long, default_value_t = false)]
    svd_fallback: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML experiment description; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    theta_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    #[arg(long)]
    out: PathBuf,
    /// csv | jsonl
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, default_value_t = 1000)]
    p: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "100,200,500,1000,2000,5000"
    )]
    n_grid: Vec<usize>,
    /// rise-fall | power-decay | uniform
    #[arg(long, default_value = "rise-fall")]
    v_profile: String,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "sum,ell1,ell2,hc-sum,hc-ell2,fdr"
    )]
    algorithms: Vec<String>,
    /// Sparsity level for the HC sparsity index.
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 1)]
    k_hat: usize,
    #[arg(long, default_value_t = 1.02)]
    zeta: f64,
    #[arg(long, default_value_t = std::f64::consts::E * std::f64::consts::E)]
    nu: f64,
    #[arg(long)]
    out: PathBuf,
    /// csv | jsonl
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct GeometryArgs {
    /// First algorithm tag.
    #[arg(long)]
    a: String,
    /// Second algorithm tag.
    #[arg(long)]
    b: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    /// Sparsity index for HC members.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    k_hat: usize,
    #[arg(long, default_value_t = 1.02)]
    zeta: f64,
    #[arg(long, default_value_t = std::f64::consts::E * std::f64::consts::E)]
    nu: f64,
    /// Optional matrix file whose first row supplies a v for the angle test.
    #[arg(long)]
    v_from: Option<PathBuf>,
}

#[derive(Args)]
struct SigmaArgs {
    #[arg(long)]
    input: PathBuf,
}

fn main() {
    if let Ok(threads) = std::env::var("SEPCA_THREADS") {
        if let Ok(k) = threads.trim().parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    }
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("sepca: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Select(args) => select(args, false),
        Command::Estimate(args) => select(args, true),
        Command::Bench(args) => bench(args),
        Command::Theory(args) => theory(args),
        Command::Geometry(args) => geometry(args),
        Command::Sigma(args) => sigma_cmd(args),
    }
}

fn parse_matrix_format(s: &str) -> Result<MatrixFormat, CliError> {
    match s {
        "csv" => Ok(MatrixFormat::Csv),
        "bin" | "binary" => Ok(MatrixFormat::Binary),
        other => Err(CliError::config(format!(
            "unknown matrix format {other:?} (expected csv or bin)"
        ))),
    }
}

fn parse_table_format(s: &str) -> Result<TableFormat, CliError> {
    match s {
        "csv" => Ok(TableFormat::Csv),
        "jsonl" | "json-lines" => Ok(TableFormat::JsonLines),
        other => Err(CliError::config(format!(
            "unknown table format {other:?} (expected csv or jsonl)"
        ))),
    }
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let format = parse_matrix_format(&args.format)?;
    let model = args.model.build()?;
    let x = generate_data(&model, args.seed);
    write_matrix(&args.out, &x, format)
}

fn selection_for(
    args: &SelectArgs,
    x: &DataMatrix,
    sigma: f64,
) -> Result<SelectionResult, CliError> {
    let algorithm = Algorithm::from_str(&args.algorithm).map_err(from_core)?;
    let sum_variant = match args.sum_variant.as_str() {
        "exact" => sepca::SumVariant::Exact,
        "table-bound" => sepca::SumVariant::TableBound,
        other => {
            return Err(CliError::config(format!(
                "unknown sum variant {other:?} (expected exact or table-bound)"
            )))
        }
    };
    let hc_rule = match args.hc_rule.as_str() {
        "downward-closed" => sepca::HcRule::DownwardClosed,
        "per-rank" | "literal" => sepca::HcRule::PerRank,
        other => {
            return Err(CliError::config(format!(
                "unknown hc rule {other:?} (expected downward-closed or per-rank)"
            )))
        }
    };
    Ok(match algorithm {
        Algorithm::Sum => select_fwer(x, StatKind::Sum, sigma, sum_variant).map_err(from_core)?,
        Algorithm::Ell1 => select_fwer(x, StatKind::Ell1, sigma, sum_variant).map_err(from_core)?,
        Algorithm::Ell2 => select_fwer(x, StatKind::Ell2, sigma, sum_variant).map_err(from_core)?,
        Algorithm::HcSum => {
            let pv = pvalues(x, StatKind::Sum, sigma).map_err(from_core)?;
            hc_select(&pv, hc_rule)
                .map_err(from_core)?
                .to_selection(Algorithm::HcSum)
        }
        Algorithm::HcEll2 => {
            let pv = pvalues(x, StatKind::Ell2, sigma).map_err(from_core)?;
            hc_select(&pv, hc_rule)
                .map_err(from_core)?
                .to_selection(Algorithm::HcEll2)
        }
        Algorithm::Fdr => {
            let pen = fdr_penalty(x.rows(), args.zeta, args.nu, 1.0).map_err(from_core)?;
            fdr_select(x, sigma, &pen).map_err(from_core)?
        }
    })
}

fn select(args: SelectArgs, with_estimate: bool) -> Result<(), CliError> {
    let x = read_matrix(&args.input)?;
    let sigma = match (args.sigma, args.estimate_sigma) {
        (Some(_), true) => {
            return Err(CliError::config(
                "--sigma and --estimate-sigma are mutually exclusive",
            ))
        }
        (Some(s), false) => s,
        (None, true) => {
            let est = estimate_sigma(&x)?;
            if est.degenerate {
                return Err(CliError::numeric(
                    "estimated sigma is zero; supply --sigma explicitly",
                ));
            }
            est.sigma
        }
        (None, false) => return Err(CliError::config("supply --sigma or --estimate-sigma")),
    };
    let selection = selection_for(&args, &x, sigma)?;
    let mut report = json!({
        "algorithm": args.algorithm,
        "sigma": sigma,
        "threshold": selection.threshold,
        "selected": selection.selected,
        "stats": selection.stats,
    });
    if with_estimate {
        let est = estimate_two_stage(&x, &selection).map_err(from_core)?;
        let (u_hat, v_hat, theta_hat, empty, fallback) = if est.empty && args.svd_fallback {
            let svd = rank1_svd(&x);
            (svd.u_hat, svd.v_hat, svd.sigma1, true, true)
        } else {
            (est.u_hat, est.v_hat, est.theta_hat, est.empty, false)
        };
        report["estimate"] = json!({
            "theta_hat": theta_hat,
            "u_hat": u_hat,
            "v_hat": v_hat,
            "empty_selection": empty,
            "svd_fallback_applied": fallback,
        });
    }
    emit_json(&report, args.out.as_deref())
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let format = parse_table_format(&args.format)?;
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.n_grid {
        cfg.n_grid = n;
    }
    if let Some(t) = args.theta_grid {
        cfg.theta_grid = t;
    }
    if let Some(algos) = args.algorithms {
        cfg.algorithms = algos
            .iter()
            .map(|s| BenchAlgorithm::from_str(s))
            .collect::<Result<_, _>>()?;
    }
    let rows = run_experiment(&cfg)?;
    write_results(&args.out, &rows, format)
}

fn theory(args: TheoryArgs) -> Result<(), CliError> {
    let format = parse_table_format(&args.format)?;
    let v_profile = match args.v_profile.as_str() {
        "rise-fall" => VProfileConfig::RiseFall,
        "power-decay" => VProfileConfig::PowerDecay,
        "uniform" => VProfileConfig::Uniform,
        other => {
            return Err(CliError::config(format!(
                "unknown v profile {other:?} (expected rise-fall, power-decay or uniform)"
            )))
        }
    };
    let algorithms = args
        .algorithms
        .iter()
        .map(|s| Algorithm::from_str(s).map_err(from_core))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = CurveConfig {
        p: args.p,
        sigma: args.sigma,
        n_grid: args.n_grid,
        v_profile,
        algorithms,
        s: args.s,
        k_hat: args.k_hat,
        zeta: args.zeta,
        nu: args.nu,
    };
    let rows = theory_curves(&cfg)?;
    write_curves(&args.out, &rows, format)
}

fn geometry(args: GeometryArgs) -> Result<(), CliError> {
    let a = Algorithm::from_str(&args.a).map_err(from_core)?;
    let b = Algorithm::from_str(&args.b).map_err(from_core)?;
    let v = match &args.v_from {
        Some(path) => {
            let m = read_matrix(path)?;
            Some(m.row(0).to_vec())
        }
        None => None,
    };
    let params = GeometryParams {
        beta_sparsity: args.beta,
        k_hat: args.k_hat,
        zeta: args.zeta,
        nu: args.nu,
        v,
    };
    let report = geometry_compare(a, b, args.n, args.p, &params).map_err(from_core)?;
    let out = json!({
        "pair": [report.pair.0.name(), report.pair.1.name()],
        "r": report.r,
        "h": report.h,
        "theta_lim": report.theta_lim,
        "theta_v": report.theta_v,
        "cap_exists": report.cap_exists,
        "ratio": report.ratio,
        "preferred": report.preferred.map(|p| p.name()),
    });
    emit_json(&out, None)
}

fn sigma_cmd(args: SigmaArgs) -> Result<(), CliError> {
    let x = read_matrix(&args.input)?;
    let est = estimate_sigma(&x)?;
    emit_json(
        &json!({ "sigma": est.sigma, "degenerate": est.degenerate }),
        None,
    )
}

fn emit_json(value: &serde_json::Value, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::io(format!("writing {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
