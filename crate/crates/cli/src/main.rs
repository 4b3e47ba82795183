//! `specnorm` — sample random tensors, bracket their spectral norms, and
//! verify concentration bounds from the command line.
//!
//! Exit codes: 0 success; 1 usage error; 2 runtime failure (including a
//! failed empirical tail check); 3 success but with validity-flag warnings
//! (a bound was computed outside its preconditions).

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use specnorm_core::bounds::{
    corollary1_bound, corollary2_bound, cover_count_report, hoeffding_tail, lemma1_tail_report,
    net_slack_report, theorem1_bound, BoundParams, BoundReport,
};
use specnorm_core::estimators::{power_iteration, spectral_norm_bracket, PowerIterConfig};
use specnorm_core::experiment::report::{read_records_json, write_report};
use specnorm_core::experiment::{resolve_output_dir, run_experiment, summarize, ExperimentConfig};
use specnorm_core::models::{empirical_tail, LawKind, ModelSpec, RandomModel, SubGaussianLaw};
use specnorm_core::rng::stream_rng;
use specnorm_core::tensor::{io as tensor_io, Shape, UnitTuple};

#[derive(Parser)]
#[command(
    name = "specnorm",
    version,
    about = "Spectral norms of random tensors: estimation, certification, bounds, and Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random tensor and write it to a tensor file
    Gen(GenArgs),
    /// Bracket the spectral norm of a stored tensor
    Estimate(EstimateArgs),
    /// Evaluate a closed-form bound and print its report as JSON
    Bound(BoundArgs),
    /// Empirical fixed-direction tail check against the sub-Gaussian bound
    Tail(TailArgs),
    /// Run an experiment described by a TOML config file
    Experiment(ExperimentArgs),
    /// Re-render CSV/JSON/SVG outputs from stored records
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "lowercase")]
enum LawArg {
    Gaussian,
    Rademacher,
    Uniform,
}

impl From<LawArg> for LawKind {
    fn from(value: LawArg) -> Self {
        match value {
            LawArg::Gaussian => LawKind::Gaussian,
            LawArg::Rademacher => LawKind::Rademacher,
            LawArg::Uniform => LawKind::Uniform,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "lowercase")]
enum ModelArg {
    Iid,
    Measurement,
    Sampling,
}

#[derive(Args)]
struct GenArgs {
    /// Mode dimensions, e.g. 8,8,8
    #[arg(long, value_parser = parse_shape)]
    shape: Shape,
    /// Destination tensor file
    #[arg(long)]
    out: PathBuf,
    /// Full model description as a JSON file {model, params..., seed}
    #[arg(long, conflicts_with_all = ["model", "law", "sigma", "m", "coeff_sigma", "entry_law", "seed"])]
    model_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "iid")]
    model: ModelArg,
    /// Entry law (iid) or value law (sampling)
    #[arg(long, value_enum, default_value = "gaussian")]
    law: LawArg,
    /// Variance proxy of the entry/value law
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Measurement or sample count for the non-iid models
    #[arg(long)]
    m: Option<usize>,
    /// Coefficient proxy for the measurement model
    #[arg(long, default_value_t = 1.0)]
    coeff_sigma: f64,
    /// Entry law of the measurement model (proxy fixed at 1)
    #[arg(long, value_enum, default_value = "gaussian")]
    entry_law: LawArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EstimateArgs {
    /// Tensor file to estimate
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 400)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also compute the net-certificate upper bound at this radius
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FormulaArg {
    Lemma1Tail,
    Theorem1,
    Corollary1,
    Corollary2,
    NetSlack,
    CoverCount,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    formula: FormulaArg,
    #[arg(long, value_parser = parse_shape)]
    shape: Option<Shape>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Measurement count (corollary1)
    #[arg(long)]
    m: Option<usize>,
    /// Threshold (lemma1_tail)
    #[arg(long)]
    t: Option<f64>,
    /// Net radius (net_slack, cover_count)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Tensor order (net_slack)
    #[arg(long)]
    k: Option<usize>,
    /// Sphere dimension (cover_count)
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct TailArgs {
    #[arg(long, value_parser = parse_shape)]
    shape: Shape,
    #[arg(long, value_enum, default_value = "gaussian")]
    law: LawArg,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed for the fixed unit tuple, drawn before any sampling
    #[arg(long, default_value_t = 1)]
    tuple_seed: u64,
    /// Thresholds to test, e.g. 0.5,1,2,3
    #[arg(long, value_parser = parse_f64_list, default_value = "0.5,1,2,3")]
    thresholds: std::vec::Vec<f64>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's output_dir and the environment default
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides the config's worker-thread cap
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// records.json written by a previous experiment run
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<specnorm_core::Error> for CliError {
    fn from(e: specnorm_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Bound(args) => cmd_bound(args),
        Command::Tail(args) => cmd_tail(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<i32, CliError> {
    let model = match &args.model_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<RandomModel>(&text)
                .map_err(|e| CliError::Runtime(format!("bad model file: {e}")))?
        }
        None => RandomModel { spec: spec_from_flags(&args)?, seed: args.seed },
    };
    let tensor = model.sample(&args.shape)?;
    tensor_io::save_tensor(&tensor, &args.out)?;
    println!(
        "{}",
        json!({
            "file": args.out,
            "shape": args.shape.dims(),
            "model": model,
            "frobenius_norm": tensor.frobenius_norm(),
        })
    );
    Ok(0)
}

fn spec_from_flags(args: &GenArgs) -> Result<ModelSpec, CliError> {
    let law = SubGaussianLaw { kind: args.law.into(), sigma: args.sigma };
    Ok(match args.model {
        ModelArg::Iid => ModelSpec::Iid { law },
        ModelArg::Measurement => ModelSpec::Measurement {
            m: args.m.ok_or_else(|| {
                CliError::Usage("--m is required for the measurement model".into())
            })?,
            entry_law: SubGaussianLaw { kind: args.entry_law.into(), sigma: 1.0 },
            coeff_sigma: args.coeff_sigma,
        },
        ModelArg::Sampling => ModelSpec::Sampling {
            m: args.m.ok_or_else(|| {
                CliError::Usage("--m is required for the sampling model".into())
            })?,
            value_law: law,
        },
    })
}

fn cmd_estimate(args: EstimateArgs) -> Result<i32, CliError> {
    let tensor = tensor_io::load_tensor(&args.input)?;
    let cfg = PowerIterConfig {
        restarts: args.restarts,
        max_iters: args.max_iters,
        tol: args.tol,
        seed: args.seed,
    };
    let output = match args.epsilon {
        Some(eps) => {
            let bracket = spectral_norm_bracket(&tensor, &cfg, eps)?;
            json!({
                "norm_lower": bracket.lower,
                "norm_upper": bracket.upper,
                "iterations_used": bracket.power.iterations_used,
                "converged": bracket.power.converged,
                "certificate": bracket.certificate,
            })
        }
        None => {
            let power = power_iteration(&tensor, &cfg)?;
            json!({
                "norm_lower": power.value,
                "iterations_used": power.iterations_used,
                "converged": power.converged,
            })
        }
    };
    println!("{output}");
    Ok(0)
}

fn cmd_bound(args: BoundArgs) -> Result<i32, CliError> {
    let report = build_report(&args)?;
    println!("{}", serde_json::to_string(&report).expect("reports serialize"));
    if report.validity_flags.is_empty() {
        Ok(0)
    } else {
        for flag in &report.validity_flags {
            eprintln!("warning: {flag}");
        }
        Ok(3)
    }
}

fn build_report(args: &BoundArgs) -> Result<BoundReport, CliError> {
    let need = |value: Option<f64>, flag: &str| {
        value.ok_or_else(|| CliError::Usage(format!("{flag} is required for this formula")))
    };
    match args.formula {
        FormulaArg::Lemma1Tail => Ok(lemma1_tail_report(need(args.t, "--t")?, args.sigma)?),
        FormulaArg::Theorem1 | FormulaArg::Corollary1 | FormulaArg::Corollary2 => {
            let shape = args
                .shape
                .clone()
                .ok_or_else(|| CliError::Usage("--shape is required for this formula".into()))?;
            let mut params = BoundParams::new(shape, args.sigma, args.delta);
            if let Some(m) = args.m {
                params = params.with_measurements(m);
            }
            Ok(match args.formula {
                FormulaArg::Theorem1 => theorem1_bound(&params)?,
                FormulaArg::Corollary1 => corollary1_bound(&params)?,
                _ => corollary2_bound(&params)?,
            })
        }
        FormulaArg::NetSlack => {
            let k = args
                .k
                .ok_or_else(|| CliError::Usage("--k is required for net_slack".into()))?;
            Ok(net_slack_report(k, need(args.epsilon, "--epsilon")?)?)
        }
        FormulaArg::CoverCount => {
            let n = args
                .n
                .ok_or_else(|| CliError::Usage("--n is required for cover_count".into()))?;
            Ok(cover_count_report(n, need(args.epsilon, "--epsilon")?)?)
        }
    }
}

fn cmd_tail(args: TailArgs) -> Result<i32, CliError> {
    let law = SubGaussianLaw { kind: args.law.into(), sigma: args.sigma };
    let mut rng = stream_rng(args.tuple_seed, &[0x7475_706c]);
    let tuple = UnitTuple::random(&args.shape, &mut rng);
    let values = empirical_tail(&args.shape, &law, &tuple, args.trials, args.seed)?;
    let mut rows = Vec::new();
    let mut all_ok = true;
    for &t in &args.thresholds {
        let empirical = values.iter().filter(|&&v| v >= t).count() as f64 / args.trials as f64;
        let bound = hoeffding_tail(t, args.sigma)?.capped;
        let noise = 3.0 * (empirical * (1.0 - empirical) / args.trials as f64).sqrt();
        let ok = empirical <= bound + noise;
        all_ok &= ok;
        rows.push(json!({
            "t": t,
            "empirical": empirical,
            "bound": bound,
            "noise_margin": noise,
            "ok": ok,
        }));
    }
    println!(
        "{}",
        json!({ "trials": args.trials, "thresholds": rows, "all_ok": all_ok })
    );
    if all_ok {
        Ok(0)
    } else {
        Err(CliError::Runtime("empirical tail exceeded the bound".into()))
    }
}

fn cmd_experiment(args: ExperimentArgs) -> Result<i32, CliError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(dir) = args.output_dir {
        cfg.output_dir = Some(dir);
    } else if cfg.output_dir.is_none() {
        cfg.output_dir = Some(resolve_output_dir(None));
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    let out = run_experiment(&cfg)?;
    println!(
        "{}",
        json!({
            "records": out.outcomes.len(),
            "failed_trials": out.summary.failed_trials,
            "files": {
                "csv": out.files.csv,
                "records_json": out.files.records_json,
                "summary_json": out.files.summary_json,
                "svg": out.files.svg,
            },
            "summary": out.summary,
        })
    );
    Ok(0)
}

fn cmd_report(args: ReportArgs) -> Result<i32, CliError> {
    let outcomes = read_records_json(&args.records)?;
    let summary = summarize(&outcomes)?;
    let dir = resolve_output_dir(args.output_dir.as_deref());
    let files = write_report(&outcomes, &summary, &dir)?;
    println!(
        "{}",
        json!({
            "records": outcomes.len(),
            "files": {
                "csv": files.csv,
                "records_json": files.records_json,
                "summary_json": files.summary_json,
                "svg": files.svg,
            },
        })
    );
    Ok(0)
}

fn parse_shape(text: &str) -> Result<Shape, String> {
    let dims: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad dimension {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    Shape::new(&dims).map_err(|e| e.to_string())
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
        .collect()
}
