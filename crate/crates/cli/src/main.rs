//! `simnet`: validate, query, convert, build and benchmark similarity networks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use simnet_core::bench::{self, BenchParams};
use simnet_core::format::{
    model_to_string, multinet_to_string, parse_evidence, parse_joint, parse_model, parse_multinet,
};
use simnet_core::multinet::HypothesisWork;
use simnet_core::strict::{infer_posterior_strict_with, StrictOptions};
use simnet_core::{
    build_similarity_network, check_consistency, compute_alphas, convert, infer_multinet,
    ConvertOptions, Cover, Error, Evidence, Kind, Multinet, PosteriorVector, SimilarityNetwork,
    Warning, DEFAULT_CELL_BUDGET,
};

#[derive(Parser)]
#[command(name = "simnet", version, about = "Exact inference for discrete similarity networks")]
struct Cli {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,

    /// Largest joint table any command may materialize.
    #[arg(long, global = true, default_value_t = DEFAULT_CELL_BUDGET, value_name = "N")]
    cell_budget: u64,

    /// Seed for the spanning tree of sinet inference and for `bench`.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file's cover and local networks.
    Validate { model: PathBuf },
    /// Posterior of the hypothesis given evidence.
    Infer(InferArgs),
    /// Convert a type-1 model to a hypothesis-specific multinet.
    Convert(ConvertArgs),
    /// Build a similarity network from a joint table.
    Build(BuildArgs),
    /// Compare local and global inference work on a synthetic model.
    Bench(BenchArgs),
    /// Audit the local posteriors for cross-cell consistency.
    Check {
        model: PathBuf,
        #[arg(long, value_name = "PATH")]
        evidence: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Sinet,
    Multinet,
    Global,
}

#[derive(Args)]
struct InferArgs {
    /// A model file or a multinet file.
    model: PathBuf,
    #[arg(long, value_name = "PATH")]
    evidence: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Multinet)]
    mode: Mode,
    /// Treat a model of unspecified kind as type 1.
    #[arg(long)]
    assume_type1: bool,
}

#[derive(Args)]
struct ConvertArgs {
    model: PathBuf,
    /// Comma-separated variable order; defaults to the model's order.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long)]
    assume_type1: bool,
    /// Convert type-2 models anyway; the result is not known to be correct.
    #[arg(long)]
    experimental_type2: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TypeArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Args)]
struct BuildArgs {
    joint: PathBuf,
    #[arg(long)]
    hypothesis: String,
    /// Cells separated by `;`, values by `,`, e.g. `a,b;b,c`.
    #[arg(long)]
    cover: String,
    #[arg(long = "type", value_enum, default_value = "1")]
    kind: TypeArg,
    /// Comma-separated construction order, hypothesis first; defaults to
    /// the joint's order with the hypothesis moved to the front.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 9)]
    hypotheses: usize,
    #[arg(long, default_value_t = 6)]
    vars_per_local: usize,
    #[arg(long, default_value_t = 16)]
    total: usize,
}

#[derive(Serialize)]
struct QueryResult {
    mode: Mode,
    posterior: PosteriorVector,
    warnings: Vec<Warning>,
    work: Work,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Work {
    Cells { cells_touched: u128 },
    PerHypothesis(Vec<HypothesisWork>),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::NotStrictlyPositive) => 2,
        Some(Error::ImpossibleEvidence | Error::ZeroProbabilityEvidence) => 3,
        Some(Error::Unsupported(_)) => 4,
        _ => 1,
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Validate { model } => validate(cli, model),
        Command::Infer(args) => infer(cli, args).map(|()| ExitCode::SUCCESS),
        Command::Convert(args) => convert_cmd(args).map(|()| ExitCode::SUCCESS),
        Command::Build(args) => build(cli, args).map(|()| ExitCode::SUCCESS),
        Command::Bench(args) => bench_cmd(cli, args).map(|()| ExitCode::SUCCESS),
        Command::Check { model, evidence } => check(cli, model, evidence.as_deref()),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(path: &Path) -> anyhow::Result<SimilarityNetwork> {
    parse_model(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_valid_model(path: &Path) -> anyhow::Result<SimilarityNetwork> {
    let sn = load_model(path)?;
    let issues = sn.validate();
    if let Some(first) = issues.first() {
        bail!(
            "{} is invalid ({} issues, first: {first}); run `simnet validate` for details",
            path.display(),
            issues.len()
        );
    }
    Ok(sn)
}

fn load_evidence(path: Option<&Path>) -> anyhow::Result<Evidence> {
    match path {
        None => Ok(Evidence::new()),
        Some(p) => parse_evidence(&read(p)?).with_context(|| format!("parsing {}", p.display())),
    }
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn validate(cli: &Cli, path: &Path) -> anyhow::Result<ExitCode> {
    let sn = load_model(path)?;
    let issues = sn.validate();
    if cli.json {
        let list: Vec<_> = issues
            .iter()
            .map(|i| serde_json::json!({ "location": i.location, "message": i.message }))
            .collect();
        print_json(&serde_json::json!({ "valid": issues.is_empty(), "issues": list }))?;
    } else if issues.is_empty() {
        println!("{}: ok", path.display());
    } else {
        for i in &issues {
            println!("{i}");
        }
    }
    Ok(if issues.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

enum Loaded {
    Model(SimilarityNetwork),
    Multinet(Multinet),
}

fn load_for_inference(path: &Path) -> anyhow::Result<Loaded> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Malformed(e.to_string()))
        .with_context(|| format!("parsing {}", path.display()))?;
    if value.get("networks").is_some() {
        let mn = parse_multinet(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(Loaded::Multinet(mn))
    } else {
        load_valid_model(path).map(Loaded::Model)
    }
}

fn to_multinet(sn: &SimilarityNetwork, options: &ConvertOptions) -> anyhow::Result<Multinet> {
    Ok(convert(sn, &sn.depicted_variables(), options)?)
}

fn infer(cli: &Cli, args: &InferArgs) -> anyhow::Result<()> {
    let loaded = load_for_inference(&args.model)?;
    let evidence = load_evidence(args.evidence.as_deref())?;
    let options = ConvertOptions {
        assume_type1: args.assume_type1,
        ..ConvertOptions::default()
    };
    let result = match (&loaded, args.mode) {
        (Loaded::Model(sn), Mode::Sinet) => {
            sn.check_evidence(&evidence)?;
            let answer = infer_posterior_strict_with(sn, &evidence, &StrictOptions { tree_seed: cli.seed })?;
            QueryResult {
                mode: Mode::Sinet,
                posterior: answer.posterior,
                warnings: answer.warnings,
                work: Work::Cells {
                    cells_touched: answer.cells_touched,
                },
            }
        }
        (Loaded::Multinet(_), Mode::Sinet) => {
            return Err(Error::Unsupported("sinet mode needs a similarity-network model file".into()).into())
        }
        (_, mode) => {
            let converted;
            let mn = match &loaded {
                Loaded::Model(sn) => {
                    sn.check_evidence(&evidence)?;
                    converted = to_multinet(sn, &options)?;
                    &converted
                }
                Loaded::Multinet(mn) => mn,
            };
            let answer = infer_multinet(mn, &evidence)?;
            if mode == Mode::Multinet {
                QueryResult {
                    mode,
                    posterior: answer.posterior,
                    warnings: answer.warnings,
                    work: Work::PerHypothesis(
                        mn.networks
                            .iter()
                            .zip(answer.work)
                            .map(|(c, counts)| HypothesisWork {
                                hypothesis: c.hypothesis.clone(),
                                counts,
                            })
                            .collect(),
                    ),
                }
            } else {
                let t = mn.joint_table(cli.cell_budget)?;
                let kept = evidence.filtered(|v| t.var_index(v).is_some());
                QueryResult {
                    mode,
                    posterior: t.posterior(&mn.hypothesis.name, &kept)?,
                    warnings: answer.warnings,
                    work: Work::Cells {
                        cells_touched: t.len() as u128,
                    },
                }
            }
        }
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    if cli.json {
        return print_json(&result);
    }
    let mode = serde_json::to_value(result.mode)?;
    println!("mode: {}", mode.as_str().unwrap_or_default());
    print!("{}", result.posterior);
    match &result.work {
        Work::Cells { cells_touched } => println!("cells touched: {cells_touched}"),
        Work::PerHypothesis(work) => {
            for w in work {
                println!(
                    "work[{}]: {} lookups, {} multiplications, {} additions",
                    w.hypothesis, w.counts.lookups, w.counts.multiplications, w.counts.additions
                );
            }
        }
    }
    Ok(())
}

fn convert_cmd(args: &ConvertArgs) -> anyhow::Result<()> {
    let sn = load_valid_model(&args.model)?;
    let options = ConvertOptions {
        assume_type1: args.assume_type1,
        experimental_type2: args.experimental_type2,
    };
    let mn = match &args.order {
        Some(order) => convert(&sn, order, &options)?,
        None => to_multinet(&sn, &options)?,
    };
    emit(args.output.as_deref(), &multinet_to_string(&mn))
}

fn parse_cover(spec: &str) -> anyhow::Result<Cover> {
    let cells: Vec<Vec<String>> = spec
        .split(';')
        .map(|cell| {
            cell.split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(String::from)
                .collect()
        })
        .collect();
    if cells.iter().any(Vec::is_empty) {
        bail!("cover `{spec}` has an empty cell");
    }
    Ok(Cover { cells })
}

fn build(cli: &Cli, args: &BuildArgs) -> anyhow::Result<()> {
    let text = read(&args.joint)?;
    let t = parse_joint(&text).with_context(|| format!("parsing {}", args.joint.display()))?;
    let cells = t.len() as u64;
    if cells > cli.cell_budget {
        return Err(Error::CellBudgetExceeded {
            cells: cells as u128,
            budget: cli.cell_budget,
        }
        .into());
    }
    let cover = parse_cover(&args.cover)?;
    let order = match &args.order {
        Some(o) => o.clone(),
        None => {
            let mut o = vec![args.hypothesis.clone()];
            o.extend(
                t.variables()
                    .iter()
                    .map(|v| v.name.clone())
                    .filter(|n| *n != args.hypothesis),
            );
            o
        }
    };
    let kind = match args.kind {
        TypeArg::One => Kind::Type1,
        TypeArg::Two => Kind::Type2,
    };
    let sn = build_similarity_network(&t, &args.hypothesis, &cover, kind, &order)?;
    emit(args.output.as_deref(), &model_to_string(&sn))
}

fn bench_cmd(cli: &Cli, args: &BenchArgs) -> anyhow::Result<()> {
    let params = BenchParams {
        hypotheses: args.hypotheses,
        vars_per_local: args.vars_per_local,
        total: args.total,
        seed: cli.seed,
    };
    let report = bench::run(&params, cli.cell_budget)?;
    if cli.json {
        print_json(&report)
    } else {
        print!("{report}");
        Ok(())
    }
}

fn check(cli: &Cli, path: &Path, evidence: Option<&Path>) -> anyhow::Result<ExitCode> {
    let sn = load_valid_model(path)?;
    let evidence = load_evidence(evidence)?;
    sn.check_evidence(&evidence)?;
    let alphas = compute_alphas(&sn, &evidence)?;
    let report = check_consistency(&alphas, &sn.cover);
    if cli.json {
        print_json(&serde_json::json!({ "alphas": alphas, "report": report }))?;
    } else {
        for (j, cell) in alphas.cells.iter().enumerate() {
            let entries: Vec<String> = cell
                .hypotheses
                .iter()
                .zip(&cell.alphas)
                .map(|(h, a)| format!("{h}={a:.9}"))
                .collect();
            println!("cell {j}: {}", entries.join(" "));
        }
        print!("{report}");
    }
    if report.is_consistent() {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(anyhow!("{} consistency violations", report.violations.len()))
    }
}
