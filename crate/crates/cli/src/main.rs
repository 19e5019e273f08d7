//! `pva` — generalized principal variables analysis from the command line.
//!
//! Subcommands: `corr` (estimate a correlation matrix), `select` (rank
//! variables on real data), `simulate` (run seeded Monte Carlo scenario
//! grids), and `ree` (compare two subsets by relative explanatory
//! efficiency). Every command is deterministic given its flags; `simulate`
//! refuses to run without an explicit `--seed`.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pva_core::data::{
    load_csv, load_schema_file, name_column_errors, read_matrix_csv, selection_records,
    write_matrix_csv, write_records_csv, write_records_json, MatrixDoc, DEFAULT_MAX_LEVELS,
};
use pva_core::{
    figure_scenarios, gaussian_copula_corr, greedy_select, mixed_corr, pearson_corr, ree,
    run_scenario, spearman_corr, CorrelationFamily, CorrelationMatrix, Dataset, Error,
    LatentFamily, Scenario, SelectionResult, TidyRecord, TransformKind, TransformTargets,
    DEFAULT_PD_FLOOR,
};

#[derive(Parser)]
#[command(name = "pva", version, about = "Generalized principal variables analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a correlation matrix from a CSV dataset.
    Corr(CorrArgs),
    /// Select principal variables from a CSV dataset and write a ranked report.
    Select(SelectArgs),
    /// Run Monte Carlo simulation scenarios and write tidy results.
    Simulate(SimulateArgs),
    /// Relative explanatory efficiency of one subset against another.
    Ree(ReeArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV dataset (header row required, numeric cells, no missing values).
    #[arg(long)]
    input: PathBuf,
    /// Schema file: CSV with columns name, `kind[:levels]`. Kinds are inferred
    /// when omitted.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Ordinal-detection ceiling for schema inference.
    #[arg(long, default_value_t = DEFAULT_MAX_LEVELS)]
    max_levels: usize,
}

#[derive(Args)]
struct CorrArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Correlation family: pearson, spearman, copula, or polychoric.
    #[arg(long)]
    method: String,
    /// Re-run positive-definite repair with this eigenvalue floor before writing.
    #[arg(long)]
    pd_floor: Option<f64>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Correlation family (required unless --all-methods).
    #[arg(long, conflicts_with = "all_methods")]
    method: Option<String>,
    /// Run every admissible family and write a side-by-side rank table.
    #[arg(long)]
    all_methods: bool,
    /// Number of variables to select.
    #[arg(long)]
    q: usize,
    /// Latent family: gaussian, t:NU, or laplace:R.
    #[arg(long, default_value = "gaussian")]
    family: String,
    /// Positive-definite repair floor applied to each estimate.
    #[arg(long, default_value_t = DEFAULT_PD_FLOOR)]
    pd_floor: f64,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Figure preset: 1, 2, 3, A1, or A2.
    #[arg(long)]
    figure: Option<String>,
    /// Replicates per scenario cell.
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    /// Master seed (required; there is no silent nondeterminism).
    #[arg(long)]
    seed: Option<u64>,
    /// Variable count for custom scenarios.
    #[arg(long, default_value_t = 10)]
    p: usize,
    /// Selection size(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    q_grid: Vec<usize>,
    /// Sample size(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    /// Transformation: none, continuous, or ordinal.
    #[arg(long, default_value = "none")]
    transform: String,
    /// Transform targets: ideal or all.
    #[arg(long, default_value = "ideal")]
    targets: String,
    /// Methods to run, comma separated.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Latent family: gaussian, t:NU, or laplace:R.
    #[arg(long, default_value = "gaussian")]
    family: String,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct ReeArgs {
    /// Correlation matrix CSV (as written by `pva corr`).
    #[arg(long, conflicts_with_all = ["input", "method"])]
    matrix: Option<PathBuf>,
    /// Input CSV dataset to estimate the matrix from.
    #[arg(long, requires = "method")]
    input: Option<PathBuf>,
    /// Correlation family used with --input.
    #[arg(long)]
    method: Option<String>,
    /// Schema file for --input.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Ordinal-detection ceiling for schema inference.
    #[arg(long, default_value_t = DEFAULT_MAX_LEVELS)]
    max_levels: usize,
    /// First subset, comma-separated zero-based indices.
    #[arg(long, value_delimiter = ',')]
    set: Vec<usize>,
    /// Baseline subset, comma-separated zero-based indices.
    #[arg(long = "set-star", value_delimiter = ',')]
    set_star: Vec<usize>,
    /// Latent family: gaussian, t:NU, or laplace:R.
    #[arg(long, default_value = "gaussian")]
    family: String,
    /// Positive-definite repair floor applied if the matrix is not PD.
    #[arg(long, default_value_t = DEFAULT_PD_FLOOR)]
    pd_floor: f64,
    #[command(flatten)]
    io: IoArgs,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Corr(args) => cmd_corr(args),
        Command::Select(args) => cmd_select(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Ree(args) => cmd_ree(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn parse_family(value: &str) -> Result<LatentFamily> {
    LatentFamily::parse(value)
        .map_err(|_| anyhow!("unknown family {value:?}; expected gaussian, t:NU, or laplace:R"))
}

fn load_dataset(data: &DataArgs) -> Result<Dataset> {
    let declared = match &data.schema {
        Some(path) => Some(load_schema_file(path)?),
        None => None,
    };
    Ok(load_csv(&data.input, declared.as_deref(), data.max_levels)?)
}

/// Attach column names to index-carrying estimator errors.
fn describe(e: Error, names: &[String]) -> anyhow::Error {
    let named = |j: usize| -> String {
        names
            .get(j)
            .map(|n| format!("{n:?} (column {j})"))
            .unwrap_or_else(|| format!("column {j}"))
    };
    match &e {
        Error::ConstantColumn { column } => anyhow!("{} is constant (zero variance)", named(*column)),
        Error::DegenerateOrdinal { column } => {
            anyhow!("{} is a degenerate ordinal column (fewer than 2 observed levels)", named(*column))
        }
        Error::NonFinite { row, column } => anyhow!("non-finite value at row {row} in {}", named(*column)),
        _ => anyhow::Error::from(name_column_errors(e, names)),
    }
}

fn estimate(
    method: CorrelationFamily,
    dataset: &Dataset,
) -> Result<CorrelationMatrix> {
    if method == CorrelationFamily::Polychoric
        && !dataset.schema().kinds.iter().any(|k| k.is_ordinal())
    {
        bail!("polychoric requires at least one ordinal column; the schema is all-continuous");
    }
    let out = match method {
        CorrelationFamily::Pearson => pearson_corr(dataset.matrix()),
        CorrelationFamily::Spearman => spearman_corr(dataset.matrix()),
        CorrelationFamily::GaussianCopula => gaussian_copula_corr(dataset.matrix()),
        CorrelationFamily::Polychoric => mixed_corr(dataset.matrix(), &dataset.schema().kinds),
    };
    out.map_err(|e| describe(e, dataset.names()))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Ok(Box::new(f))
        }
        None => Ok(Box::new(io::stdout())),
    }
}

fn warn_matrix_flags(m: &CorrelationMatrix, names: &[String]) {
    if m.repaired() {
        eprintln!("warning: estimate was not positive definite; eigenvalue repair applied");
    }
    for &(i, j) in m.clamped() {
        let a = names.get(i).cloned().unwrap_or_else(|| format!("var{i}"));
        let b = names.get(j).cloned().unwrap_or_else(|| format!("var{j}"));
        eprintln!("warning: correlation of ({a}, {b}) clamped to the ±0.999 boundary");
    }
}

fn cmd_corr(args: CorrArgs) -> Result<()> {
    let method = CorrelationFamily::parse(&args.method)?;
    let dataset = load_dataset(&args.data)?;
    let mut matrix = estimate(method, &dataset)?;
    if let Some(floor) = args.pd_floor {
        if !(floor > 0.0 && floor.is_finite()) {
            bail!("--pd-floor must be a positive number");
        }
        matrix = matrix.repair_with_floor(floor)?;
    }
    warn_matrix_flags(&matrix, dataset.names());
    let mut out = open_output(&args.io.out)?;
    if args.io.json {
        let doc = MatrixDoc::from_matrix(&matrix, dataset.names());
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
    } else {
        write_matrix_csv(&matrix, dataset.names(), &mut out)?;
    }
    Ok(())
}

/// Side-by-side rank table: one row per variable chosen by any method, in
/// order of first appearance scanning methods left to right by rank.
#[derive(Serialize)]
struct RankTableRow {
    column: String,
    pearson: Option<usize>,
    spearman: Option<usize>,
    copula: Option<usize>,
    polychoric: Option<usize>,
}

fn rank_table(
    results: &[(CorrelationFamily, SelectionResult)],
    names: &[String],
) -> Vec<RankTableRow> {
    let mut order: Vec<usize> = Vec::new();
    for (_, res) in results {
        for &j in &res.chosen {
            if !order.contains(&j) {
                order.push(j);
            }
        }
    }
    order
        .into_iter()
        .map(|j| {
            let rank_of = |family: CorrelationFamily| -> Option<usize> {
                results
                    .iter()
                    .find(|(f, _)| *f == family)
                    .and_then(|(_, res)| res.chosen.iter().position(|&c| c == j))
                    .map(|pos| pos + 1)
            };
            RankTableRow {
                column: names.get(j).cloned().unwrap_or_else(|| format!("var{j}")),
                pearson: rank_of(CorrelationFamily::Pearson),
                spearman: rank_of(CorrelationFamily::Spearman),
                copula: rank_of(CorrelationFamily::GaussianCopula),
                polychoric: rank_of(CorrelationFamily::Polychoric),
            }
        })
        .collect()
}

fn cmd_select(args: SelectArgs) -> Result<()> {
    let family = parse_family(&args.family)?;
    if !(args.pd_floor > 0.0 && args.pd_floor.is_finite()) {
        bail!("--pd-floor must be a positive number");
    }
    let dataset = load_dataset(&args.data)?;
    if args.q < 1 || args.q >= dataset.p() {
        bail!("--q must satisfy 1 <= q < p = {}", dataset.p());
    }

    let methods: Vec<CorrelationFamily> = if args.all_methods {
        let has_ordinal = dataset.schema().kinds.iter().any(|k| k.is_ordinal());
        CorrelationFamily::ALL
            .into_iter()
            .filter(|m| *m != CorrelationFamily::Polychoric || has_ordinal)
            .collect()
    } else {
        let name = args
            .method
            .as_deref()
            .ok_or_else(|| anyhow!("pass --method or --all-methods"))?;
        vec![CorrelationFamily::parse(name)?]
    };

    let mut results = Vec::new();
    for method in methods {
        let est = estimate(method, &dataset)?;
        let est = est.repair_with_floor(args.pd_floor)?;
        warn_matrix_flags(&est, dataset.names());
        let res = greedy_select(&est, args.q, family).map_err(|e| describe(e, dataset.names()))?;
        results.push((method, res));
    }

    let mut out = open_output(&args.io.out)?;
    if args.all_methods {
        let table = rank_table(&results, dataset.names());
        if args.io.json {
            write_records_json(&table, &mut out)?;
            writeln!(out)?;
        } else {
            write_records_csv(&table, &mut out)?;
        }
    } else {
        let records = selection_records(&results[0].1, dataset.names());
        if args.io.json {
            write_records_json(&records, &mut out)?;
            writeln!(out)?;
        } else {
            write_records_csv(&records, &mut out)?;
        }
    }
    Ok(())
}

fn parse_methods(values: &[String], transform: TransformKind) -> Result<Vec<CorrelationFamily>> {
    if values.is_empty() {
        let mut methods = vec![
            CorrelationFamily::Pearson,
            CorrelationFamily::Spearman,
            CorrelationFamily::GaussianCopula,
        ];
        if transform == TransformKind::Ordinal {
            methods.push(CorrelationFamily::Polychoric);
        }
        return Ok(methods);
    }
    values.iter().map(|v| Ok(CorrelationFamily::parse(v)?)).collect()
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let seed = args
        .seed
        .ok_or_else(|| anyhow!("--seed is required: simulation runs must be reproducible"))?;
    if args.replicates < 1 {
        bail!("--replicates must be at least 1");
    }

    let scenarios: Vec<Scenario> = if let Some(figure) = &args.figure {
        figure_scenarios(figure, args.replicates, seed)
            .map_err(|_| anyhow!("unknown figure {figure:?}; expected 1, 2, 3, A1, or A2"))?
    } else {
        let transform = TransformKind::parse(&args.transform)?;
        let targets = TransformTargets::parse(&args.targets)?;
        let latent = parse_family(&args.family)?;
        let methods = parse_methods(&args.methods, transform)?;
        let n_grid = if args.n_grid.is_empty() { vec![500] } else { args.n_grid.clone() };
        let q_grid = if args.q_grid.is_empty() { vec![5] } else { args.q_grid.clone() };
        let mut cells = Vec::new();
        let mut index = 0u64;
        for &n in &n_grid {
            for &q in &q_grid {
                cells.push(Scenario {
                    p: args.p,
                    q,
                    n,
                    latent,
                    transform,
                    transform_targets: targets,
                    methods: methods.clone(),
                    replicates: args.replicates,
                    seed: seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
                });
                index += 1;
            }
        }
        cells
    };

    let mut rows: Vec<TidyRecord> = Vec::new();
    for scenario in &scenarios {
        let result = run_scenario(scenario)?;
        rows.extend(result.tidy_records());
    }

    let mut out = open_output(&args.io.out)?;
    if args.io.json {
        write_records_json(&rows, &mut out)?;
        writeln!(out)?;
    } else {
        write_records_csv(&rows, &mut out)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReeReport {
    ree: f64,
    residual_trace_set: f64,
    residual_trace_set_star: f64,
    q: usize,
    family: String,
}

fn cmd_ree(args: ReeArgs) -> Result<()> {
    let family = parse_family(&args.family)?;
    if args.set.is_empty() || args.set_star.is_empty() {
        bail!("pass --set and --set-star as comma-separated index lists");
    }
    let matrix = match (&args.matrix, &args.input) {
        (Some(path), None) => read_matrix_csv(path)?.1,
        (None, Some(input)) => {
            let data = DataArgs {
                input: input.clone(),
                schema: args.schema.clone(),
                max_levels: args.max_levels,
            };
            let dataset = load_dataset(&data)?;
            let method = CorrelationFamily::parse(
                args.method.as_deref().ok_or_else(|| anyhow!("--input requires --method"))?,
            )?;
            estimate(method, &dataset)?
        }
        _ => bail!("pass exactly one of --matrix or --input"),
    };
    let matrix = if matrix.smallest_eigenvalue() <= 0.0 {
        eprintln!("warning: matrix is not positive definite; eigenvalue repair applied");
        matrix.repair_with_floor(args.pd_floor)?
    } else {
        matrix
    };

    let value = ree(matrix.values(), &args.set, &args.set_star, family)?;
    let factor = family.factor().powi(args.set.len() as i32);
    let trace_s = factor
        * pva_core::cond_cov_subset(matrix.values(), &args.set, LatentFamily::Gaussian)?.trace();
    let trace_star = factor
        * pva_core::cond_cov_subset(matrix.values(), &args.set_star, LatentFamily::Gaussian)?
            .trace();

    let report = ReeReport {
        ree: value,
        residual_trace_set: trace_s,
        residual_trace_set_star: trace_star,
        q: args.set.len(),
        family: family.label().to_string(),
    };
    let mut out = open_output(&args.io.out)?;
    if args.io.json {
        write_records_json(&[report], &mut out)?;
        writeln!(out)?;
    } else {
        write_records_csv(&[report], &mut out)?;
    }
    Ok(())
}
