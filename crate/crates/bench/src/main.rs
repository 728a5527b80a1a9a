use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ghn::{Aggregate, MetricKind, StopMode};
use ghn_bench::{parse_algos, render, run_bench, Algo, BenchConfig, DatasetSpec, LabelColumn, ReportFormat, ScalerKind, Task};

/// Benchmark GHN against brute force and a kd-tree on a CSV dataset.
#[derive(Debug, Parser)]
#[command(name = "bench", version)]
struct Args {
    /// CSV file to load.
    #[arg(long)]
    dataset: PathBuf,

    /// Label column, by header name or zero-based index.
    #[arg(long = "label-col")]
    label_col: LabelColumn,

    /// cls or reg.
    #[arg(long, default_value = "cls")]
    task: Task,

    #[arg(long, default_value_t = 3)]
    k: usize,

    /// Comma-separated subset of ghn, brute, kdtree.
    #[arg(long, default_value = "ghn,brute,kdtree", value_parser = parse_algos)]
    algos: std::vec::Vec<Algo>,

    /// heuristic or guaranteed stopping for GHN.
    #[arg(long, default_value = "heuristic")]
    mode: StopMode,

    /// standard, minmax or none.
    #[arg(long, default_value = "standard")]
    scale: ScalerKind,

    /// Training fraction.
    #[arg(long, default_value_t = 0.8)]
    split: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Timing repeats; the median is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,

    /// json, csv or md.
    #[arg(long, default_value = "json")]
    report: ReportFormat,

    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Treat the first row as data.
    #[arg(long)]
    no_header: bool,

    /// Field separator (a single ASCII character).
    #[arg(long, default_value_t = ',')]
    delimiter: char,

    /// Regression aggregate: mean or median.
    #[arg(long, default_value = "mean")]
    agg: Aggregate,

    /// euclidean, manhattan or chebyshev.
    #[arg(long, default_value = "euclidean")]
    metric: MetricKind,

    /// Write per-row predictions as CSV.
    #[arg(long)]
    dump_predictions: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), Box<dyn std::error::Error>> {
    let mut spec = DatasetSpec::new(&args.dataset, args.label_col, args.task);
    spec.has_header = !args.no_header;
    if !args.delimiter.is_ascii() {
        return Err(format!("delimiter '{}' is not ASCII", args.delimiter).into());
    }
    spec.delimiter = args.delimiter as u8;
    let cfg = BenchConfig {
        algos: args.algos,
        k: args.k,
        mode: args.mode,
        scale: args.scale,
        split: args.split,
        seed: args.seed,
        repeats: args.repeats,
        agg: args.agg,
        metric: args.metric,
        ..BenchConfig::default()
    };
    let outcome = run_bench(&spec, &cfg)?;
    let text = render(&outcome.report, args.report);
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if let Some(path) = &args.dump_predictions {
        outcome.predictions.write_csv(fs::File::create(path)?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::FAILURE
        }
    }
}
