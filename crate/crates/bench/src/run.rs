//! Build, time and score each algorithm on one train/test split.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use ghn::{
    classify, regress, Aggregate, BruteIndex, Dataset, GridConfig, GridIndex, KdTree, Label, LabeledPoint,
    MetricKind, Neighbor, QueryStats, StopMode,
};
use serde::Serialize;

use crate::dataset::{load_csv, DatasetSpec, Task};
use crate::report::{AlgoRow, BenchReport, MeanStats, Metadata, Timing, SCHEMA_VERSION};
use crate::scale::{apply_scaler, fit_scaler, ScalerKind};
use crate::split::split;
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Ghn,
    Brute,
    KdTree,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Ghn, Algo::Brute, Algo::KdTree];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Ghn => "ghn",
            Algo::Brute => "brute",
            Algo::KdTree => "kdtree",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ghn" | "grid" => Ok(Algo::Ghn),
            "brute" | "knn" => Ok(Algo::Brute),
            "kdtree" | "kd" => Ok(Algo::KdTree),
            other => Err(format!("unknown algorithm '{other}' (expected ghn, brute or kdtree)")),
        }
    }
}

/// Parses a comma-separated list, dropping repeats but keeping order.
pub fn parse_algos(s: &str) -> Result<Vec<Algo>, String> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let a: Algo = part.parse()?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err("no algorithms given".into());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algos: Vec<Algo>,
    pub k: usize,
    pub mode: StopMode,
    pub scale: ScalerKind,
    pub split: f64,
    pub seed: u64,
    pub repeats: usize,
    pub agg: Aggregate,
    pub metric: MetricKind,
    pub leaf_size: usize,
    pub max_splits: Option<u64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            algos: Algo::ALL.to_vec(),
            k: 3,
            mode: StopMode::Heuristic,
            scale: ScalerKind::Standard,
            split: 0.8,
            seed: 0,
            repeats: 3,
            agg: Aggregate::Mean,
            metric: MetricKind::Euclidean,
            leaf_size: ghn::baselines::DEFAULT_LEAF_SIZE,
            max_splits: None,
        }
    }
}

/// Per-row predictions, class ids or targets as `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub truth: Vec<f64>,
    pub by_algo: Vec<(Algo, Vec<f64>)>,
}

impl Predictions {
    pub fn of(&self, algo: Algo) -> Option<&[f64]> {
        self.by_algo.iter().find(|(a, _)| *a == algo).map(|(_, v)| v.as_slice())
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["row".to_string(), "truth".to_string()];
        header.extend(self.by_algo.iter().map(|(a, _)| a.name().to_string()));
        out.write_record(&header)?;
        for (i, t) in self.truth.iter().enumerate() {
            let mut rec = vec![i.to_string(), t.to_string()];
            rec.extend(self.by_algo.iter().map(|(_, v)| v[i].to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub report: BenchReport,
    pub predictions: Predictions,
}

enum Built {
    Ghn(GridIndex),
    Brute(BruteIndex),
    Kd(KdTree),
}

impl Built {
    fn build(algo: Algo, data: Dataset, cfg: &BenchConfig) -> Result<Self, BenchError> {
        Ok(match algo {
            Algo::Ghn => {
                let grid = GridConfig {
                    max_splits: cfg.max_splits,
                };
                Built::Ghn(GridIndex::build_with(data, cfg.metric, &grid)?)
            }
            Algo::Brute => Built::Brute(BruteIndex::new(data, cfg.metric)),
            Algo::KdTree => Built::Kd(KdTree::with_leaf_size(data, cfg.metric, cfg.leaf_size)?),
        })
    }

    fn query(&self, q: &[f64], k: usize, mode: StopMode) -> ghn::Result<(Vec<Neighbor>, Option<QueryStats>)> {
        match self {
            Built::Ghn(g) => g.knn(q, k, mode).map(|(n, s)| (n, Some(s))),
            Built::Brute(b) => b.knn(q, k).map(|n| (n, None)),
            Built::Kd(t) => t.knn(q, k).map(|n| (n, None)),
        }
    }
}

fn predict(neighbors: &[Neighbor], task: Task, agg: Aggregate) -> ghn::Result<f64> {
    let p = match task {
        Task::Classification => classify(neighbors)?,
        Task::Regression => regress(neighbors, agg)?,
    };
    Ok(p.value.as_f64())
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Fraction of the exact neighbor ids that `found` recovered, per query, averaged.
pub fn recall_at_k(found: &[Vec<usize>], exact: &[Vec<usize>]) -> f64 {
    if exact.is_empty() {
        return 1.0;
    }
    let total: f64 = found
        .iter()
        .zip(exact)
        .map(|(f, e)| e.iter().filter(|i| f.contains(i)).count() as f64 / e.len() as f64)
        .sum();
    total / exact.len() as f64
}

fn label_matches_task(label: Label, task: Task) -> bool {
    match task {
        Task::Classification => label.class().is_some(),
        Task::Regression => label.target().is_some(),
    }
}

/// Loads `spec`, splits, scales and runs every configured algorithm.
pub fn run_bench(spec: &DatasetSpec, cfg: &BenchConfig) -> Result<BenchOutcome, BenchError> {
    let loaded = load_csv(spec)?;
    let (train, test) = split(&loaded.points, cfg.split, cfg.seed)?;
    let name = spec.path.display().to_string();
    let mut outcome = run_bench_split(&train, &test, spec.task, cfg, &name)?;
    outcome.report.metadata.classes = (spec.task == Task::Classification).then_some(loaded.class_names.len());
    Ok(outcome)
}

/// Runs on an existing split. `cfg.split` is recorded but not applied.
pub fn run_bench_split(
    train: &[LabeledPoint],
    test: &[LabeledPoint],
    task: Task,
    cfg: &BenchConfig,
    dataset: &str,
) -> Result<BenchOutcome, BenchError> {
    if cfg.repeats == 0 {
        return Err(BenchError::NoRepeats);
    }
    if cfg.algos.is_empty() {
        return Err(BenchError::NoAlgos);
    }
    if test.is_empty() {
        return Err(BenchError::EmptyTest);
    }
    if cfg.k == 0 || cfg.k > train.len() {
        return Err(BenchError::KTooLarge {
            k: cfg.k,
            train: train.len(),
        });
    }
    if let Some(p) = train.iter().chain(test).find(|p| !label_matches_task(p.label, task)) {
        return Err(BenchError::Index(ghn::Error::LabelKind {
            expected: if p.label.class().is_some() { "target" } else { "class" },
        }));
    }

    let scaler = fit_scaler(train, cfg.scale)?;
    let train = Dataset::new(apply_scaler(&scaler, train))?;
    let test = apply_scaler(&scaler, test);
    for q in &test {
        train.check_query(&q.coords)?;
    }

    let reference = BruteIndex::new(train.clone(), cfg.metric);
    let exact: Vec<Vec<usize>> = test
        .iter()
        .map(|q| Ok(reference.knn(&q.coords, cfg.k)?.iter().map(|n| n.point_index).collect()))
        .collect::<Result<_, BenchError>>()?;

    let truth: Vec<f64> = test.iter().map(|p| p.label.as_f64()).collect();
    let mut rows = Vec::new();
    let mut by_algo = Vec::new();
    for &algo in &cfg.algos {
        let started = Instant::now();
        let built = Built::build(algo, train.clone(), cfg)?;
        let build_ms = ms(started.elapsed());

        let mut totals = Vec::with_capacity(cfg.repeats);
        let mut preds = Vec::new();
        let mut found = Vec::new();
        let mut stats = Vec::new();
        for rep in 0..cfg.repeats {
            let last = rep + 1 == cfg.repeats;
            preds.clear();
            let started = Instant::now();
            for q in &test {
                let (neighbors, st) = built.query(&q.coords, cfg.k, cfg.mode)?;
                preds.push(predict(&neighbors, task, cfg.agg)?);
                if last {
                    found.push(neighbors.iter().map(|n| n.point_index).collect::<Vec<_>>());
                    stats.extend(st);
                }
            }
            totals.push(ms(started.elapsed()));
        }
        let total_ms = median(totals);

        let (accuracy, rmse) = match task {
            Task::Classification => {
                let hits = preds.iter().zip(&truth).filter(|(p, t)| p == t).count();
                (Some(hits as f64 / truth.len() as f64), None)
            }
            Task::Regression => {
                let sse: f64 = preds.iter().zip(&truth).map(|(p, t)| (p - t) * (p - t)).sum();
                (None, Some((sse / truth.len() as f64).sqrt()))
            }
        };
        rows.push(AlgoRow {
            algo,
            accuracy,
            rmse,
            recall: recall_at_k(&found, &exact),
            stats: (!stats.is_empty()).then(|| MeanStats::of(&stats)),
            timing: Timing {
                build_ms,
                total_ms,
                mean_query_us: total_ms * 1e3 / test.len() as f64,
            },
        });
        by_algo.push((algo, preds));
    }

    let report = BenchReport {
        schema_version: SCHEMA_VERSION,
        metadata: Metadata {
            dataset: dataset.to_string(),
            task: task.name().to_string(),
            n: train.len() + test.len(),
            n_train: train.len(),
            n_test: test.len(),
            d: train.dim(),
            k: cfg.k,
            seed: cfg.seed,
            split: cfg.split,
            mode: cfg.mode.name().to_string(),
            scale: cfg.scale,
            metric: cfg.metric.name().to_string(),
            repeats: cfg.repeats,
            classes: None,
        },
        rows,
    };
    Ok(BenchOutcome {
        report,
        predictions: Predictions { truth, by_algo },
    })
}
