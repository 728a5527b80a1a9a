//! Report structure and its JSON / CSV / markdown renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use ghn::QueryStats;
use serde::Serialize;

use crate::run::Algo;
use crate::scale::ScalerKind;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub rows: Vec<AlgoRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub dataset: String,
    pub task: String,
    pub n: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub d: usize,
    pub k: usize,
    pub seed: u64,
    pub split: f64,
    pub mode: String,
    pub scale: ScalerKind,
    pub metric: String,
    pub repeats: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgoRow {
    pub algo: Algo,
    pub accuracy: Option<f64>,
    pub rmse: Option<f64>,
    /// recall@k against brute force, in `[0, 1]`.
    pub recall: f64,
    /// Mean query work; GHN only.
    pub stats: Option<MeanStats>,
    /// Wall-clock figures, the only non-deterministic part of a report.
    pub timing: Timing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStats {
    pub layers_visited: f64,
    pub cells_visited: f64,
    pub nonempty_cells: f64,
    pub points_scanned: f64,
}

impl MeanStats {
    pub fn of(stats: &[QueryStats]) -> Self {
        let n = stats.len().max(1) as f64;
        let mean = |f: fn(&QueryStats) -> u64| stats.iter().map(|s| f(s) as f64).sum::<f64>() / n;
        Self {
            layers_visited: mean(|s| s.layers_visited),
            cells_visited: mean(|s| s.cells_visited),
            nonempty_cells: mean(|s| s.nonempty_cells),
            points_scanned: mean(|s| s.points_scanned),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub build_ms: f64,
    /// Median over repeats of the time to predict the whole test set.
    pub total_ms: f64,
    pub mean_query_us: f64,
}

impl BenchReport {
    pub fn row(&self, algo: Algo) -> Option<&AlgoRow> {
        self.rows.iter().find(|r| r.algo == algo)
    }

    /// The report as JSON with every `timing` object removed.
    pub fn without_timing(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        strip_timing(&mut v);
        v
    }
}

/// Removes `timing` keys from each row of a parsed JSON report.
pub fn strip_timing(report: &mut serde_json::Value) {
    if let Some(rows) = report.get_mut("rows").and_then(|r| r.as_array_mut()) {
        for row in rows {
            if let Some(obj) = row.as_object_mut() {
                obj.remove("timing");
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format '{other}'")),
        }
    }
}

const COLUMNS: [&str; 11] = [
    "algo",
    "accuracy",
    "rmse",
    "recall",
    "layers_visited",
    "cells_visited",
    "nonempty_cells",
    "points_scanned",
    "build_ms",
    "total_ms",
    "mean_query_us",
];

fn cells(row: &AlgoRow) -> Vec<String> {
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.4}"));
    let st = row.stats;
    vec![
        row.algo.name().to_string(),
        opt(row.accuracy),
        opt(row.rmse),
        format!("{:.4}", row.recall),
        opt(st.map(|s| s.layers_visited)),
        opt(st.map(|s| s.cells_visited)),
        opt(st.map(|s| s.nonempty_cells)),
        opt(st.map(|s| s.points_scanned)),
        format!("{:.3}", row.timing.build_ms),
        format!("{:.3}", row.timing.total_ms),
        format!("{:.3}", row.timing.mean_query_us),
    ]
}

pub fn render(report: &BenchReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS).expect("in-memory write");
            for row in &report.rows {
                w.write_record(cells(row)).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        ReportFormat::Markdown => markdown(report),
    }
}

fn markdown(report: &BenchReport) -> String {
    let m = &report.metadata;
    let mut out = format!(
        "dataset `{}` ({}): n={} (train {}, test {}), d={}, k={}, mode={}, scale={}, metric={}, seed={}\n\n",
        m.dataset, m.task, m.n, m.n_train, m.n_test, m.d, m.k, m.mode, m.scale, m.metric, m.seed
    );
    let body: Vec<Vec<String>> = report.rows.iter().map(cells).collect();
    let widths: Vec<usize> = (0..COLUMNS.len())
        .map(|c| body.iter().map(|r| r[c].len()).chain([COLUMNS[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |vals: Vec<String>, out: &mut String| {
        out.push('|');
        for (c, v) in vals.iter().enumerate() {
            // text left, numbers right
            if c == 0 {
                let _ = write!(out, " {v:<w$} |", w = widths[c]);
            } else {
                let _ = write!(out, " {v:>w$} |", w = widths[c]);
            }
        }
        out.push('\n');
    };
    line(COLUMNS.iter().map(|s| s.to_string()).collect(), &mut out);
    let rule = widths
        .iter()
        .enumerate()
        .map(|(c, &w)| if c == 0 { format!(":{}", "-".repeat(w - 1)) } else { format!("{}:", "-".repeat(w - 1)) })
        .collect();
    line(rule, &mut out);
    for r in body {
        line(r, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BenchReport {
        BenchReport {
            schema_version: SCHEMA_VERSION,
            metadata: Metadata {
                dataset: "d.csv".into(),
                task: "classification".into(),
                n: 10,
                n_train: 8,
                n_test: 2,
                d: 2,
                k: 3,
                seed: 1,
                split: 0.8,
                mode: "heuristic".into(),
                scale: ScalerKind::Standard,
                metric: "euclidean".into(),
                repeats: 1,
                classes: Some(2),
            },
            rows: vec![
                AlgoRow {
                    algo: Algo::Ghn,
                    accuracy: Some(0.5),
                    rmse: None,
                    recall: 1.0,
                    stats: Some(MeanStats::of(&[QueryStats {
                        layers_visited: 1,
                        cells_visited: 9,
                        nonempty_cells: 3,
                        points_scanned: 4,
                    }])),
                    timing: Timing {
                        build_ms: 0.1,
                        total_ms: 0.2,
                        mean_query_us: 100.0,
                    },
                },
                AlgoRow {
                    algo: Algo::Brute,
                    accuracy: Some(1.0),
                    rmse: None,
                    recall: 1.0,
                    stats: None,
                    timing: Timing {
                        build_ms: 0.0,
                        total_ms: 0.3,
                        mean_query_us: 150.0,
                    },
                },
            ],
        }
    }

    #[test]
    fn json_has_schema_version_and_strippable_timing() {
        let r = sample();
        let v: serde_json::Value = serde_json::from_str(&render(&r, ReportFormat::Json)).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["rows"][0]["algo"], "ghn");
        assert_eq!(v["rows"][0]["stats"]["points_scanned"], 4.0);
        assert!(v["rows"][1]["stats"].is_null());
        let mut slower = r.clone();
        slower.rows[0].timing.total_ms = 99.0;
        assert_ne!(slower, r);
        assert_eq!(slower.without_timing(), r.without_timing());
        assert!(r.without_timing()["rows"][0].get("timing").is_none());
    }

    #[test]
    fn csv_and_markdown_agree_on_columns() {
        let r = sample();
        let csv = render(&r, ReportFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].split(',').count(), COLUMNS.len());
        assert!(lines[2].starts_with("brute,1.0000,,1.0000,,,,,"));
        let md = render(&r, ReportFormat::Markdown);
        let table: Vec<&str> = md.lines().filter(|l| l.starts_with('|')).collect();
        assert_eq!(table.len(), 4);
        let width = table[0].len();
        assert!(table.iter().all(|l| l.len() == width), "{md}");
    }

    #[test]
    fn parse_formats() {
        assert_eq!("md".parse::<ReportFormat>().unwrap(), ReportFormat::Markdown);
        assert_eq!("JSON".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
