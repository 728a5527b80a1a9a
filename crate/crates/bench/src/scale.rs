//! Per-dimension feature scaling fitted on the training split.

use std::fmt;
use std::str::FromStr;

use ghn::LabeledPoint;
use serde::Serialize;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalerKind {
    #[default]
    Standard,
    MinMax,
    None,
}

impl ScalerKind {
    pub fn name(self) -> &'static str {
        match self {
            ScalerKind::Standard => "standard",
            ScalerKind::MinMax => "minmax",
            ScalerKind::None => "none",
        }
    }
}

impl fmt::Display for ScalerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScalerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "zscore" => Ok(ScalerKind::Standard),
            "minmax" => Ok(ScalerKind::MinMax),
            "none" => Ok(ScalerKind::None),
            other => Err(format!("unknown scaler '{other}'")),
        }
    }
}

/// Affine map per dimension: `x' = (x - shift) / scale + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    kind: ScalerKind,
    shift: Vec<f64>,
    scale: Vec<f64>,
    offset: Vec<f64>,
}

impl Scaler {
    pub fn kind(&self) -> ScalerKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(j, &v)| (v - self.shift[j]) / self.scale[j] + self.offset[j])
            .collect()
    }

    pub fn inverse(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(j, &v)| (v - self.offset[j]) * self.scale[j] + self.shift[j])
            .collect()
    }
}

pub fn fit_scaler(train: &[LabeledPoint], kind: ScalerKind) -> Result<Scaler, BenchError> {
    let first = train.first().ok_or(BenchError::EmptyTrain)?;
    let d = first.coords.len();
    let n = train.len() as f64;
    let identity = Scaler {
        kind,
        shift: vec![0.0; d],
        scale: vec![1.0; d],
        offset: vec![0.0; d],
    };
    let column = |j: usize| train.iter().map(move |p| p.coords[j]);
    Ok(match kind {
        ScalerKind::None => identity,
        ScalerKind::Standard => {
            let mut s = identity;
            for j in 0..d {
                let mean = column(j).sum::<f64>() / n;
                let var = column(j).map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                let std = var.sqrt();
                // zero spread: leave that dimension untouched
                if std > 0.0 {
                    s.shift[j] = mean;
                    s.scale[j] = std;
                }
            }
            s
        }
        ScalerKind::MinMax => {
            let mut s = identity;
            for j in 0..d {
                let lo = column(j).fold(f64::INFINITY, f64::min);
                let hi = column(j).fold(f64::NEG_INFINITY, f64::max);
                s.shift[j] = lo;
                if hi > lo {
                    s.scale[j] = hi - lo;
                } else {
                    s.offset[j] = 0.5;
                }
            }
            s
        }
    })
}

pub fn apply_scaler(scaler: &Scaler, points: &[LabeledPoint]) -> Vec<LabeledPoint> {
    points
        .iter()
        .map(|p| LabeledPoint::new(scaler.transform(&p.coords), p.label))
        .collect()
}
