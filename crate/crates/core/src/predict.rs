//! Predictions from selected neighbors.

use std::cmp::Ordering;
use std::str::FromStr;

use rustc_hash::FxHashMap;

use crate::buffer::Neighbor;
use crate::error::{Error, Result};
use crate::point::Label;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: Label,
    /// Share of neighbors voting for `value`; `None` for regression.
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregate {
    #[default]
    Mean,
    Median,
}

impl FromStr for Aggregate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Aggregate::Mean),
            "median" => Ok(Aggregate::Median),
            other => Err(format!("unknown aggregate '{other}'")),
        }
    }
}

/// Majority vote. Ties go to the label whose nearest member ranks first by
/// `(distance, point_index)`.
pub fn classify(neighbors: &[Neighbor]) -> Result<Prediction> {
    if neighbors.is_empty() {
        return Err(Error::NoNeighbors);
    }
    // label -> (votes, nearest member)
    let mut tally: FxHashMap<u32, (usize, &Neighbor)> = FxHashMap::default();
    for n in neighbors {
        let class = n.label.class().ok_or(Error::LabelKind {
            expected: "class",
        })?;
        let entry = tally.entry(class).or_insert((0, n));
        entry.0 += 1;
        if n.rank_cmp(entry.1) == Ordering::Less {
            entry.1 = n;
        }
    }
    let (class, (votes, _)) = tally
        .into_iter()
        .max_by(|a, b| {
            let (va, na) = a.1;
            let (vb, nb) = b.1;
            va.cmp(&vb).then_with(|| nb.rank_cmp(na))
        })
        .expect("non-empty tally");
    Ok(Prediction {
        value: Label::Class(class),
        confidence: Some(votes as f64 / neighbors.len() as f64),
    })
}

/// Mean or median of the neighbors' targets. An even count takes the
/// midpoint of the two central values.
pub fn regress(neighbors: &[Neighbor], agg: Aggregate) -> Result<Prediction> {
    if neighbors.is_empty() {
        return Err(Error::NoNeighbors);
    }
    let mut targets = neighbors
        .iter()
        .map(|n| n.label.target().ok_or(Error::LabelKind { expected: "target" }))
        .collect::<Result<Vec<f64>>>()?;
    let value = match agg {
        Aggregate::Mean => targets.iter().sum::<f64>() / targets.len() as f64,
        Aggregate::Median => {
            targets.sort_by(f64::total_cmp);
            let mid = targets.len() / 2;
            if targets.len() % 2 == 1 {
                targets[mid]
            } else {
                (targets[mid - 1] + targets[mid]) / 2.0
            }
        }
    };
    Ok(Prediction {
        value: Label::Target(value),
        confidence: None,
    })
}
