//! Distance metrics.
//!
//! Searches rank candidates by a *surrogate* distance that preserves the
//! ordering of the true metric (squared length for euclidean, the metric
//! itself otherwise). Reported neighbor distances are always true metric
//! values.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MetricKind {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [Self::Euclidean, Self::Manhattan, Self::Chebyshev];

    pub fn name(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::Manhattan => "manhattan",
            Self::Chebyshev => "chebyshev",
        }
    }

    /// Metric distance between `a` and `b`.
    pub fn distance(self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(self.to_distance(self.surrogate(a, b)))
    }

    /// Order-preserving surrogate of the distance. Callers guarantee equal
    /// lengths.
    #[inline]
    pub fn surrogate(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Self::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let t = x - y;
                    t * t
                })
                .sum(),
            Self::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Self::Chebyshev => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Surrogate of a distance that is realised entirely along one axis.
    /// For all supported metrics this is a lower bound on the surrogate of
    /// any pair whose coordinates differ by `delta` on some axis.
    #[inline]
    pub fn axis_surrogate(self, delta: f64) -> f64 {
        match self {
            Self::Euclidean => delta * delta,
            Self::Manhattan | Self::Chebyshev => delta.abs(),
        }
    }

    #[inline]
    pub fn to_distance(self, surrogate: f64) -> f64 {
        match self {
            Self::Euclidean => surrogate.sqrt(),
            Self::Manhattan | Self::Chebyshev => surrogate,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Self::Euclidean),
            "manhattan" | "l1" => Ok(Self::Manhattan),
            "chebyshev" | "linf" => Ok(Self::Chebyshev),
            other => Err(format!("unknown metric '{other}'")),
        }
    }
}

/// Distance between two coordinate vectors under `metric`.
pub fn distance(a: &[f64], b: &[f64], metric: MetricKind) -> Result<f64> {
    metric.distance(a, b)
}
