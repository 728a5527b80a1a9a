#![allow(dead_code)]

use ghn::{Dataset, Label, LabeledPoint, MetricKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(n: usize, d: usize, seed: u64) -> Vec<LabeledPoint> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let c = (0..d).map(|_| r.random_range(0.0..10.0)).collect();
            LabeledPoint::new(c, Label::Class(r.random_range(0..3)))
        })
        .collect()
}

pub fn clustered(n: usize, d: usize, clusters: usize, seed: u64) -> Vec<LabeledPoint> {
    let mut r = rng(seed);
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..d).map(|_| r.random_range(0.0..10.0)).collect())
        .collect();
    let noise = Normal::new(0.0, 0.6).unwrap();
    (0..n)
        .map(|_| {
            let c = r.random_range(0..clusters);
            let coords = centers[c].iter().map(|m| m + noise.sample(&mut r)).collect();
            LabeledPoint::new(coords, Label::Class(c as u32))
        })
        .collect()
}

pub fn dataset(points: &[LabeledPoint]) -> Dataset {
    Dataset::new(points.iter().cloned()).unwrap()
}

/// Exact answer by sorting every training point.
pub fn sorted_oracle(points: &[LabeledPoint], q: &[f64], k: usize, metric: MetricKind) -> Vec<(f64, usize)> {
    let mut all: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (metric.distance(q, &p.coords).unwrap(), i))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.truncate(k);
    all
}

pub fn keys(neighbors: &[ghn::Neighbor]) -> Vec<(f64, usize)> {
    neighbors.iter().map(|n| (n.distance, n.point_index)).collect()
}

/// Queries near training points plus some in the padded bounding box.
pub fn queries(points: &[LabeledPoint], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let d = points[0].coords.len();
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                let p = &points[r.random_range(0..points.len())];
                p.coords.iter().map(|v| v + r.random_range(-0.3..0.3)).collect()
            } else {
                (0..d).map(|_| r.random_range(-2.0..12.0)).collect()
            }
        })
        .collect()
}
