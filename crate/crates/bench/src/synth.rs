//! Seeded synthetic datasets.

use ghn::{Label, LabeledPoint};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Isotropic Gaussian blobs with centers drawn uniformly from `[0, 10]^d`.
/// Each point is labeled with its blob.
pub fn gaussian_clusters(n: usize, d: usize, clusters: usize, sigma: f64, seed: u64) -> Vec<LabeledPoint> {
    assert!(clusters > 0, "need at least one cluster");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..d).map(|_| rng.random_range(0.0..10.0)).collect())
        .collect();
    let noise = Normal::new(0.0, sigma).expect("sigma must be finite and non-negative");
    (0..n)
        .map(|_| {
            let c = rng.random_range(0..clusters);
            let coords = centers[c].iter().map(|&m| m + noise.sample(&mut rng)).collect();
            LabeledPoint::new(coords, Label::Class(c as u32))
        })
        .collect()
}

/// Uniform in `[0, 10]^d`, labeled by which side of the main diagonal's
/// midpoint hyperplane the point falls on.
pub fn uniform(n: usize, d: usize, seed: u64) -> Vec<LabeledPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let coords: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..10.0)).collect();
            let side = coords.iter().sum::<f64>() > 5.0 * d as f64;
            LabeledPoint::new(coords, Label::Class(side as u32))
        })
        .collect()
}

/// Uniform points inside axis-aligned boxes `center ± half_width`, each box
/// drawn with equal probability; labels name the box.
pub fn uniform_boxes(n: usize, centers: &[Vec<f64>], half_width: f64, seed: u64) -> Vec<LabeledPoint> {
    assert!(!centers.is_empty(), "need at least one box");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let c = rng.random_range(0..centers.len());
            let coords = centers[c]
                .iter()
                .map(|&m| rng.random_range(m - half_width..m + half_width))
                .collect();
            LabeledPoint::new(coords, Label::Class(c as u32))
        })
        .collect()
}

/// Query points: half jittered copies of rows from `data`, half uniform in
/// the data's bounding box widened by 10%.
pub fn queries(data: &[LabeledPoint], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = data[0].coords.len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in data {
        for (j, &v) in p.coords.iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                let base = &data[rng.random_range(0..data.len())].coords;
                base.iter().enumerate().map(|(j, &v)| v + 0.01 * (hi[j] - lo[j]) * rng.random_range(-1.0..1.0)).collect()
            } else {
                (0..d)
                    .map(|j| {
                        let pad = 0.1 * (hi[j] - lo[j]);
                        if pad > 0.0 {
                            rng.random_range(lo[j] - pad..hi[j] + pad)
                        } else {
                            lo[j]
                        }
                    })
                    .collect()
            }
        })
        .collect()
}
