use ghn::LabeledPoint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::BenchError;

/// Train size for `n` rows at `fraction`, rounding half away from zero.
pub fn train_size(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

/// Seeded shuffle, then the first `round(fraction * n)` rows train.
pub fn split(
    data: &[LabeledPoint],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<LabeledPoint>, Vec<LabeledPoint>), BenchError> {
    let order = split_indices(data.len(), fraction, seed)?;
    let (train, test) = order.split_at(train_size(data.len(), fraction));
    let pick = |ids: &[usize]| ids.iter().map(|&i| data[i].clone()).collect();
    Ok((pick(train), pick(test)))
}

/// Shuffled row indices; the first `train_size` of them form the train side.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>, BenchError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(BenchError::BadFraction(fraction));
    }
    let train = train_size(n, fraction);
    if train == 0 || train == n {
        return Err(BenchError::DegenerateSplit { n, fraction });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(order)
}
