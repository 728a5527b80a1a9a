//! Exact comparators for the grid index.

mod brute;
mod kdtree;

pub use brute::{brute_knn, BruteIndex};
pub use kdtree::{KdTree, DEFAULT_LEAF_SIZE};

use crate::buffer::Neighbor;
use crate::metric::MetricKind;

pub(crate) fn finish(buffer: crate::buffer::NeighborBuffer, metric: MetricKind) -> Vec<Neighbor> {
    let mut out = buffer.into_sorted_vec();
    for n in &mut out {
        n.distance = metric.to_distance(n.distance);
    }
    out
}
