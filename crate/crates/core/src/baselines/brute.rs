use crate::buffer::{Neighbor, NeighborBuffer};
use crate::error::Result;
use crate::metric::MetricKind;
use crate::point::Dataset;

/// Linear scan over the whole training set.
#[derive(Debug, Clone)]
pub struct BruteIndex {
    data: Dataset,
    metric: MetricKind,
}

impl BruteIndex {
    pub fn new(data: Dataset, metric: MetricKind) -> Self {
        Self { data, metric }
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    /// Exact k nearest, ascending by `(distance, point_index)`.
    pub fn knn(&self, q: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        self.data.check_query(q)?;
        self.data.check_k(k)?;
        let mut buffer = NeighborBuffer::new(k);
        for p in self.data.iter() {
            buffer.push(Neighbor::new(self.metric.surrogate(q, p.coords), p.index, p.label));
        }
        Ok(super::finish(buffer, self.metric))
    }
}

pub fn brute_knn(index: &BruteIndex, q: &[f64], k: usize) -> Result<Vec<Neighbor>> {
    index.knn(q, k)
}
