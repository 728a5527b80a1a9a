//! Bounded top-k buffer shared by every search strategy.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::point::Label;

/// A selected training point and its distance to the query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub distance: f64,
    pub point_index: usize,
    pub label: Label,
}

impl Neighbor {
    pub fn new(distance: f64, point_index: usize, label: Label) -> Self {
        Self {
            distance,
            point_index,
            label,
        }
    }

    /// Total order by `(distance, point_index)`; the index breaks ties.
    #[inline]
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.point_index.cmp(&other.point_index))
    }
}

#[derive(Debug, Clone, Copy)]
struct Ranked(Neighbor);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.rank_cmp(&other.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushOutcome {
    Accepted,
    Rejected,
}

impl PushOutcome {
    pub fn is_accepted(self) -> bool {
        self == PushOutcome::Accepted
    }
}

/// Max-heap holding at most `capacity` neighbors: the smallest ones pushed
/// so far under `(distance, point_index)` order.
#[derive(Debug, Clone)]
pub struct NeighborBuffer {
    capacity: usize,
    heap: BinaryHeap<Ranked>,
}

impl NeighborBuffer {
    /// # Panics
    /// If `capacity` is zero.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "neighbor buffer capacity must be at least 1");
        Self {
            capacity,
            heap: BinaryHeap::with_capacity(capacity + 1),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.heap.len() >= self.capacity
    }

    /// The current k-th best entry once the buffer holds anything.
    pub fn worst(&self) -> Option<&Neighbor> {
        self.heap.peek().map(|r| &r.0)
    }

    /// Inserts `cand` if the buffer has room or `cand` ranks below the
    /// current maximum. `Accepted` means the held set changed.
    #[inline]
    pub fn push(&mut self, cand: Neighbor) -> PushOutcome {
        if self.heap.len() < self.capacity {
            self.heap.push(Ranked(cand));
            return PushOutcome::Accepted;
        }
        let mut top = self.heap.peek_mut().expect("capacity is at least 1");
        if cand.rank_cmp(&top.0) == Ordering::Less {
            *top = Ranked(cand);
            PushOutcome::Accepted
        } else {
            PushOutcome::Rejected
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Neighbor> {
        self.heap.iter().map(|r| &r.0)
    }

    /// Entries sorted ascending by `(distance, point_index)`.
    pub fn into_sorted_vec(self) -> Vec<Neighbor> {
        self.heap.into_sorted_vec().into_iter().map(|r| r.0).collect()
    }
}
