//! Layered exploration around the query's cell.
//!
//! Layer `l` is the set of cells at Chebyshev distance `l` from the central
//! cell in cell-id space. A query visits layer 0 (the central cell), then
//! layers 1, 2, ... pushing every point of every non-empty cell into a
//! bounded buffer, and stops after a layer according to [`StopMode`].
//!
//! Two equivalent ways of visiting a layer are used. While shells are
//! small the cells of a layer are enumerated directly and looked up in the
//! hash table. Once the enumeration would cost more than scanning the
//! table, the remaining non-empty cells are ranked by layer in a heap and
//! popped a layer at a time. Both produce the same cell set per layer and
//! the stopping rules only fire between layers, so results and stats do not
//! depend on which one ran.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::buffer::{Neighbor, NeighborBuffer};
use crate::error::{Error, Result};
use crate::grid::{chebyshev, CellId, GridIndex};

/// Number of cells on layer `l` in `d` dimensions: `(2l+1)^d - (2l-1)^d`.
/// Layer 0 is the central cell alone.
pub fn layer_cell_count(l: u64, d: usize) -> Result<u64> {
    if l == 0 {
        return Ok(1);
    }
    let overflow = || Error::CountOverflow { layer: l, dim: d };
    let exp = u32::try_from(d).map_err(|_| overflow())?;
    let outer = l
        .checked_mul(2)
        .and_then(|v| v.checked_add(1))
        .and_then(|v| v.checked_pow(exp))
        .ok_or_else(overflow)?;
    let inner = (2 * l - 1).checked_pow(exp).ok_or_else(overflow)?;
    Ok(outer - inner)
}

/// Cells on layers `1..=l`, excluding the central cell: `(2l+1)^d - 1`.
pub fn total_cell_count(l: u64, d: usize) -> Result<u64> {
    let overflow = || Error::CountOverflow { layer: l, dim: d };
    let exp = u32::try_from(d).map_err(|_| overflow())?;
    l.checked_mul(2)
        .and_then(|v| v.checked_add(1))
        .and_then(|v| v.checked_pow(exp))
        .map(|v| v - 1)
        .ok_or_else(overflow)
}

fn saturating_cube(l: u64, d: usize) -> u64 {
    let side = l.saturating_mul(2).saturating_add(1);
    (0..d).fold(1u64, |acc, _| acc.saturating_mul(side))
}

/// Enumerates the cells of one layer in lexicographic order.
///
/// Works like an odometer over offsets in `[-l, l]^d`; when no leading
/// offset sits on the boundary the last offset jumps straight from `-l`
/// to `l`, so only shell cells are ever produced.
#[derive(Debug, Clone)]
pub struct LayerCells {
    center: Vec<i64>,
    offsets: Vec<i64>,
    cell: Vec<i64>,
    layer: i64,
    started: bool,
    done: bool,
}

impl LayerCells {
    pub fn new(center: &[i64], layer: u64) -> Self {
        let layer = i64::try_from(layer).unwrap_or(i64::MAX);
        let d = center.len();
        Self {
            center: center.to_vec(),
            offsets: vec![-layer; d],
            cell: vec![0; d],
            layer,
            started: false,
            done: d == 0,
        }
    }

    pub fn layer(&self) -> u64 {
        self.layer as u64
    }

    fn prefix_on_boundary(&self) -> bool {
        let last = self.offsets.len() - 1;
        self.offsets[..last].iter().any(|o| o.abs() == self.layer)
    }

    fn advance(&mut self) -> bool {
        if self.layer == 0 {
            return false;
        }
        let last = self.offsets.len() - 1;
        if self.offsets[last] == -self.layer && !self.prefix_on_boundary() {
            self.offsets[last] = self.layer;
            return true;
        }
        let mut j = last;
        loop {
            if self.offsets[j] < self.layer {
                self.offsets[j] += 1;
                for o in &mut self.offsets[j + 1..] {
                    *o = -self.layer;
                }
                return true;
            }
            if j == 0 {
                return false;
            }
            j -= 1;
        }
    }

    /// Next cell of the layer, borrowed until the following call.
    pub fn next_cell(&mut self) -> Option<&[i64]> {
        if self.done {
            return None;
        }
        if self.started {
            if !self.advance() {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        for ((c, o), z) in self.cell.iter_mut().zip(&self.offsets).zip(&self.center) {
            *c = z.saturating_add(*o);
        }
        Some(&self.cell)
    }
}

impl Iterator for LayerCells {
    type Item = CellId;

    fn next(&mut self) -> Option<CellId> {
        self.next_cell().map(|c| CellId::new(c.to_vec()))
    }
}

/// All cells at Chebyshev distance `l` from `center`, lexicographically.
pub fn layer_cells(center: &CellId, l: u64) -> Vec<CellId> {
    LayerCells::new(center.ids(), l).collect()
}

/// When exploration stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StopMode {
    /// Stop after a layer whose points left a full buffer unchanged.
    #[default]
    Heuristic,
    /// Stop once no unvisited cell can hold anything nearer than the
    /// current k-th neighbor. Exact.
    Guaranteed,
}

impl StopMode {
    pub fn name(self) -> &'static str {
        match self {
            StopMode::Heuristic => "heuristic",
            StopMode::Guaranteed => "guaranteed",
        }
    }
}

impl std::str::FromStr for StopMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "heuristic" => Ok(StopMode::Heuristic),
            "guaranteed" | "exact" => Ok(StopMode::Guaranteed),
            other => Err(format!("unknown stop mode '{other}'")),
        }
    }
}

/// How layers are visited. Results are identical for every choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LayerStrategy {
    /// Enumerate shells while cheaper than a table scan, then switch.
    #[default]
    Auto,
    /// Always enumerate shells.
    Shell,
    /// Rank all non-empty cells by layer up front.
    TableScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QueryOptions {
    pub mode: StopMode,
    pub strategy: LayerStrategy,
}

/// Work done by one query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QueryStats {
    /// Index of the last layer explored (0 when only the central cell was).
    pub layers_visited: u64,
    /// Lattice cells covered by the explored layers, `(2L+1)^d`, saturating.
    pub cells_visited: u64,
    /// Explored cells that held at least one point.
    pub nonempty_cells: u64,
    /// Training points pushed into the buffer.
    pub points_scanned: u64,
}

/// Relative slack on the guaranteed-mode bound, covering rounding in the
/// cell hash.
const BOUND_SLACK: f64 = 1e-9;

struct Search<'a> {
    index: &'a GridIndex,
    q: &'a [f64],
    buffer: NeighborBuffer,
    stats: QueryStats,
}

impl Search<'_> {
    #[inline]
    fn scan_slot(&mut self, slot: usize) -> bool {
        let index = self.index;
        let metric = index.metric;
        let members = index.slot_members(slot);
        let mut accepted = false;
        for &m in members {
            let m = m as usize;
            let s = metric.surrogate(self.q, index.data.coords(m));
            accepted |= self
                .buffer
                .push(Neighbor::new(s, m, index.data.label(m)))
                .is_accepted();
        }
        self.stats.nonempty_cells += 1;
        self.stats.points_scanned += members.len() as u64;
        accepted
    }

    fn kth_surrogate(&self) -> Option<f64> {
        if self.buffer.is_full() {
            self.buffer.worst().map(|n| n.distance)
        } else {
            None
        }
    }

    /// Surrogate lower bound on any point outside layers `0..=l`.
    fn bound(&self, l: u64) -> f64 {
        let b = l as f64 * self.index.params.min_width() * (1.0 - BOUND_SLACK);
        self.index.metric.axis_surrogate(b)
    }

    /// Smallest layer `>= from` after which guaranteed mode may stop.
    fn first_bounded_layer(&self, from: u64, kth: f64) -> u64 {
        let w = self.index.params.min_width() * (1.0 - BOUND_SLACK);
        let radius = self.index.metric.to_distance(kth);
        let mut l = ((radius / w).floor() as u64).saturating_add(1).max(from);
        while l > from && self.bound(l - 1) > kth {
            l -= 1;
        }
        while self.bound(l) <= kth && l < u64::MAX {
            l += 1;
        }
        l
    }

    fn should_stop(&self, mode: StopMode, l: u64, accepted: bool) -> bool {
        match (mode, self.kth_surrogate()) {
            (_, None) => false,
            (StopMode::Heuristic, Some(_)) => !accepted,
            (StopMode::Guaranteed, Some(kth)) => self.bound(l) > kth,
        }
    }
}

/// k nearest training points to `q` with the default layer strategy.
pub fn knn_query(
    index: &GridIndex,
    q: &[f64],
    k: usize,
    mode: StopMode,
) -> Result<(Vec<Neighbor>, QueryStats)> {
    knn_query_with(
        index,
        q,
        k,
        &QueryOptions {
            mode,
            strategy: LayerStrategy::Auto,
        },
    )
}

pub fn knn_query_with(
    index: &GridIndex,
    q: &[f64],
    k: usize,
    options: &QueryOptions,
) -> Result<(Vec<Neighbor>, QueryStats)> {
    index.data.check_query(q)?;
    index.data.check_k(k)?;
    let d = index.dim();
    let center = index.hash(q);

    // Beyond this layer no non-empty cell exists.
    let last_layer = (0..d)
        .map(|j| {
            let c = center.ids()[j] as i128;
            let below = c - index.cell_lo[j] as i128;
            let above = index.cell_hi[j] as i128 - c;
            below.max(above).max(0)
        })
        .max()
        .unwrap_or(0)
        .min(u64::MAX as i128) as u64;

    let mut search = Search {
        index,
        q,
        buffer: NeighborBuffer::new(k),
        stats: QueryStats::default(),
    };
    let mode = options.mode;
    let budget = index.num_cells().max(16) as u64;
    let mut shell_work = 0u64;
    let mut ranked: Option<BinaryHeap<Reverse<(u64, u32)>>> = None;
    let mut l = 0u64;

    loop {
        if ranked.is_none() {
            let use_shell = match options.strategy {
                LayerStrategy::Shell => true,
                LayerStrategy::TableScan => false,
                LayerStrategy::Auto => {
                    let size = layer_cell_count(l, d).unwrap_or(u64::MAX);
                    shell_work.saturating_add(size) <= budget
                }
            };
            if !use_shell {
                let heap: Vec<_> = (0..index.num_cells())
                    .filter_map(|slot| {
                        let layer = chebyshev(index.slot_id(slot), center.ids());
                        (layer >= l).then_some(Reverse((layer, slot as u32)))
                    })
                    .collect();
                ranked = Some(BinaryHeap::from(heap));
            }
        }

        let mut accepted = false;
        match ranked.as_mut() {
            None => {
                let mut cells = LayerCells::new(center.ids(), l);
                while let Some(cell) = cells.next_cell() {
                    shell_work += 1;
                    if let Some(&slot) = index.table.get(cell) {
                        accepted |= search.scan_slot(slot as usize);
                    }
                }
            }
            Some(heap) => {
                while let Some(&Reverse((layer, slot))) = heap.peek() {
                    if layer != l {
                        break;
                    }
                    heap.pop();
                    accepted |= search.scan_slot(slot as usize);
                }
            }
        }
        search.stats.layers_visited = l;

        if search.should_stop(mode, l, accepted) || l >= last_layer {
            break;
        }

        l = match ranked.as_ref() {
            None => l + 1,
            Some(heap) => {
                // Layers strictly between here and the next non-empty one
                // are empty: a full buffer stops on the first of them.
                let mut next = heap.peek().map_or(last_layer, |r| r.0 .0);
                if let Some(kth) = search.kth_surrogate() {
                    next = match mode {
                        StopMode::Heuristic => next.min(l + 1),
                        StopMode::Guaranteed => next.min(search.first_bounded_layer(l + 1, kth)),
                    };
                }
                next.min(last_layer).max(l + 1)
            }
        };
    }

    search.stats.cells_visited = saturating_cube(search.stats.layers_visited, d);
    let metric = index.metric;
    let stats = search.stats;
    let mut out = search.buffer.into_sorted_vec();
    for n in &mut out {
        n.distance = metric.to_distance(n.distance);
    }
    Ok((out, stats))
}

impl GridIndex {
    pub fn knn(&self, q: &[f64], k: usize, mode: StopMode) -> Result<(Vec<Neighbor>, QueryStats)> {
        knn_query(self, q, k, mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Every cell of the `(2L+1)^d` cube around `center`, by brute force.
    fn cube(center: &[i64], reach: i64) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for &c in center {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (-reach..=reach).map(move |o| {
                        let mut p = prefix.clone();
                        p.push(c + o);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn cheb(a: &[i64], b: &[i64]) -> i64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap()
    }

    #[test]
    fn first_and_second_layer_in_the_plane() {
        let c = CellId::new(vec![0, 0]);
        let first = layer_cells(&c, 1);
        assert_eq!(first.len(), 8);
        assert!(!first.contains(&c));
        assert_eq!(layer_cells(&c, 2).len(), 16);
        assert_eq!(layer_cells(&CellId::new(vec![7, -3, 2]), 0), vec![CellId::new(vec![7, -3, 2])]);
    }

    #[test]
    fn counts_match_formulas() {
        assert_eq!(layer_cell_count(1, 2).unwrap(), 8);
        assert_eq!(layer_cell_count(2, 2).unwrap(), 16);
        assert_eq!(layer_cell_count(3, 4).unwrap(), 1776);
        assert_eq!(layer_cell_count(0, 3).unwrap(), 1);
        for d in 1..8 {
            assert_eq!(total_cell_count(1, d).unwrap(), 3u64.pow(d as u32) - 1);
        }
        assert_eq!(total_cell_count(2, 2).unwrap(), 24);
        assert_eq!(total_cell_count(0, 5).unwrap(), 0);
        assert!(matches!(layer_cell_count(1 << 40, 3), Err(Error::CountOverflow { .. })));
        assert!(matches!(total_cell_count(1000, 10), Err(Error::CountOverflow { .. })));
    }

    #[test]
    fn enumeration_matches_brute_force_shells() {
        for d in 1..=4usize {
            let center: Vec<i64> = (0..d as i64).map(|j| 3 * j - 2).collect();
            let all = cube(&center, 3);
            for l in 0..=3u64 {
                let got: Vec<Vec<i64>> = LayerCells::new(&center, l).map(CellId::into_inner).collect();
                let mut expected: Vec<Vec<i64>> =
                    all.iter().filter(|c| cheb(c, &center) == l as i64).cloned().collect();
                expected.sort();
                // produced in lexicographic order, without repeats
                assert_eq!(got, expected, "d={d} l={l}");
            }
        }
    }

    #[test]
    fn layers_partition_the_cube() {
        for d in 1..=5usize {
            let center = vec![0i64; d];
            let mut union = BTreeSet::new();
            for l in 0..=3u64 {
                for c in layer_cells(&CellId::new(center.clone()), l) {
                    assert!(union.insert(c), "cell repeated across layers");
                }
                assert_eq!(union.len() as u64, total_cell_count(l, d).unwrap() + 1);
            }
        }
    }

    #[test]
    fn parse_stop_mode() {
        assert_eq!("heuristic".parse::<StopMode>().unwrap(), StopMode::Heuristic);
        assert_eq!("Guaranteed".parse::<StopMode>().unwrap(), StopMode::Guaranteed);
        assert!("maybe".parse::<StopMode>().is_err());
    }
}
