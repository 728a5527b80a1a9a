//! Virtual grid fitted on the training data and the cell hash table.
//!
//! Each dimension is split into the largest number of equal bins over the
//! training range that leaves no bin empty; the bin width becomes the cell
//! measurement for that dimension. Points are hashed to cells by floor
//! division of their raw coordinates by the measurements, so the grid is
//! anchored at the origin rather than at the data minimum.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::metric::MetricKind;
use crate::point::Dataset;

/// Per-dimension cell measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct GridParams {
    /// Cell width on each dimension; always positive.
    pub widths: Vec<f64>,
    /// Per-dimension minimum of the training data (reporting only).
    pub origin: Vec<f64>,
    /// Fitted split count on each dimension.
    pub splits: Vec<u64>,
}

impl GridParams {
    pub fn dim(&self) -> usize {
        self.widths.len()
    }

    pub fn min_width(&self) -> f64 {
        self.widths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let d = self.widths.len();
        if d == 0 || self.origin.len() != d || self.splits.len() != d {
            return Err(Error::InvalidParams(format!(
                "inconsistent lengths: {} widths, {} origins, {} splits",
                d,
                self.origin.len(),
                self.splits.len()
            )));
        }
        if let Some(j) = self.widths.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParams(format!(
                "width on dimension {j} is not a positive finite number"
            )));
        }
        if self.splits.contains(&0) {
            return Err(Error::InvalidParams("split count of zero".into()));
        }
        Ok(())
    }
}

/// Integer coordinates of a grid cell. Ids are negative for points below
/// zero on a dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(Vec<i64>);

impl CellId {
    pub fn new(ids: Vec<i64>) -> Self {
        Self(ids)
    }

    pub fn ids(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    /// Chebyshev distance in cell-index space.
    pub fn chebyshev(&self, other: &CellId) -> u64 {
        chebyshev(&self.0, &other.0)
    }
}

impl Borrow<[i64]> for CellId {
    fn borrow(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for CellId {
    fn from(ids: Vec<i64>) -> Self {
        Self(ids)
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, v) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[inline]
pub(crate) fn chebyshev(a: &[i64], b: &[i64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x as i128 - *y as i128).unsigned_abs())
        .max()
        .unwrap_or(0)
        .min(u64::MAX as u128) as u64
}

/// Options for fitting the grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GridConfig {
    /// Upper bound on the split count of any dimension. `None` is unlimited.
    pub max_splits: Option<u64>,
}

/// Bin of `v` among `s` equal bins over `[lo, hi]`, with `hi` owned by
/// the last bin.
#[inline]
fn bin_of(v: f64, lo: f64, range: f64, s: u64) -> u64 {
    let b = ((v - lo) * s as f64 / range).floor();
    (b.max(0.0) as u64).min(s - 1)
}

/// Largest split count leaving every bin occupied, for a sorted list of
/// distinct values.
///
/// Bins are monotone in the value, so occupancy holds iff no two adjacent
/// distinct values land more than one bin apart. Only pairs whose gap
/// spans at least half a bin can do that, so each candidate `s` checks the
/// widest gaps first and stops at the first one that is too narrow.
fn max_full_splits(values: &[f64], cap: Option<u64>) -> u64 {
    let m = values.len() as u64;
    if m <= 1 {
        return 1;
    }
    let lo = values[0];
    let range = values[values.len() - 1] - lo;

    let mut gaps: Vec<(f64, usize)> = values
        .windows(2)
        .enumerate()
        .map(|(i, w)| (w[1] - w[0], i))
        .collect();
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    // Beyond this count the widest gap alone spans more than three bins.
    let widest = gaps[0].0;
    let bound = (3.0 * range / widest).floor() + 1.0;
    let mut upper = if bound.is_finite() && bound < m as f64 {
        bound.max(1.0) as u64
    } else {
        m
    };
    if let Some(c) = cap {
        upper = upper.min(c.max(1));
    }

    'candidates: for s in (2..=upper).rev() {
        let sf = s as f64;
        for &(gap, i) in &gaps {
            if gap * sf / range < 0.5 {
                break;
            }
            if bin_of(values[i + 1], lo, range, s) - bin_of(values[i], lo, range, s) > 1 {
                continue 'candidates;
            }
        }
        return s;
    }
    1
}

/// Fits the cell measurements on each dimension independently.
pub fn fit_cell_measurements(data: &Dataset) -> GridParams {
    fit_cell_measurements_with(data, &GridConfig::default())
}

pub fn fit_cell_measurements_with(data: &Dataset, config: &GridConfig) -> GridParams {
    let d = data.dim();
    let mut widths = Vec::with_capacity(d);
    let mut origin = Vec::with_capacity(d);
    let mut splits = Vec::with_capacity(d);
    let mut column = Vec::with_capacity(data.len());
    for j in 0..d {
        column.clear();
        column.extend(data.iter().map(|p| p.coords[j]));
        column.sort_by(f64::total_cmp);
        column.dedup();
        let lo = column[0];
        let hi = column[column.len() - 1];
        origin.push(lo);
        if hi == lo {
            splits.push(1);
            widths.push(1.0);
            continue;
        }
        let s = max_full_splits(&column, config.max_splits);
        splits.push(s);
        widths.push((hi - lo) / s as f64);
    }
    GridParams {
        widths,
        origin,
        splits,
    }
}

#[inline]
fn floor_div(v: f64, w: f64) -> i64 {
    // `as` saturates at the i64 range.
    (v / w).floor() as i64
}

/// Cell containing `p`: `floor(p[j] / widths[j])` on every dimension.
pub fn hash_cell(p: &[f64], params: &GridParams) -> CellId {
    let mut ids = vec![0; p.len()];
    hash_into(p, &params.widths, &mut ids);
    CellId(ids)
}

#[inline]
pub(crate) fn hash_into(p: &[f64], widths: &[f64], out: &mut [i64]) {
    for ((o, v), w) in out.iter_mut().zip(p).zip(widths) {
        *o = floor_div(*v, *w);
    }
}

/// Hash table from non-empty cells to the training points they hold.
///
/// Cells are kept in lexicographic id order; each cell's point list keeps
/// input order.
#[derive(Debug, Clone)]
pub struct GridIndex {
    pub(crate) params: GridParams,
    pub(crate) metric: MetricKind,
    pub(crate) data: Dataset,
    pub(crate) table: FxHashMap<CellId, u32>,
    /// Cell ids by slot, row-major.
    pub(crate) cell_ids: Vec<i64>,
    /// `members[offsets[s]..offsets[s + 1]]` are the points of slot `s`.
    pub(crate) offsets: Vec<usize>,
    pub(crate) members: Vec<u32>,
    /// Bounding box of the non-empty cells.
    pub(crate) cell_lo: Vec<i64>,
    pub(crate) cell_hi: Vec<i64>,
}

impl GridIndex {
    /// Fits the grid on `data` and hashes every point into it.
    pub fn build(data: Dataset, metric: MetricKind) -> Result<Self> {
        Self::build_with(data, metric, &GridConfig::default())
    }

    pub fn build_with(data: Dataset, metric: MetricKind, config: &GridConfig) -> Result<Self> {
        let params = fit_cell_measurements_with(&data, config);
        Self::with_params(data, metric, params)
    }

    /// Builds the table over explicit cell measurements.
    pub fn with_params(data: Dataset, metric: MetricKind, params: GridParams) -> Result<Self> {
        params.validate()?;
        if params.dim() != data.dim() {
            return Err(Error::DimensionMismatch {
                expected: data.dim(),
                found: params.dim(),
            });
        }
        if data.len() > u32::MAX as usize {
            return Err(Error::InvalidParams(format!(
                "{} points exceed the supported maximum",
                data.len()
            )));
        }
        let d = data.dim();
        let n = data.len();
        let mut ids = vec![0i64; n * d];
        for (i, chunk) in ids.chunks_exact_mut(d).enumerate() {
            hash_into(data.coords(i), &params.widths, chunk);
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        let row = |i: u32| &ids[i as usize * d..(i as usize + 1) * d];
        order.sort_by(|&a, &b| match row(a).cmp(row(b)) {
            Ordering::Equal => a.cmp(&b),
            other => other,
        });

        let mut cells: Vec<(CellId, Vec<u32>)> = Vec::new();
        for &i in &order {
            match cells.last_mut() {
                Some((cell, list)) if cell.ids() == row(i) => list.push(i),
                _ => cells.push((CellId(row(i).to_vec()), vec![i])),
            }
        }
        Ok(Self::from_cells(data, metric, params, cells))
    }

    /// Assembles an index from cells that are already sorted lexicographically.
    pub(crate) fn from_cells(
        data: Dataset,
        metric: MetricKind,
        params: GridParams,
        cells: Vec<(CellId, Vec<u32>)>,
    ) -> Self {
        let d = data.dim();
        let mut table = FxHashMap::default();
        table.reserve(cells.len());
        let mut cell_ids = Vec::with_capacity(cells.len() * d);
        let mut offsets = Vec::with_capacity(cells.len() + 1);
        let mut members = Vec::with_capacity(data.len());
        let mut cell_lo = vec![i64::MAX; d];
        let mut cell_hi = vec![i64::MIN; d];
        offsets.push(0);
        for (slot, (cell, list)) in cells.into_iter().enumerate() {
            for (j, &v) in cell.ids().iter().enumerate() {
                cell_lo[j] = cell_lo[j].min(v);
                cell_hi[j] = cell_hi[j].max(v);
            }
            cell_ids.extend_from_slice(cell.ids());
            members.extend_from_slice(&list);
            offsets.push(members.len());
            table.insert(cell, slot as u32);
        }
        Self {
            params,
            metric,
            data,
            table,
            cell_ids,
            offsets,
            members,
            cell_lo,
            cell_hi,
        }
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    /// Number of non-empty cells.
    pub fn num_cells(&self) -> usize {
        self.table.len()
    }

    pub fn hash(&self, p: &[f64]) -> CellId {
        hash_cell(p, &self.params)
    }

    /// Point indices stored in `cell`, empty for cells absent from the table.
    pub fn cell_points(&self, cell: &[i64]) -> &[u32] {
        match self.table.get(cell) {
            Some(&slot) => self.slot_members(slot as usize),
            None => &[],
        }
    }

    #[inline]
    pub(crate) fn slot_members(&self, slot: usize) -> &[u32] {
        &self.members[self.offsets[slot]..self.offsets[slot + 1]]
    }

    #[inline]
    pub(crate) fn slot_id(&self, slot: usize) -> &[i64] {
        let d = self.dim();
        &self.cell_ids[slot * d..(slot + 1) * d]
    }

    /// Non-empty cells in lexicographic order with their point lists.
    pub fn cells(&self) -> impl ExactSizeIterator<Item = (&[i64], &[u32])> + '_ {
        (0..self.num_cells()).map(move |s| (self.slot_id(s), self.slot_members(s)))
    }
}

/// Point indices for `cell`; empty if the cell holds no training point.
pub fn cell_points<'a>(index: &'a GridIndex, cell: &CellId) -> &'a [u32] {
    index.cell_points(cell.ids())
}
