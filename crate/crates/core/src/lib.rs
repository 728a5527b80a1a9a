//! Grid hashing neighborhood (GHN) index for k-nearest-neighbor selection.
//!
//! Training points are hashed into the cells of a virtual grid whose cell
//! measurements are fitted per dimension. A query hashes to its central
//! cell and explores surrounding layers of cells until a stopping rule
//! fires, keeping the k best candidates in a bounded heap.
//!
//! ```
//! use ghn::{Dataset, GridIndex, Label, LabeledPoint, MetricKind, StopMode};
//!
//! let points = (0..100).map(|i| {
//!     let x = (i % 10) as f64;
//!     let y = (i / 10) as f64;
//!     LabeledPoint::new(vec![x, y], Label::Class((x > 4.5) as u32))
//! });
//! let index = GridIndex::build(Dataset::new(points)?, MetricKind::Euclidean)?;
//! let (neighbors, stats) = index.knn(&[2.2, 3.1], 3, StopMode::Guaranteed)?;
//! assert_eq!(neighbors[0].point_index, 32);
//! assert!(stats.points_scanned <= 100);
//! # Ok::<(), ghn::Error>(())
//! ```

pub mod baselines;
pub mod buffer;
pub mod error;
pub mod exploration;
pub mod grid;
pub mod metric;
mod persist;
pub mod point;
pub mod predict;

pub use baselines::{brute_knn, BruteIndex, KdTree};
pub use buffer::{Neighbor, NeighborBuffer, PushOutcome};
pub use error::{Error, Result};
pub use exploration::{
    knn_query, knn_query_with, layer_cell_count, layer_cells, total_cell_count, LayerCells,
    LayerStrategy, QueryOptions, QueryStats, StopMode,
};
pub use grid::{
    cell_points, fit_cell_measurements, fit_cell_measurements_with, hash_cell, CellId, GridConfig,
    GridIndex, GridParams,
};
pub use metric::{distance, MetricKind};
pub use persist::{FORMAT_VERSION, MAGIC};
pub use point::{Dataset, Label, LabeledPoint, PointRef};
pub use predict::{classify, regress, Aggregate, Prediction};
