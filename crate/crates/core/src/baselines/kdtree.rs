use crate::buffer::{Neighbor, NeighborBuffer};
use crate::error::{Error, Result};
use crate::metric::MetricKind;
use crate::point::Dataset;

pub const DEFAULT_LEAF_SIZE: usize = 16;

#[derive(Debug, Clone, Copy)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    /// Left holds points with `coord[dim] <= threshold`, right `>= threshold`.
    Split {
        dim: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Exact kd-tree: median splits on the widest dimension, leaf buckets.
#[derive(Debug, Clone)]
pub struct KdTree {
    data: Dataset,
    metric: MetricKind,
    leaf_size: usize,
    nodes: Vec<Node>,
    order: Vec<u32>,
    root: usize,
}

impl KdTree {
    pub fn build(data: Dataset, metric: MetricKind) -> Result<Self> {
        Self::with_leaf_size(data, metric, DEFAULT_LEAF_SIZE)
    }

    pub fn with_leaf_size(data: Dataset, metric: MetricKind, leaf_size: usize) -> Result<Self> {
        if leaf_size == 0 {
            return Err(Error::InvalidParams("leaf size must be positive".into()));
        }
        let mut tree = Self {
            order: (0..data.len() as u32).collect(),
            data,
            metric,
            leaf_size,
            nodes: Vec::new(),
            root: 0,
        };
        tree.root = tree.build_node(0, tree.order.len());
        Ok(tree)
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let len = end - start;
        let widest = if len > self.leaf_size {
            self.widest_dimension(start, end)
        } else {
            None
        };
        let Some(dim) = widest else {
            self.nodes.push(Node::Leaf { start, end });
            return self.nodes.len() - 1;
        };
        let mid = len / 2;
        let data = &self.data;
        self.order[start..end].select_nth_unstable_by(mid, |&a, &b| {
            data.coords(a as usize)[dim].total_cmp(&data.coords(b as usize)[dim])
        });
        let threshold = data.coords(self.order[start + mid] as usize)[dim];
        let left = self.build_node(start, start + mid);
        let right = self.build_node(start + mid, end);
        self.nodes.push(Node::Split {
            dim,
            threshold,
            left,
            right,
        });
        self.nodes.len() - 1
    }

    /// Widest-spread dimension, or `None` if all points coincide.
    fn widest_dimension(&self, start: usize, end: usize) -> Option<usize> {
        let d = self.data.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in &self.order[start..end] {
            for (j, &v) in self.data.coords(i as usize).iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        let (dim, spread) = (0..d)
            .map(|j| (j, hi[j] - lo[j]))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        (spread > 0.0).then_some(dim)
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    /// Exact k nearest, ascending by `(distance, point_index)`.
    pub fn knn(&self, q: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        self.data.check_query(q)?;
        self.data.check_k(k)?;
        let mut buffer = NeighborBuffer::new(k);
        self.search(self.root, q, &mut buffer);
        Ok(super::finish(buffer, self.metric))
    }

    fn search(&self, node: usize, q: &[f64], buffer: &mut NeighborBuffer) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let i = i as usize;
                    let s = self.metric.surrogate(q, self.data.coords(i));
                    buffer.push(Neighbor::new(s, i, self.data.label(i)));
                }
            }
            Node::Split {
                dim,
                threshold,
                left,
                right,
            } => {
                let delta = q[dim] - threshold;
                let (near, far) = if delta <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, buffer);
                // Far-side points are at least |delta| away; equality may
                // still win on the index tie-break.
                let visit_far = match buffer.worst() {
                    Some(w) if buffer.is_full() => self.metric.axis_surrogate(delta) <= w.distance,
                    _ => true,
                };
                if visit_far {
                    self.search(far, q, buffer);
                }
            }
        }
    }

    /// Checks the structural invariants; used by tests.
    #[doc(hidden)]
    pub fn check_invariants(&self) -> bool {
        let mut seen = vec![0usize; self.data.len()];
        self.check_node(self.root, &mut Vec::new(), &mut seen) && seen.iter().all(|&c| c == 1)
    }

    fn check_node(&self, node: usize, path: &mut Vec<(usize, f64, bool)>, seen: &mut [usize]) -> bool {
        match self.nodes[node] {
            Node::Leaf { start, end } => self.order[start..end].iter().all(|&i| {
                seen[i as usize] += 1;
                let c = self.data.coords(i as usize);
                path.iter().all(|&(dim, t, left)| if left { c[dim] <= t } else { c[dim] >= t })
            }),
            Node::Split {
                dim,
                threshold,
                left,
                right,
            } => {
                path.push((dim, threshold, true));
                let ok_left = self.check_node(left, path, seen);
                path.pop();
                path.push((dim, threshold, false));
                let ok_right = self.check_node(right, path, seen);
                path.pop();
                ok_left && ok_right
            }
        }
    }
}
