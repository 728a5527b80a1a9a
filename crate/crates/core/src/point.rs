use crate::error::{Error, Result};

/// Output attached to a training point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Label {
    /// Dense class id for classification.
    Class(u32),
    /// Numeric target for regression.
    Target(f64),
}

impl Label {
    pub fn class(self) -> Option<u32> {
        match self {
            Label::Class(c) => Some(c),
            Label::Target(_) => None,
        }
    }

    pub fn target(self) -> Option<f64> {
        match self {
            Label::Target(t) => Some(t),
            Label::Class(_) => None,
        }
    }

    /// Class ids are widened to `f64` so both kinds fit one column.
    pub fn as_f64(self) -> f64 {
        match self {
            Label::Class(c) => c as f64,
            Label::Target(t) => t,
        }
    }
}

/// A feature vector with its label. Its index is its position in the
/// [`Dataset`] it is added to.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub coords: Vec<f64>,
    pub label: Label,
}

impl LabeledPoint {
    pub fn new(coords: Vec<f64>, label: Label) -> Self {
        Self { coords, label }
    }
}

/// Borrowed view of one training point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRef<'a> {
    pub index: usize,
    pub coords: &'a [f64],
    pub label: Label,
}

/// A validated training set: non-empty, uniform dimension, finite
/// coordinates. Coordinates are stored row-major in one buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
    labels: Vec<Label>,
}

impl Dataset {
    pub fn new<I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = LabeledPoint>,
    {
        let mut iter = points.into_iter();
        let first = iter.next().ok_or(Error::EmptyDataset)?;
        let dim = first.coords.len();
        let mut coords = first.coords;
        let mut labels = vec![first.label];
        for p in iter {
            if p.coords.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.coords.len(),
                });
            }
            coords.extend_from_slice(&p.coords);
            labels.push(p.label);
        }
        Self::from_parts(dim, coords, labels)
    }

    /// Builds a dataset from a row-major coordinate buffer.
    pub fn from_parts(dim: usize, coords: Vec<f64>, labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if coords.len() != dim * labels.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * labels.len(),
                found: coords.len(),
            });
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                point: pos / dim,
                dim: pos % dim,
            });
        }
        if let Some(pos) = labels
            .iter()
            .position(|l| matches!(l, Label::Target(t) if !t.is_finite()))
        {
            return Err(Error::NonFinite { point: pos, dim });
        }
        Ok(Self { dim, coords, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn coords(&self, index: usize) -> &[f64] {
        &self.coords[index * self.dim..(index + 1) * self.dim]
    }

    #[inline]
    pub fn label(&self, index: usize) -> Label {
        self.labels[index]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn raw_coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, index: usize) -> PointRef<'_> {
        PointRef {
            index,
            coords: self.coords(index),
            label: self.labels[index],
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = PointRef<'_>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn to_points(&self) -> Vec<LabeledPoint> {
        self.iter()
            .map(|p| LabeledPoint::new(p.coords.to_vec(), p.label))
            .collect()
    }

    /// Checks that a query has this dataset's dimension and finite values.
    pub fn check_query(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: q.len(),
            });
        }
        if let Some(j) = q.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { point: 0, dim: j });
        }
        Ok(())
    }

    pub(crate) fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.len() {
            return Err(Error::InvalidK { k, n: self.len() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> LabeledPoint {
        LabeledPoint::new(c.to_vec(), Label::Class(0))
    }

    #[test]
    fn rejects_empty_ragged_and_non_finite() {
        assert!(matches!(Dataset::new(Vec::new()), Err(Error::EmptyDataset)));
        assert!(matches!(
            Dataset::new(vec![p(&[1.0, 2.0]), p(&[1.0])]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(
            Dataset::new(vec![p(&[1.0, 2.0]), p(&[1.0, f64::NAN])]),
            Err(Error::NonFinite { point: 1, dim: 1 })
        ));
        assert!(matches!(
            Dataset::new(vec![p(&[f64::INFINITY])]),
            Err(Error::NonFinite { point: 0, dim: 0 })
        ));
    }

    #[test]
    fn indices_follow_insertion_order() {
        let ds = Dataset::new(vec![p(&[1.0, 2.0]), p(&[3.0, 4.0])]).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 2);
        let pts: Vec<_> = ds.iter().collect();
        assert_eq!(pts[1].index, 1);
        assert_eq!(pts[1].coords, &[3.0, 4.0]);
        assert_eq!(ds.to_points()[0], p(&[1.0, 2.0]));
    }

    #[test]
    fn query_and_k_checks() {
        let ds = Dataset::new(vec![p(&[1.0, 2.0])]).unwrap();
        assert!(ds.check_query(&[0.0, 0.0]).is_ok());
        assert!(ds.check_query(&[0.0]).is_err());
        assert!(ds.check_query(&[0.0, f64::NAN]).is_err());
        assert!(ds.check_k(1).is_ok());
        assert!(matches!(ds.check_k(0), Err(Error::InvalidK { k: 0, n: 1 })));
        assert!(matches!(ds.check_k(2), Err(Error::InvalidK { k: 2, n: 1 })));
    }
}
