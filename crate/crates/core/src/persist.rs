//! Versioned binary dump of a [`GridIndex`].
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic    b"GHNIDX\0\0"
//! version  u32
//! metric   u8   (0 euclidean, 1 manhattan, 2 chebyshev)
//! dim      u32
//! n        u64
//! widths   f64 * dim
//! origin   f64 * dim
//! splits   u64 * dim
//! points   n * (f64 * dim, label tag u8, label payload 8 bytes)
//! cells    u64 count, then per cell in lexicographic id order:
//!          i64 * dim, u32 len, u32 * len point indices
//! ```
//!
//! Floats are stored bit-exactly, so save -> load -> save is byte-identical.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{hash_cell, CellId, GridIndex, GridParams};
use crate::metric::MetricKind;
use crate::point::{Dataset, Label};

pub const MAGIC: &[u8; 8] = b"GHNIDX\0\0";
pub const FORMAT_VERSION: u32 = 1;

fn metric_tag(m: MetricKind) -> u8 {
    match m {
        MetricKind::Euclidean => 0,
        MetricKind::Manhattan => 1,
        MetricKind::Chebyshev => 2,
    }
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::Corrupt("truncated".into()),
            _ => Error::Io(e),
        })?;
        Ok(buf)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

impl GridIndex {
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.dim();
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&[metric_tag(self.metric)])?;
        w.write_all(&(d as u32).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for v in self.params.widths.iter().chain(&self.params.origin) {
            w.write_all(&v.to_le_bytes())?;
        }
        for s in &self.params.splits {
            w.write_all(&s.to_le_bytes())?;
        }
        for p in self.data.iter() {
            for v in p.coords {
                w.write_all(&v.to_le_bytes())?;
            }
            let (tag, payload) = match p.label {
                Label::Class(c) => (0u8, (c as u64).to_le_bytes()),
                Label::Target(t) => (1u8, t.to_le_bytes()),
            };
            w.write_all(&[tag])?;
            w.write_all(&payload)?;
        }
        w.write_all(&(self.num_cells() as u64).to_le_bytes())?;
        for (cell, members) in self.cells() {
            for v in cell {
                w.write_all(&v.to_le_bytes())?;
            }
            w.write_all(&(members.len() as u32).to_le_bytes())?;
            for m in members {
                w.write_all(&m.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.save(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    /// Reads an index written by [`GridIndex::save`], checking that the
    /// stored table agrees with the stored points and parameters.
    pub fn load<R: Read>(r: R) -> Result<Self> {
        let mut r = Reader { inner: r };
        if &r.bytes::<8>()? != MAGIC {
            return Err(Error::Corrupt("bad magic".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::Corrupt(format!("unsupported version {version}")));
        }
        let metric = match r.u8()? {
            0 => MetricKind::Euclidean,
            1 => MetricKind::Manhattan,
            2 => MetricKind::Chebyshev,
            t => return Err(Error::Corrupt(format!("unknown metric tag {t}"))),
        };
        let d = r.u32()? as usize;
        let n = usize::try_from(r.u64()?).map_err(|_| Error::Corrupt("point count".into()))?;
        if d == 0 || n == 0 || n > u32::MAX as usize {
            return Err(Error::Corrupt(format!("bad header: dim {d}, n {n}")));
        }
        let widths = r.f64s(d)?;
        let origin = r.f64s(d)?;
        let splits = (0..d).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let params = GridParams {
            widths,
            origin,
            splits,
        };

        let mut coords = Vec::with_capacity(n.min(1 << 20) * d);
        let mut labels = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            coords.extend(r.f64s(d)?);
            let tag = r.u8()?;
            let payload = r.bytes::<8>()?;
            labels.push(match tag {
                0 => {
                    let c = u64::from_le_bytes(payload);
                    Label::Class(u32::try_from(c).map_err(|_| Error::Corrupt("class id".into()))?)
                }
                1 => Label::Target(f64::from_le_bytes(payload)),
                t => return Err(Error::Corrupt(format!("unknown label tag {t}"))),
            });
        }
        let data = Dataset::from_parts(d, coords, labels)?;

        let num_cells = r.u64()? as usize;
        if num_cells > n {
            return Err(Error::Corrupt("more cells than points".into()));
        }
        let mut cells: Vec<(CellId, Vec<u32>)> = Vec::with_capacity(num_cells);
        let mut seen = vec![false; n];
        for _ in 0..num_cells {
            let id = CellId::new((0..d).map(|_| r.i64()).collect::<Result<_>>()?);
            if let Some((prev, _)) = cells.last() {
                if *prev >= id {
                    return Err(Error::Corrupt("cells out of order".into()));
                }
            }
            let len = r.u32()? as usize;
            if len == 0 || len > n {
                return Err(Error::Corrupt(format!("cell {id} has {len} points")));
            }
            let mut members = Vec::with_capacity(len);
            for _ in 0..len {
                let m = r.u32()?;
                let slot = seen
                    .get_mut(m as usize)
                    .ok_or_else(|| Error::Corrupt(format!("point index {m} out of range")))?;
                if *slot {
                    return Err(Error::Corrupt(format!("point {m} stored twice")));
                }
                *slot = true;
                members.push(m);
            }
            cells.push((id, members));
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Corrupt("some points are not in any cell".into()));
        }
        let mut probe = [0u8; 1];
        if r.inner.read(&mut probe)? != 0 {
            return Err(Error::Corrupt("trailing bytes".into()));
        }

        params.validate().map_err(|e| Error::Corrupt(e.to_string()))?;
        let stored = GridIndex::from_cells(data, metric, params, cells);
        for (cell, members) in stored.cells() {
            for &m in members {
                if hash_cell(stored.data.coords(m as usize), &stored.params).ids() != cell {
                    return Err(Error::Corrupt(format!("point {m} filed under the wrong cell")));
                }
            }
        }
        Ok(stored)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::LabeledPoint;

    fn sample() -> GridIndex {
        let pts = (0..40).map(|i| {
            let x = (i as f64 * 0.37).sin() * 3.0;
            let y = (i as f64 * 0.11).cos() * 2.0 - 1.0;
            let label = if i % 2 == 0 { Label::Class(i % 3) } else { Label::Target(i as f64 * 0.5) };
            LabeledPoint::new(vec![x, y], label)
        });
        GridIndex::build(Dataset::new(pts).unwrap(), MetricKind::Manhattan).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let idx = sample();
        let bytes = idx.to_bytes();
        let loaded = GridIndex::load(bytes.as_slice()).unwrap();
        assert_eq!(loaded.to_bytes(), bytes);
        assert_eq!(loaded.params(), idx.params());
        assert_eq!(loaded.metric(), MetricKind::Manhattan);
        assert_eq!(loaded.data(), idx.data());
    }

    #[test]
    fn rejects_damage() {
        let bytes = sample().to_bytes();
        assert!(matches!(GridIndex::load(&bytes[..bytes.len() - 3]), Err(Error::Corrupt(_))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(GridIndex::load(bad.as_slice()), Err(Error::Corrupt(_))));
        let mut bad = bytes.clone();
        bad[8] = 9;
        assert!(matches!(GridIndex::load(bad.as_slice()), Err(Error::Corrupt(_))));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(GridIndex::load(long.as_slice()), Err(Error::Corrupt(_))));
        // move the first stored point to a different coordinate
        let mut moved = bytes;
        let first_coord = 8 + 4 + 1 + 4 + 8 + 2 * 8 * 3;
        moved[first_coord..first_coord + 8].copy_from_slice(&1e6f64.to_le_bytes());
        assert!(matches!(GridIndex::load(moved.as_slice()), Err(Error::Corrupt(_))));
    }
}
