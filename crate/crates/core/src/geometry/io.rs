//! Lossless dataset container and CSV import/export.
//!
//! Container layout: ASCII magic `MRC1`, little-endian `u32` row count `n`,
//! little-endian `u32` dimension `D`, then `n * D` little-endian `f64`
//! coordinates in row-major order. Nothing follows the last coordinate.

use std::io::Write;
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const CONTAINER_MAGIC: &[u8; 4] = b"MRC1";

pub fn write_container<T: Real>(data: &Dataset<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::with_capacity(12 + data.points().len() * 8);
    buf.extend_from_slice(CONTAINER_MAGIC);
    buf.extend_from_slice(&(data.len() as u32).to_le_bytes());
    buf.extend_from_slice(&(data.ambient_dim() as u32).to_le_bytes());
    for &x in data.points() {
        buf.extend_from_slice(&x.as_f64().to_le_bytes());
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&buf))
        .map_err(|e| Error::io(path, e))
}

/// Decodes a container; the unit-ball check is left to the caller.
pub fn decode_container<T: Real>(bytes: &[u8]) -> Result<Dataset<T>> {
    if bytes.len() < 12 {
        return Err(Error::format(bytes.len() as u64, "truncated header"));
    }
    if &bytes[0..4] != CONTAINER_MAGIC {
        return Err(Error::format(0, "bad magic, expected \"MRC1\""));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = 12 + n * dim * 8;
    if bytes.len() != expected {
        return Err(Error::format(
            bytes.len().min(expected) as u64,
            format!(
                "payload length mismatch: expected {expected} bytes, found {}",
                bytes.len()
            ),
        ));
    }
    let points = bytes[12..]
        .chunks_exact(8)
        .map(|c| T::lit(f64::from_le_bytes(c.try_into().unwrap())))
        .collect();
    Dataset::new_unrestricted(points, dim)
}

pub fn read_container<T: Real>(path: impl AsRef<Path>) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_container(&bytes)
}

/// What to do with rows outside the unit ball when importing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BallPolicy {
    /// Reject the file.
    #[default]
    Require,
    /// Shrink every row by one common factor.
    Scale,
    /// Keep the data as is.
    Ignore,
}

/// Reads comma-separated rows of numbers. A first line that does not parse as
/// numbers is treated as a header.
pub fn read_csv<T: Real>(path: impl AsRef<Path>, policy: BallPolicy) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut points = Vec::new();
    let mut dim = None;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if i == 0 => continue,
            Err(e) => {
                let offset = record.position().map_or(0, |p| p.byte());
                return Err(Error::format(offset, format!("line {}: {e}", i + 1)));
            }
        };
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                let offset = record.position().map_or(0, |p| p.byte());
                return Err(Error::format(
                    offset,
                    format!("line {} has {} columns, expected {d}", i + 1, row.len()),
                ));
            }
            _ => {}
        }
        points.extend(row.into_iter().map(T::lit));
    }
    let dim = dim.ok_or_else(|| Error::format(0, "no numeric rows"))?;
    match policy {
        BallPolicy::Require => Dataset::new(points, dim),
        BallPolicy::Scale => Dataset::scaled_into_unit_ball(points, dim).map(|(d, _)| d),
        BallPolicy::Ignore => Dataset::new_unrestricted(points, dim),
    }
}

pub fn write_csv<T: Real>(data: &Dataset<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    for row in data.rows() {
        writer.write_record(row.iter().map(|x| format!("{:e}", x.as_f64())))?;
    }
    writer.flush().map_err(|e| Error::io(path.as_ref(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_sphere;
    use crate::rng::RngSeed;

    #[test]
    fn container_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.mrc");
        let ds = sample_sphere::<f64>(2, 4, 33, RngSeed(1)).unwrap();
        write_container(&ds, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"MRC1");
        assert_eq!(bytes.len(), 12 + 33 * 4 * 8);
        assert_eq!(read_container::<f64>(&path).unwrap(), ds);
    }

    #[test]
    fn container_errors_carry_offsets() {
        assert!(matches!(
            decode_container::<f64>(b"MRC2\0\0\0\0\0\0\0\0"),
            Err(Error::Format { offset: 0, .. })
        ));
        let mut bytes = b"MRC1".to_vec();
        bytes.extend_from_slice(&1u32.to_le_bytes());
        bytes.extend_from_slice(&2u32.to_le_bytes());
        bytes.extend_from_slice(&0.5f64.to_le_bytes());
        assert!(matches!(
            decode_container::<f64>(&bytes),
            Err(Error::Format { offset: 20, .. })
        ));
    }

    #[test]
    fn csv_with_header_and_scaling() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "x,y\n0,0\n2,0\n").unwrap();
        assert!(read_csv::<f64>(&path, BallPolicy::Require).is_err());
        assert_eq!(
            read_csv::<f64>(&path, BallPolicy::Ignore).unwrap().row(1),
            &[2.0, 0.0]
        );
        let ds = read_csv::<f64>(&path, BallPolicy::Scale).unwrap();
        assert_eq!(ds.row(1), &[1.0, 0.0]);
        let out = dir.path().join("y.csv");
        write_csv(&ds, &out).unwrap();
        assert_eq!(read_csv::<f64>(&out, BallPolicy::Require).unwrap(), ds);
    }

    #[test]
    fn csv_ragged_rows_fail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "0,0\n0.5\n").unwrap();
        assert!(read_csv::<f64>(&path, BallPolicy::Ignore).is_err());
    }
}
