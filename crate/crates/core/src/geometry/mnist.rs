//! IDX3 image reader for MNIST-style files.
//!
//! Layout (big-endian): magic `0x00000803`, item count, rows, cols, then
//! `count * rows * cols` unsigned bytes in row-major order.

use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;

const IDX3_MAGIC: u32 = 0x0000_0803;
const HEADER_LEN: usize = 16;

/// Fixed pixel scale `1 / (255 * 28)`: a 28x28 image of saturated pixels has norm 1.
pub const MNIST_SCALE: f64 = 1.0 / (255.0 * 28.0);

fn be_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::format(offset as u64, "truncated header"))
}

/// Parses an in-memory IDX3 image file; keeps the first `limit` images if given.
pub fn parse_idx3<T: Real>(bytes: &[u8], limit: Option<usize>) -> Result<Dataset<T>> {
    let magic = be_u32(bytes, 0)?;
    if magic != IDX3_MAGIC {
        return Err(Error::format(
            0,
            format!("bad magic number {magic:#010x}, expected {IDX3_MAGIC:#010x}"),
        ));
    }
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    if rows != 28 || cols != 28 {
        return Err(Error::format(
            8,
            format!("image dimensions {rows}x{cols}, expected 28x28"),
        ));
    }
    let dim = rows * cols;
    let take = limit.map_or(count, |l| l.min(count));
    if take == 0 {
        return Err(Error::format(4, "file contains no images"));
    }
    let needed = HEADER_LEN + take * dim;
    if bytes.len() < needed {
        return Err(Error::format(
            bytes.len() as u64,
            format!(
                "truncated pixel data: need {needed} bytes, have {}",
                bytes.len()
            ),
        ));
    }
    let scale = T::lit(MNIST_SCALE);
    let points = bytes[HEADER_LEN..needed]
        .iter()
        .map(|&p| T::lit(p as f64) * scale)
        .collect();
    Dataset::new(points, dim)
}

/// Reads an IDX3 image file from disk.
pub fn load_mnist<T: Real>(path: impl AsRef<Path>, limit: Option<usize>) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_idx3(&bytes, limit)
}
