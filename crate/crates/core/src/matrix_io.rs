//! Encoded-matrix files: CSV with positional headers, and the binary `ENC1`
//! format (magic, little-endian `u32` rows and cols, then `f64` row-major).

use std::io::{Read, Write};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::Scalar;

pub const ENC_MAGIC: &[u8; 4] = b"ENC1";

/// Names `{prefix}_0 .. {prefix}_{d-1}`.
pub fn column_names(prefix: &str, d: usize) -> Vec<String> {
    (0..d).map(|j| format!("{prefix}_{j}")).collect()
}

/// Writes a header line and one line per row. Values use the shortest text
/// that parses back to the same number.
pub fn write_csv<T: Scalar, W: Write>(x: &Array2<T>, header: &[String], mut w: W) -> Result<()> {
    if header.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: x.ncols(),
            actual: header.len(),
        });
    }
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for row in x.rows() {
        line.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_binary<T: Scalar, W: Write>(x: &Array2<T>, mut w: W) -> Result<()> {
    let dim = |n: usize| u32::try_from(n).map_err(|_| Error::config(format!("dimension {n} does not fit ENC1")));
    w.write_all(ENC_MAGIC)?;
    w.write_all(&dim(x.nrows())?.to_le_bytes())?;
    w.write_all(&dim(x.ncols())?.to_le_bytes())?;
    for v in x.iter() {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Array2<f64>> {
    let bad = |detail: &str| Error::Format {
        what: "ENC1 matrix",
        line: 0,
        detail: detail.to_owned(),
    };
    let mut header = [0u8; 12];
    r.read_exact(&mut header).map_err(|_| bad("truncated header"))?;
    if &header[..4] != ENC_MAGIC {
        return Err(bad("bad magic"));
    }
    let rows = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != rows * cols * 8 {
        return Err(bad("payload size does not match header"));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Array2::from_shape_vec((rows, cols), values).map_err(|e| bad(&e.to_string()))
}
