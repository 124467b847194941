//! Field snapshot files: a flat 64-bit real array with a dimension header.
//!
//! The format is a single ASCII header line `FLD <nx> <ny>\n` followed by
//! `nx * ny` little-endian `f64` values, x-fastest (the value at grid node
//! `(x, y)` sits at flat offset `y * nx + x`). Snapshots exist for visual
//! inspection of simulated fields through the SVG renderer.

use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::VoxError;

/// Writes `field` (indexed `(x, y)`, shape `(nx, ny)`) as a snapshot.
pub fn write_snapshot<W: Write>(w: &mut W, field: &Array2<f64>) -> std::io::Result<()> {
    let (nx, ny) = field.dim();
    writeln!(w, "FLD {nx} {ny}")?;
    for y in 0..ny {
        for x in 0..nx {
            w.write_all(&field[(x, y)].to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a snapshot back into an `(nx, ny)` array indexed `(x, y)`.
pub fn read_snapshot<R: BufRead>(r: &mut R) -> Result<Array2<f64>, VoxError> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("FLD") {
        return Err(VoxError::Format(
            "snapshot must start with an `FLD <nx> <ny>` header".into(),
        ));
    }
    let mut dim = |name: &str| -> Result<usize, VoxError> {
        parts
            .next()
            .and_then(|t| t.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| VoxError::Format(format!("snapshot header needs a positive {name}")))
    };
    let nx = dim("nx")?;
    let ny = dim("ny")?;
    let mut buf = vec![0u8; nx * ny * 8];
    r.read_exact(&mut buf).map_err(|_| {
        VoxError::Format(format!("snapshot data truncated: expected {nx}x{ny} values"))
    })?;
    let mut field = Array2::zeros((nx, ny));
    for (k, chunk) in buf.chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().expect("chunks are 8 bytes"));
        if !v.is_finite() {
            return Err(VoxError::Format("snapshot contains non-finite values".into()));
        }
        field[(k % nx, k / nx)] = v;
    }
    Ok(field)
}

/// Saves a snapshot to `path`.
pub fn save_snapshot(path: &Path, field: &Array2<f64>) -> Result<(), VoxError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshot(&mut f, field)?;
    Ok(())
}

/// Loads a snapshot from `path`.
pub fn load_snapshot(path: &Path) -> Result<Array2<f64>, VoxError> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_snapshot(&mut f)
}
