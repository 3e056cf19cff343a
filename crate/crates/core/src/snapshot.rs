//! Bit-exact binary snapshots of a field.
//!
//! Layout, all little-endian, no padding:
//!
//! | bytes | content                                   |
//! |-------|-------------------------------------------|
//! | 4     | magic `CHFS`                              |
//! | 4     | u32 version (= 1)                         |
//! | 4     | u32 dimension                             |
//! | 12    | 3 x u32 cells per axis (unused axes = 1)  |
//! | 24    | 3 x f64 lengths                           |
//! | 8     | f64 time                                  |
//! | 8 N   | N = product of cells f64 values, first axis fastest |

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result, SnapshotError};
use crate::grid::{Field, Grid};

pub const MAGIC: [u8; 4] = *b"CHFS";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 4 + 4 + 12 + 24 + 8;

/// Refuse payloads above this many cells.
const MAX_CELLS: u64 = 1 << 32;

pub fn encode_snapshot(field: &Field, t: f64) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * field.values().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    for n in grid.cells3() {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for l in grid.lengths3() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    out.extend_from_slice(&t.to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_snapshot(bytes: &[u8]) -> std::result::Result<(Field, f64), SnapshotError> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != MAGIC {
            return Err(SnapshotError::BadMagic(bytes[..4].try_into().unwrap()));
        }
        return Err(SnapshotError::Truncated {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(SnapshotError::BadMagic(magic));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(SnapshotError::Version(version));
    }
    let dim = u32_at(8) as usize;
    if !(1..=3).contains(&dim) {
        return Err(SnapshotError::DimensionOverflow(format!("dimension {dim}")));
    }
    let cells = [u32_at(12), u32_at(16), u32_at(20)];
    let lengths = [f64_at(24), f64_at(32), f64_at(40)];
    let t = f64_at(48);
    if cells[dim..].iter().any(|&n| n != 1) {
        return Err(SnapshotError::DimensionOverflow(format!(
            "unused axes must have one cell, got {cells:?} for dimension {dim}"
        )));
    }
    let count = cells.iter().map(|&n| u64::from(n)).product::<u64>();
    if count > MAX_CELLS {
        return Err(SnapshotError::DimensionOverflow(format!("{count} cells")));
    }
    let expected = HEADER_LEN as u64 + 8 * count;
    let found = bytes.len() as u64;
    if found < expected {
        return Err(SnapshotError::Truncated { expected, found });
    }
    if found > expected {
        return Err(SnapshotError::TrailingBytes);
    }
    let active: Vec<usize> = cells[..dim].iter().map(|&n| n as usize).collect();
    let grid = Grid::new(&active, &lengths[..dim])
        .map_err(|e| SnapshotError::DimensionOverflow(e.to_string()))?;
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let field =
        Field::new(grid, values).map_err(|e| SnapshotError::DimensionOverflow(e.to_string()))?;
    Ok((field, t))
}

pub fn write_snapshot(field: &Field, t: f64, path: impl AsRef<Path>) -> Result<()> {
    let mut f = fs::File::create(path.as_ref())?;
    f.write_all(&encode_snapshot(field, t))?;
    f.flush()?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<(Field, f64)> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    decode_snapshot(&bytes).map_err(|kind| Error::Snapshot {
        path: path.to_path_buf(),
        kind,
    })
}
