//! Binary matrix files: the magic `ADVM` padded with zeros to 8 bytes, rows
//! and columns as little-endian `u64`, then the row-major little-endian
//! `f64` payload.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"ADVM\0\0\0\0";
pub const HEADER_LEN: usize = 24;

/// Size in bytes of a file holding a `rows × cols` matrix.
pub fn file_len(rows: usize, cols: usize) -> usize {
    HEADER_LEN + 8 * rows * cols
}

pub fn write_matrix<W: Write>(mut w: W, m: &DMatrix<f64>) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            w.write_all(&m[(r, c)].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<DMatrix<f64>> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if header[..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let word = |i: usize| u64::from_le_bytes(header[i..i + 8].try_into().expect("8 bytes"));
    let (rows, cols) = (word(8) as usize, word(16) as usize);
    let len = rows
        .checked_mul(cols)
        .and_then(|x| x.checked_mul(8))
        .ok_or_else(|| Error::Format(format!("shape {rows}x{cols} overflows")))?;
    let mut payload = Vec::with_capacity(len);
    r.read_to_end(&mut payload)?;
    if payload.len() != len {
        return Err(Error::Format(format!(
            "payload of {} bytes for shape {rows}x{cols}",
            payload.len()
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
        .collect();
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

pub fn save(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    write_matrix(BufWriter::new(File::create(path)?), m)
}

pub fn load(path: &Path) -> Result<DMatrix<f64>> {
    read_matrix(BufReader::new(File::open(path)?))
}
