//! Binary sketch persistence.
//!
//! Layout, all little-endian:
//!   magic "FSK1"
//!   n, d, p, seed, count  -- five u64 fields
//!   count rows of d cells, each cell the smallest of 1/2/4 bytes
//!   that holds p - 1
//!
//! rho and r are reproducible from (n, d, p, seed), so they are not
//! serialized.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::params::SketchParams;
use crate::sketch::FSketchVector;

const MAGIC: &[u8; 4] = b"FSK1";

/// Header describing the params a sketch file was built under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchFileHeader {
    pub n: usize,
    pub d: usize,
    pub p: u64,
    pub seed: u64,
    pub count: usize,
}

impl SketchFileHeader {
    pub fn params(&self) -> Result<SketchParams> {
        SketchParams::new(self.n, self.d, self.p, self.seed)
    }
}

fn cell_width(p: u64) -> usize {
    let max = p - 1;
    if max <= u8::MAX as u64 {
        1
    } else if max <= u16::MAX as u64 {
        2
    } else {
        4
    }
}

pub fn save_sketches(
    mut sink: impl Write,
    header: &SketchFileHeader,
    sketches: &[FSketchVector],
) -> Result<()> {
    if sketches.len() != header.count {
        return Err(Error::InvalidParameter(format!(
            "header count {} but {} sketches given",
            header.count,
            sketches.len()
        )));
    }
    if header.p - 1 > u32::MAX as u64 {
        return Err(Error::InvalidParameter(format!(
            "p = {} does not fit a 4-byte cell",
            header.p
        )));
    }
    for s in sketches {
        if s.d() != header.d || s.p() != header.p {
            return Err(Error::SketchMismatch {
                d_left: s.d(),
                d_right: header.d,
                p_left: s.p(),
                p_right: header.p,
            });
        }
    }
    sink.write_all(MAGIC)?;
    for field in [
        header.n as u64,
        header.d as u64,
        header.p,
        header.seed,
        header.count as u64,
    ] {
        sink.write_all(&field.to_le_bytes())?;
    }
    let width = cell_width(header.p);
    let mut row = Vec::with_capacity(header.d * width);
    for s in sketches {
        row.clear();
        for &cell in s.cells() {
            row.extend_from_slice(&cell.to_le_bytes()[..width]);
        }
        sink.write_all(&row)?;
    }
    Ok(())
}

pub fn load_sketches(mut source: impl Read) -> Result<(SketchFileHeader, Vec<FSketchVector>)> {
    let mut magic = [0u8; 4];
    source
        .read_exact(&mut magic)
        .map_err(|_| Error::BadSketchFile("truncated magic".into()))?;
    if &magic != MAGIC {
        return Err(Error::BadSketchFile(format!(
            "bad magic {magic:?}, expected {MAGIC:?}"
        )));
    }
    let mut u64_field = |what: &str| -> Result<u64> {
        let mut buf = [0u8; 8];
        source
            .read_exact(&mut buf)
            .map_err(|_| Error::BadSketchFile(format!("truncated {what}")))?;
        Ok(u64::from_le_bytes(buf))
    };
    let n = u64_field("n")? as usize;
    let d = u64_field("d")? as usize;
    let p = u64_field("p")?;
    let seed = u64_field("seed")?;
    let count = u64_field("count")? as usize;
    if n == 0 || d == 0 || p < 2 || p - 1 > u32::MAX as u64 {
        return Err(Error::BadSketchFile(format!(
            "implausible header n={n} d={d} p={p}"
        )));
    }
    let width = cell_width(p);
    let mut body = vec![0u8; d * width];
    let mut sketches = Vec::with_capacity(count);
    for row in 0..count {
        source
            .read_exact(&mut body)
            .map_err(|_| Error::BadSketchFile(format!("truncated at row {row}")))?;
        let cells = body
            .chunks_exact(width)
            .map(|chunk| {
                let mut buf = [0u8; 8];
                buf[..width].copy_from_slice(chunk);
                u64::from_le_bytes(buf)
            })
            .collect::<Vec<_>>();
        if let Some(&bad) = cells.iter().find(|&&c| c >= p) {
            return Err(Error::BadSketchFile(format!(
                "cell value {bad} >= p = {p} at row {row}"
            )));
        }
        sketches.push(FSketchVector::from_cells(p, cells));
    }
    let mut tail = [0u8; 1];
    if source.read(&mut tail)? != 0 {
        return Err(Error::BadSketchFile("trailing bytes after last row".into()));
    }
    Ok((
        SketchFileHeader {
            n,
            d,
            p,
            seed,
            count,
        },
        sketches,
    ))
}
