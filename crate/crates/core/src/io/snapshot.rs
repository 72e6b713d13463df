//! Binary snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `MMP1` |
//! | 4     | format version (u32) |
//! | 4     | grid points per axis `n` (u32) |
//! | 8     | time (f64) |
//! | 40    | `mu, chi, kappa, gamma, nu` (f64) |
//! | 144·n³ | `u, ω, b`, each as components x, y, z, each in row-major lattice order, `(re, im)` f64 pairs |
//!
//! The box is the 2π-periodic one.

use crate::dynamics::{MMPParams, MMPState};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralVectorField};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: [u8; 4] = *b"MMP1";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 5 * 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub version: u32,
    pub n: u32,
    pub time: f64,
    pub params: MMPParams,
}

pub fn write_snapshot<W: Write>(mut w: W, state: &MMPState, params: &MMPParams) -> Result<()> {
    state.ensure_consistent()?;
    let n = u32::try_from(state.grid().n())
        .map_err(|_| Error::Snapshot("grid too large for the header".into()))?;
    let mut buf = Vec::with_capacity(HEADER_LEN + 144 * state.grid().len());
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&state.time.to_le_bytes());
    for p in params.as_array() {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    for field in state.fields() {
        for c in 0..3 {
            for v in field.component(c) {
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos + len;
        if end > self.bytes.len() {
            return Err(Error::Snapshot(format!(
                "truncated: needed {end} bytes, file has {}",
                self.bytes.len()
            )));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

fn parse_header(c: &mut Cursor<'_>) -> Result<SnapshotHeader> {
    let magic = c.take(4)?;
    if magic != MAGIC {
        return Err(Error::Snapshot(format!("bad magic {magic:02x?}, expected \"MMP1\"")));
    }
    let version = c.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Snapshot(format!("unsupported format version {version}")));
    }
    let n = c.u32()?;
    let time = c.f64()?;
    let mut p = [0.0; 5];
    for v in p.iter_mut() {
        *v = c.f64()?;
    }
    Ok(SnapshotHeader {
        version,
        n,
        time,
        params: MMPParams {
            mu: p[0],
            chi: p[1],
            kappa: p[2],
            gamma: p[3],
            nu: p[4],
        },
    })
}

/// Reads the header only.
pub fn read_header(bytes: &[u8]) -> Result<SnapshotHeader> {
    parse_header(&mut Cursor { bytes, pos: 0 })
}

/// Parses a complete snapshot; trailing bytes are an error.
pub fn read_snapshot<R: Read>(mut r: R) -> Result<(MMPState, MMPParams)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut c = Cursor {
        bytes: &bytes,
        pos: 0,
    };
    let header = parse_header(&mut c)?;
    let grid = Grid::periodic(header.n as usize).map_err(|e| Error::Snapshot(e.to_string()))?;
    let len = grid.len();
    let mut fields = Vec::with_capacity(3);
    for _ in 0..3 {
        let mut comps: [Vec<Complex64>; 3] = Default::default();
        for comp in comps.iter_mut() {
            comp.reserve(len);
            for _ in 0..len {
                let re = c.f64()?;
                let im = c.f64()?;
                comp.push(Complex64::new(re, im));
            }
        }
        fields.push(SpectralVectorField::from_components(&grid, comps)?);
    }
    if c.pos != bytes.len() {
        return Err(Error::Snapshot(format!(
            "{} unexpected trailing bytes",
            bytes.len() - c.pos
        )));
    }
    let b = fields.pop().expect("b");
    let omega = fields.pop().expect("omega");
    let u = fields.pop().expect("u");
    let state = MMPState {
        u,
        omega,
        b,
        time: header.time,
    };
    Ok((state, header.params))
}

pub fn save_snapshot(path: &Path, state: &MMPState, params: &MMPParams) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_snapshot(&mut w, state, params)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<(MMPState, MMPParams)> {
    read_snapshot(std::fs::File::open(path)?)
}
