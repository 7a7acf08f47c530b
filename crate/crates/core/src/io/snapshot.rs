//! Binary snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 5     | magic `HSYN1` |
//! | 4     | `u32` grid size `n` |
//! | 8     | `f64` time |
//! | 24    | `f64` nu, mu, eta |
//! | ...   | one block per field |
//!
//! A block holds `n^3 * 3` complex coefficients as `(re, im)` `f64` pairs in
//! row-major `(k1, k2, k3, component)` order, each wavenumber index running
//! in FFT order (`0, 1, ..., n/2 - 1, -n/2, ..., -1`). Hall-MHD states store
//! `u` then `b`; EMHD states store `b` only. The number of blocks follows
//! from the file length.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::{Complex64, Grid, SpectralField};

pub const MAGIC: &[u8; 5] = b"HSYN1";
const HEADER_LEN: usize = 5 + 4 + 8 * 4;

/// Decoded snapshot.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub nu: f64,
    pub mu: f64,
    pub eta: f64,
    pub fields: Vec<SpectralField>,
}

pub fn encode_snapshot(t: f64, nu: f64, mu: f64, eta: f64, fields: &[&SpectralField]) -> Result<Vec<u8>> {
    let Some(first) = fields.first() else {
        return Err(Error::Snapshot("no fields to write".into()));
    };
    let grid = first.grid();
    for f in fields {
        grid.ensure_same(f.grid())?;
    }
    let n = grid.n();
    let len = grid.len();
    let mut out = Vec::with_capacity(HEADER_LEN + fields.len() * len * 48);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for x in [t, nu, mu, eta] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for f in fields {
        let comps = [f.component(0), f.component(1), f.component(2)];
        for idx in 0..len {
            for c in &comps {
                out.extend_from_slice(&c[idx].re.to_le_bytes());
                out.extend_from_slice(&c[idx].im.to_le_bytes());
            }
        }
    }
    Ok(out)
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Snapshot("file shorter than the header".into()));
    }
    if &bytes[..5] != MAGIC {
        return Err(Error::Snapshot("bad magic, expected HSYN1".into()));
    }
    let n = u32::from_le_bytes(bytes[5..9].try_into().expect("4 bytes")) as usize;
    let grid = Grid::new(n)?;
    let (t, nu, mu, eta) = (f64_at(bytes, 9), f64_at(bytes, 17), f64_at(bytes, 25), f64_at(bytes, 33));
    let len = grid.len();
    let block = len * 3 * 16;
    let body = &bytes[HEADER_LEN..];
    if body.is_empty() || body.len() % block != 0 {
        return Err(Error::Snapshot(format!(
            "body of {} bytes is not a whole number of {block}-byte fields",
            body.len()
        )));
    }
    let mut fields = Vec::new();
    for chunk in body.chunks_exact(block) {
        let mut coeffs = vec![Complex64::default(); 3 * len];
        for idx in 0..len {
            for c in 0..3 {
                let at = (idx * 3 + c) * 16;
                coeffs[c * len + idx] = Complex64::new(f64_at(chunk, at), f64_at(chunk, at + 8));
            }
        }
        let mut f = SpectralField::from_coeffs(&grid, coeffs);
        f.check_hermitian()?;
        f.mark_divergence_free();
        fields.push(f);
    }
    Ok(Snapshot { t, nu, mu, eta, fields })
}

pub fn write_snapshot(
    path: impl AsRef<Path>,
    t: f64,
    nu: f64,
    mu: f64,
    eta: f64,
    fields: &[&SpectralField],
) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_snapshot(t, nu, mu, eta, fields)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes)
}
