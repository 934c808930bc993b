//! On-disk eigenbasis cache (`ASPB` container).
//!
//! Layout: magic, `u32` version, 32-byte key, then `u64` block count and per
//! block `u64` mode count, `u64` profile length, the `mu` values and the
//! profiles column by column as `(re, im)` pairs.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use super::eigen::{EigenBlock, StokesEigenbasis};
use super::form::FormKind;
use crate::domain::io::{atomic_write, Decoder, Encoder};
use crate::domain::GridRef;
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"ASPB";
pub const VERSION: u32 = 1;

/// Cache key: configuration content hash combined with the form.
pub fn cache_key(grid: &GridRef, kind: FormKind) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(grid.config.content_hash());
    h.update([kind.tag()]);
    h.update(kind.coefficient().to_le_bytes());
    h.finalize().into()
}

pub fn cache_file_name(grid: &GridRef, kind: FormKind) -> String {
    let key = cache_key(grid, kind);
    let hex: String = key[..12].iter().map(|b| format!("{b:02x}")).collect();
    format!("spectrum-{hex}.aspb")
}

pub fn encode(basis: &StokesEigenbasis) -> Vec<u8> {
    let mut e = Encoder::default();
    e.bytes(MAGIC);
    e.u32(VERSION);
    e.bytes(&cache_key(&basis.grid, basis.kind));
    e.u64(basis.blocks.len() as u64);
    for b in &basis.blocks {
        e.u64(b.mu.len() as u64);
        e.u64(b.vectors.nrows() as u64);
        b.mu.iter().for_each(|v| e.f64(*v));
        b.vectors.iter().for_each(|v| e.c64(*v));
    }
    e.buf
}

pub fn decode(data: &[u8], grid: &GridRef, kind: FormKind) -> Result<StokesEigenbasis> {
    let mut d = Decoder::new(data);
    if d.take(4)? != MAGIC {
        return Err(Error::Format("bad magic, expected ASPB".into()));
    }
    let version = d.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported cache version {version}")));
    }
    if d.take(32)? != cache_key(grid, kind) {
        return Err(Error::Format("cache key does not match the configuration".into()));
    }
    let nblocks = d.usize()?;
    if nblocks != grid.blocks.len() {
        return Err(Error::Format("block count does not match the grid".into()));
    }
    let mut blocks = Vec::with_capacity(nblocks);
    for _ in 0..nblocks {
        let (m, rows) = (d.usize()?, d.usize()?);
        if rows != 3 * grid.nz() || m > rows {
            return Err(Error::Format("block shape does not match the grid".into()));
        }
        let mu = (0..m).map(|_| d.f64()).collect::<Result<Vec<_>>>()?;
        let vals = (0..m * rows).map(|_| d.c64()).collect::<Result<Vec<_>>>()?;
        blocks.push(EigenBlock { mu, vectors: DMatrix::from_vec(rows, m, vals) });
    }
    d.finish()?;
    Ok(StokesEigenbasis::from_blocks(grid.clone(), kind, blocks))
}

pub fn store(dir: &Path, basis: &StokesEigenbasis) -> Result<PathBuf> {
    let path = dir.join(cache_file_name(&basis.grid, basis.kind));
    atomic_write(&path, &encode(basis))?;
    Ok(path)
}

/// Load a cached basis if present and valid; a stale or corrupt file is ignored.
pub fn load(dir: &Path, grid: &GridRef, kind: FormKind) -> Option<StokesEigenbasis> {
    let path = dir.join(cache_file_name(grid, kind));
    let data = fs::read(&path).ok()?;
    match decode(&data, grid, kind) {
        Ok(b) => Some(b),
        Err(e) => {
            log::warn!("ignoring cache file {}: {e}", path.display());
            None
        }
    }
}
