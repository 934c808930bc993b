//! Little-endian binary containers and atomic file writes.
//!
//! Field snapshots use the `AFLD` layout: magic, `u32` version, `u64`
//! `nx, ny, nz`, `f64` `lx, ly, beta, nu`, then every stored coefficient in
//! row-major order `(ix, iy, component, z)` as `(re, im)` pairs.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::config::ChannelConfig;
use super::field::{Field, ScalarField};
use crate::{Error, Result, C64};

pub const FIELD_MAGIC: &[u8; 4] = b"AFLD";
pub const FIELD_VERSION: u32 = 1;

/// Append-only little-endian encoder.
#[derive(Debug, Default)]
pub struct Encoder {
    pub buf: Vec<u8>,
}

impl Encoder {
    pub fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    pub fn u32(&mut self, v: u32) {
        self.bytes(&v.to_le_bytes());
    }
    pub fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }
    pub fn f64(&mut self, v: f64) {
        self.bytes(&v.to_le_bytes());
    }
    pub fn c64(&mut self, v: C64) {
        self.f64(v.re);
        self.f64(v.im);
    }
}

/// Cursor over a byte slice; every read is bounds-checked.
#[derive(Debug)]
pub struct Decoder<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }
    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated container at byte {}", self.pos)))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    pub fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("size does not fit in memory".into()))
    }
    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    pub fn c64(&mut self) -> Result<C64> {
        Ok(C64::new(self.f64()?, self.f64()?))
    }
    pub fn finish(&self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Format(format!("{} trailing bytes", self.data.len() - self.pos)));
        }
        Ok(())
    }
}

/// Write via a sibling temporary file and rename, so readers never see a partial file.
pub fn atomic_write(path: &Path, data: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(data)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn encode_field(cfg: &ChannelConfig, f: &Field) -> Result<Vec<u8>> {
    let (nx, ny, nz) = f.shape();
    if (nx, ny, nz) != (cfg.nx, cfg.ny, cfg.nz) {
        return Err(Error::Config("field shape does not match the configuration".into()));
    }
    let mut e = Encoder::default();
    e.bytes(FIELD_MAGIC);
    e.u32(FIELD_VERSION);
    for v in [nx, ny, nz] {
        e.u64(v as u64);
    }
    for v in [cfg.lx, cfg.ly, cfg.beta, cfg.nu] {
        e.f64(v);
    }
    for ix in 0..nx {
        for iy in 0..ny {
            for c in &f.comps {
                c.column(ix, iy).iter().for_each(|v| e.c64(*v));
            }
        }
    }
    Ok(e.buf)
}

/// Decode a snapshot; returns the header (as a config with default flags) and the field.
pub fn decode_field(data: &[u8]) -> Result<(ChannelConfig, Field)> {
    let mut d = Decoder::new(data);
    if d.take(4)? != FIELD_MAGIC {
        return Err(Error::Format("bad magic, expected AFLD".into()));
    }
    let version = d.u32()?;
    if version != FIELD_VERSION {
        return Err(Error::Format(format!("unsupported field container version {version}")));
    }
    let (nx, ny, nz) = (d.usize()?, d.usize()?, d.usize()?);
    let (lx, ly, beta, nu) = (d.f64()?, d.f64()?, d.f64()?, d.f64()?);
    let cfg = ChannelConfig { lx, ly, nx, ny, nz, beta, nu, ..ChannelConfig::default() };
    cfg.validate().map_err(|e| Error::Format(format!("invalid header: {e}")))?;
    let payload = nx.checked_mul(ny).and_then(|v| v.checked_mul(nz * 48));
    if payload != Some(data.len() - 64) {
        return Err(Error::Format("payload length does not match the header".into()));
    }
    let mut comps = [ScalarField::with_shape(nx, ny, nz), ScalarField::with_shape(nx, ny, nz), ScalarField::with_shape(nx, ny, nz)];
    for ix in 0..nx {
        for iy in 0..ny {
            for c in comps.iter_mut() {
                for v in c.column_mut(ix, iy) {
                    *v = d.c64()?;
                }
            }
        }
    }
    d.finish()?;
    let [x, y, z] = comps;
    Ok((cfg, Field::from_components(x, y, z)?))
}

pub fn write_field(path: &Path, cfg: &ChannelConfig, f: &Field) -> Result<()> {
    atomic_write(path, &encode_field(cfg, f)?)
}

pub fn read_field(path: &Path) -> Result<(ChannelConfig, Field)> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    decode_field(&buf)
}
