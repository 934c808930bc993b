use std::f64::consts::PI;
use std::sync::Arc;

use super::config::ChannelConfig;
use super::gll::Lobatto;
use crate::Result;

/// One horizontal wavenumber together with its storage index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber {
    /// Signed integer wavenumbers.
    pub kx: i64,
    pub ky: i64,
    /// Storage indices in FFT order.
    pub ix: usize,
    pub iy: usize,
    /// Physical wavenumbers `2 pi k / L`.
    pub kappa_x: f64,
    pub kappa_y: f64,
}

impl Wavenumber {
    pub fn kappa_sq(&self) -> f64 {
        self.kappa_x * self.kappa_x + self.kappa_y * self.kappa_y
    }

    pub fn is_mean(&self) -> bool {
        self.kx == 0 && self.ky == 0
    }

    /// Canonical half of each `(k, -k)` pair: `kx > 0`, or `kx == 0 && ky >= 0`.
    pub fn is_canonical(&self) -> bool {
        self.kx > 0 || (self.kx == 0 && self.ky >= 0)
    }
}

/// Discretization context shared by every operator.
#[derive(Debug)]
pub struct Grid {
    pub config: ChannelConfig,
    pub lobatto: Lobatto,
    /// Active (retained) wavenumbers sorted lexicographically by `(kx, ky)`.
    pub blocks: Vec<Wavenumber>,
    block_of: Vec<Option<usize>>,
}

pub type GridRef = Arc<Grid>;

fn signed(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Largest retained `|k|` in a direction with `n` points.
fn kmax(n: usize, dealias: bool) -> i64 {
    if dealias {
        // keep |k| < n / 3
        ((n as i64) + 2) / 3 - 1
    } else {
        n as i64 / 2 - 1
    }
}

impl Grid {
    pub fn new(config: ChannelConfig) -> Result<GridRef> {
        config.validate()?;
        let lobatto = Lobatto::new(config.nz);
        let (kx_max, ky_max) = (kmax(config.nx, config.dealias), kmax(config.ny, config.dealias));
        let mut blocks = Vec::new();
        for ix in 0..config.nx {
            for iy in 0..config.ny {
                let (kx, ky) = (signed(ix, config.nx), signed(iy, config.ny));
                if kx.abs() <= kx_max && ky.abs() <= ky_max {
                    blocks.push(Wavenumber {
                        kx,
                        ky,
                        ix,
                        iy,
                        kappa_x: 2.0 * PI * kx as f64 / config.lx,
                        kappa_y: 2.0 * PI * ky as f64 / config.ly,
                    });
                }
            }
        }
        blocks.sort_by_key(|w| (w.kx, w.ky));
        let mut block_of = vec![None; config.nx * config.ny];
        for (b, w) in blocks.iter().enumerate() {
            block_of[w.ix * config.ny + w.iy] = Some(b);
        }
        Ok(Arc::new(Self {
            config,
            lobatto,
            blocks,
            block_of,
        }))
    }

    pub fn nx(&self) -> usize {
        self.config.nx
    }

    pub fn ny(&self) -> usize {
        self.config.ny
    }

    pub fn nz(&self) -> usize {
        self.config.nz
    }

    pub fn area(&self) -> f64 {
        self.config.area()
    }

    /// Block index of storage position `(ix, iy)`, if that wavenumber is retained.
    pub fn block_at(&self, ix: usize, iy: usize) -> Option<usize> {
        self.block_of[ix * self.config.ny + iy]
    }

    /// Block index of the conjugate wavenumber `-k`.
    pub fn partner(&self, b: usize) -> usize {
        let w = &self.blocks[b];
        let ix = (self.config.nx - w.ix) % self.config.nx;
        let iy = (self.config.ny - w.iy) % self.config.ny;
        self.block_at(ix, iy).expect("active set is symmetric")
    }

    pub fn mean_block(&self) -> usize {
        self.block_at(0, 0).expect("mean mode is always active")
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.config == other.config
    }
}
