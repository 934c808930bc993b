use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Geometry and discretization of the periodic channel
/// `[0, lx) x [0, ly) x [0, 1]` with flat slip walls at `z = 0` and `z = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    /// Number of Legendre-Gauss-Lobatto nodes across the channel.
    pub nz: usize,
    /// Slip coefficient, the same constant on both walls.
    pub beta: f64,
    pub nu: f64,
    pub dealias: bool,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            lx: 2.0 * std::f64::consts::PI,
            ly: 2.0 * std::f64::consts::PI,
            nx: 16,
            ny: 16,
            nz: 33,
            beta: 0.0,
            nu: 1.0,
            dealias: true,
        }
    }
}

impl ChannelConfig {
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize, nz: usize, beta: f64) -> Result<Self> {
        let cfg = Self {
            lx,
            ly,
            nx,
            ny,
            nz,
            beta,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lx.is_finite() && self.lx > 0.0) {
            return Err(Error::Config(format!("lx must be positive, got {}", self.lx)));
        }
        if !(self.ly.is_finite() && self.ly > 0.0) {
            return Err(Error::Config(format!("ly must be positive, got {}", self.ly)));
        }
        if self.nx == 0 || self.nx % 2 != 0 {
            return Err(Error::Config(format!("nx must be even and positive, got {}", self.nx)));
        }
        if self.ny == 0 || self.ny % 2 != 0 {
            return Err(Error::Config(format!("ny must be even and positive, got {}", self.ny)));
        }
        if self.nz < 3 {
            return Err(Error::Config(format!("nz must be at least 3, got {}", self.nz)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::Config(format!("beta must be nonnegative, got {}", self.beta)));
        }
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::Config(format!("nu must be positive, got {}", self.nu)));
        }
        Ok(())
    }

    /// SHA-256 over a canonical byte encoding of every field.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"channel-v1");
        h.update(self.lx.to_le_bytes());
        h.update(self.ly.to_le_bytes());
        h.update((self.nx as u64).to_le_bytes());
        h.update((self.ny as u64).to_le_bytes());
        h.update((self.nz as u64).to_le_bytes());
        h.update(self.beta.to_le_bytes());
        h.update(self.nu.to_le_bytes());
        h.update([self.dealias as u8]);
        h.finalize().into()
    }

    /// Horizontal area `lx * ly`.
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }
}
