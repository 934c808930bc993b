//! Model selection and run configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::domain::ChannelConfig;
use crate::{Error, Result};

/// Which regularized system to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    Ns,
    LnsAlpha(f64),
    LerayAlpha(f64),
}

impl ModelKind {
    pub fn alpha(&self) -> f64 {
        match *self {
            ModelKind::Ns => 0.0,
            ModelKind::LnsAlpha(a) | ModelKind::LerayAlpha(a) => a,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.alpha();
        match self {
            ModelKind::Ns => Ok(()),
            _ if !(a.is_finite() && a >= 0.0) => Err(Error::Config(format!("alpha must be nonnegative, got {a}"))),
            ModelKind::LerayAlpha(_) if a == 0.0 => {
                Err(Error::Config("the Leray-alpha model needs alpha > 0; use the NS model for alpha = 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Same model family with a different `alpha` (NS for zero).
    pub fn with_alpha(&self, alpha: f64) -> ModelKind {
        match self {
            _ if alpha == 0.0 => ModelKind::Ns,
            ModelKind::LerayAlpha(_) => ModelKind::LerayAlpha(alpha),
            _ => ModelKind::LnsAlpha(alpha),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Ns => "ns",
            ModelKind::LnsAlpha(_) => "lns-alpha",
            ModelKind::LerayAlpha(_) => "leray-alpha",
        }
    }
}

/// Initial velocity before projection onto the Galerkin space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialCondition {
    Zero,
    /// Taylor-Green vortex modulated across the channel, plus a small seeded perturbation.
    TaylorGreen { amplitude: f64, perturbation: f64, seed: u64 },
    /// Single eigenmode (global index) with its conjugate partner.
    Mode { index: usize, amplitude: f64 },
    /// Field snapshot in the binary container format.
    File(PathBuf),
}

/// Everything needed for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub channel: ChannelConfig,
    pub model: ModelKind,
    /// Galerkin truncation; `None` keeps the full basis.
    pub modes: Option<usize>,
    pub dt: f64,
    pub t_end: f64,
    pub initial: InitialCondition,
    /// Write a snapshot every this many steps (0 disables).
    pub snapshot_every: usize,
    /// Switch the nonlinear term off (linear Stokes evolution).
    pub nonlinear: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            channel: ChannelConfig::default(),
            model: ModelKind::LnsAlpha(1e-2),
            modes: None,
            dt: 1e-3,
            t_end: 0.25,
            initial: InitialCondition::TaylorGreen { amplitude: 1.0, perturbation: 0.05, seed: 7 },
            snapshot_every: 0,
            nonlinear: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.model.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.modes == Some(0) {
            return Err(Error::Config("modes must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of whole steps covering `[0, t_end]`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}
