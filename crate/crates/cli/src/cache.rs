//! Eigenbasis cache directory, guarded by a lock file.

use std::fs::{self, File};
use std::path::PathBuf;

use alphaflow::hodge::Hodge;
use alphaflow::stokes::{cache, FormKind, StokesEigenbasis};

use crate::CliError;

pub const CACHE_ENV: &str = "ALPHAFLOW_CACHE_DIR";

pub fn cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(d).join("alphaflow");
    }
    match std::env::var_os("HOME") {
        Some(h) => PathBuf::from(h).join(".cache").join("alphaflow"),
        None => std::env::temp_dir().join("alphaflow-cache"),
    }
}

/// Load the basis from the cache or compute and store it, holding the lock throughout.
pub fn eigenbasis(hodge: &Hodge, kind: FormKind) -> Result<StokesEigenbasis, CliError> {
    let dir = cache_dir();
    fs::create_dir_all(&dir)?;
    let lock = File::create(dir.join(".lock"))?;
    lock.lock()?;
    let grid = hodge.grid.clone();
    let out = match cache::load(&dir, &grid, kind) {
        Some(b) => {
            log::info!("eigenbasis loaded from {}", dir.display());
            Ok(b)
        }
        None => {
            let b = StokesEigenbasis::compute(hodge, kind)?;
            match cache::store(&dir, &b) {
                Ok(p) => log::info!("eigenbasis cached at {}", p.display()),
                Err(e) => log::warn!("could not write the eigenbasis cache: {e}"),
            }
            Ok(b)
        }
    };
    lock.unlock()?;
    out
}
