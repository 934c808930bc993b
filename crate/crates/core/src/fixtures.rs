//! Seeded random fields for tests, property checks and the CLI checks.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::gll::legendre_all;
use crate::domain::{Field, Grid};
use crate::C64;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fill canonical blocks with `draw`, mirror conjugates onto the partners.
fn hermitian_from(grid: &Grid, mut draw: impl FnMut(usize) -> DVector<C64>) -> Field {
    let mut blocks = vec![DVector::zeros(3 * grid.nz()); grid.blocks.len()];
    for (b, w) in grid.blocks.iter().enumerate() {
        if !w.is_canonical() {
            continue;
        }
        let mut v = draw(b);
        if w.is_mean() {
            v.iter_mut().for_each(|c| c.im = 0.0);
        }
        let p = grid.partner(b);
        blocks[p] = v.map(|c| c.conj());
        blocks[b] = v;
    }
    Field::from_blocks(grid, &blocks)
}

/// Independent Gaussian-like nodal values on every retained mode.
pub fn random_field(grid: &Grid, seed: u64) -> Field {
    let mut r = rng(seed);
    let n = 3 * grid.nz();
    hermitian_from(grid, |_| {
        DVector::from_fn(n, |_, _| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
    })
}

/// Field with spectrally decaying horizontal modes and low-degree Legendre profiles.
pub fn smooth_random_field(grid: &Grid, seed: u64) -> Field {
    let mut r = rng(seed);
    let nz = grid.nz();
    let lob = &grid.lobatto;
    let degree = nz.min(8);
    hermitian_from(grid, |b| {
        let w = &grid.blocks[b];
        let amp = (-(w.kx * w.kx + w.ky * w.ky) as f64 / 4.0).exp();
        let mut v = DVector::zeros(3 * nz);
        for c in 0..3 {
            let coef: Vec<C64> = (0..degree)
                .map(|m| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * amp / (1.0 + m as f64).powi(2))
                .collect();
            for z in 0..nz {
                let p = legendre_all(degree, 2.0 * lob.nodes[z] - 1.0);
                v[c * nz + z] = coef.iter().zip(&p).map(|(a, l)| a * l).sum();
            }
        }
        v
    })
}

/// Uniform draws in `[lo, hi)` for scalar parameters.
pub fn random_scalars(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..count).map(|_| r.gen_range(lo..hi)).collect()
}
