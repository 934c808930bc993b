//! Differential operators and discrete inner products.
//!
//! Horizontal derivatives are exact multiplications by `i kappa`; the
//! wall-normal derivative is the Lobatto collocation derivative. Every
//! operator acts block-diagonally in the horizontal wavenumber, and the
//! per-block kernels below are shared with the dense matrix assembly of the
//! Stokes module.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::field::{Field, ScalarField};
use super::gll::Lobatto;
use super::grid::{Grid, Wavenumber};
use crate::{Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// `D v` for one wall-normal profile.
pub fn apply_deriv(lob: &Lobatto, v: &[C64]) -> Vec<C64> {
    let n = lob.len();
    (0..n)
        .map(|i| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += v[j] * lob.deriv[(i, j)];
            }
            acc
        })
        .collect()
}

pub fn block_curl(w: &Wavenumber, lob: &Lobatto, u: &DVector<C64>) -> DVector<C64> {
    let n = lob.len();
    let (ux, uy, uz) = (&u.as_slice()[..n], &u.as_slice()[n..2 * n], &u.as_slice()[2 * n..]);
    let dux = apply_deriv(lob, ux);
    let duy = apply_deriv(lob, uy);
    let (ikx, iky) = (I * w.kappa_x, I * w.kappa_y);
    let mut out = DVector::zeros(3 * n);
    for j in 0..n {
        out[j] = iky * uz[j] - duy[j];
        out[n + j] = dux[j] - ikx * uz[j];
        out[2 * n + j] = ikx * uy[j] - iky * ux[j];
    }
    out
}

pub fn block_div(w: &Wavenumber, lob: &Lobatto, u: &DVector<C64>) -> DVector<C64> {
    let n = lob.len();
    let duz = apply_deriv(lob, &u.as_slice()[2 * n..]);
    let (ikx, iky) = (I * w.kappa_x, I * w.kappa_y);
    DVector::from_fn(n, |j, _| ikx * u[j] + iky * u[n + j] + duz[j])
}

pub fn block_grad(w: &Wavenumber, lob: &Lobatto, s: &[C64]) -> DVector<C64> {
    let n = lob.len();
    let ds = apply_deriv(lob, s);
    let (ikx, iky) = (I * w.kappa_x, I * w.kappa_y);
    let mut out = DVector::zeros(3 * n);
    for j in 0..n {
        out[j] = ikx * s[j];
        out[n + j] = iky * s[j];
        out[2 * n + j] = ds[j];
    }
    out
}

/// Velocity gradient `G[a][b] = d_b u_a`, each entry a wall-normal profile.
pub fn block_velocity_gradient(w: &Wavenumber, lob: &Lobatto, u: &DVector<C64>) -> [[Vec<C64>; 3]; 3] {
    let n = lob.len();
    let (ikx, iky) = (I * w.kappa_x, I * w.kappa_y);
    let comp = |a: usize| &u.as_slice()[a * n..(a + 1) * n];
    let row = |a: usize| -> [Vec<C64>; 3] {
        let c = comp(a);
        [
            c.iter().map(|v| ikx * v).collect(),
            c.iter().map(|v| iky * v).collect(),
            apply_deriv(lob, c),
        ]
    };
    [row(0), row(1), row(2)]
}

/// `sum_z w_z conj(a) b` over all stacked components (no area factor).
pub fn block_inner(lob: &Lobatto, a: &[C64], b: &[C64]) -> C64 {
    let n = lob.len();
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| x.conj() * y * lob.weights[i % n])
        .sum()
}

/// Wall trace pairing `conj(a(0)).b(0) + conj(a(1)).b(1)` summed over components.
pub fn block_wall_inner(lob: &Lobatto, a: &[C64], b: &[C64]) -> C64 {
    let n = lob.len();
    let mut acc = C64::new(0.0, 0.0);
    for c in 0..a.len() / n {
        acc += a[c * n].conj() * b[c * n] + a[c * n + n - 1].conj() * b[c * n + n - 1];
    }
    acc
}

/// Dense `3n x 3n` curl matrix of one block.
pub fn curl_matrix(w: &Wavenumber, lob: &Lobatto) -> DMatrix<C64> {
    let n = lob.len();
    let mut m = DMatrix::zeros(3 * n, 3 * n);
    let (ikx, iky) = (I * w.kappa_x, I * w.kappa_y);
    for i in 0..n {
        m[(i, 2 * n + i)] += iky;
        m[(n + i, 2 * n + i)] -= ikx;
        m[(2 * n + i, n + i)] += ikx;
        m[(2 * n + i, i)] -= iky;
        for j in 0..n {
            let d = C64::new(lob.deriv[(i, j)], 0.0);
            m[(i, n + j)] -= d;
            m[(n + i, j)] += d;
        }
    }
    m
}

/// Dense `9n x 3n` map to the symmetric gradient `S(u)` (row blocks `(a, b)`).
pub fn strain_matrix(w: &Wavenumber, lob: &Lobatto) -> DMatrix<C64> {
    let n = lob.len();
    let (ikx, iky) = (I * w.kappa_x, I * w.kappa_y);
    // grad[a][b]: block n x n giving d_b u_a from u_a
    let mut m = DMatrix::zeros(9 * n, 3 * n);
    for a in 0..3 {
        for b in 0..3 {
            let row0 = (3 * a + b) * n;
            // 0.5 * (d_b u_a + d_a u_b)
            for (comp, dir) in [(a, b), (b, a)] {
                for i in 0..n {
                    match dir {
                        0 => m[(row0 + i, comp * n + i)] += ikx * 0.5,
                        1 => m[(row0 + i, comp * n + i)] += iky * 0.5,
                        _ => {
                            for j in 0..n {
                                m[(row0 + i, comp * n + j)] += C64::new(0.5 * lob.deriv[(i, j)], 0.0);
                            }
                        }
                    }
                }
            }
        }
    }
    m
}

/// Diagonal of the block mass matrix (Lobatto weights, repeated per component).
pub fn mass_diagonal(lob: &Lobatto, ncomp: usize) -> DVector<f64> {
    let n = lob.len();
    DVector::from_fn(ncomp * n, |i, _| lob.weights[i % n])
}

fn map_blocks(grid: &Grid, f: &Field, op: impl Fn(&Wavenumber, &DVector<C64>) -> DVector<C64> + Sync) -> Field {
    let out: Vec<DVector<C64>> = grid
        .blocks
        .par_iter()
        .enumerate()
        .map(|(b, w)| op(w, &f.block(grid, b)))
        .collect();
    Field::from_blocks(grid, &out)
}

pub fn curl(grid: &Grid, f: &Field) -> Result<Field> {
    f.check_grid(grid)?;
    Ok(map_blocks(grid, f, |w, u| block_curl(w, &grid.lobatto, u)))
}

pub fn divergence(grid: &Grid, f: &Field) -> Result<ScalarField> {
    f.check_grid(grid)?;
    let cols: Vec<DVector<C64>> = grid
        .blocks
        .par_iter()
        .enumerate()
        .map(|(b, w)| block_div(w, &grid.lobatto, &f.block(grid, b)))
        .collect();
    let mut out = ScalarField::zeros(grid);
    for (w, c) in grid.blocks.iter().zip(&cols) {
        out.column_mut(w.ix, w.iy).copy_from_slice(c.as_slice());
    }
    Ok(out)
}

pub fn gradient(grid: &Grid, s: &ScalarField) -> Result<Field> {
    s.check_grid(grid)?;
    let cols: Vec<DVector<C64>> = grid
        .blocks
        .par_iter()
        .map(|w| block_grad(w, &grid.lobatto, s.column(w.ix, w.iy)))
        .collect();
    Ok(Field::from_blocks(grid, &cols))
}

/// Deterministic ordered sum of per-block contributions.
pub fn ordered_sum(parts: Vec<f64>) -> f64 {
    parts.into_iter().fold(0.0, |a, b| a + b)
}

/// `(f, g) = int_Omega f . g`.
pub fn inner_product(grid: &Grid, f: &Field, g: &Field) -> Result<f64> {
    f.check_grid(grid)?;
    g.check_grid(grid)?;
    let (nx, ny, nz) = (grid.nx(), grid.ny(), grid.nz());
    let lob = &grid.lobatto;
    let parts: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|p| {
            let mut acc = 0.0;
            for c in 0..3 {
                let a = &f.comps[c].coeffs[p * nz..(p + 1) * nz];
                let b = &g.comps[c].coeffs[p * nz..(p + 1) * nz];
                for z in 0..nz {
                    acc += lob.weights[z] * (a[z].conj() * b[z]).re;
                }
            }
            acc
        })
        .collect();
    Ok(grid.area() * ordered_sum(parts))
}

pub fn scalar_inner_product(grid: &Grid, f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.check_grid(grid)?;
    g.check_grid(grid)?;
    let lob = &grid.lobatto;
    let nz = grid.nz();
    let parts: Vec<f64> = f
        .coeffs
        .par_chunks(nz)
        .zip(g.coeffs.par_chunks(nz))
        .map(|(a, b)| (0..nz).map(|z| lob.weights[z] * (a[z].conj() * b[z]).re).sum())
        .collect();
    Ok(grid.area() * ordered_sum(parts))
}

pub fn norm(grid: &Grid, f: &Field) -> Result<f64> {
    Ok(inner_product(grid, f, f)?.max(0.0).sqrt())
}

/// Wall pairing `int_{dOmega} f . g` over both walls.
pub fn wall_inner_product(grid: &Grid, f: &Field, g: &Field) -> Result<f64> {
    f.check_grid(grid)?;
    g.check_grid(grid)?;
    let parts: Vec<f64> = (0..grid.blocks.len())
        .into_par_iter()
        .map(|b| block_wall_inner(&grid.lobatto, f.block(grid, b).as_slice(), g.block(grid, b).as_slice()).re)
        .collect();
    Ok(grid.area() * ordered_sum(parts))
}

/// `a_beta(f, g) = int_{dOmega} beta f.g + int_Omega curl f . curl g`.
pub fn form_a_beta(grid: &Grid, f: &Field, g: &Field) -> Result<f64> {
    form_vsb(grid, grid.config.beta, f, g)
}

/// Vorticity-slip form with an explicit slip coefficient.
pub fn form_vsb(grid: &Grid, beta: f64, f: &Field, g: &Field) -> Result<f64> {
    let cf = curl(grid, f)?;
    let cg = curl(grid, g)?;
    Ok(inner_product(grid, &cf, &cg)? + beta * wall_inner_product(grid, f, g)?)
}

/// Navier-slip form `int gamma f.g + 2 int S(f) : S(g)`.
pub fn form_nsb(grid: &Grid, gamma: f64, f: &Field, g: &Field) -> Result<f64> {
    f.check_grid(grid)?;
    g.check_grid(grid)?;
    let lob = &grid.lobatto;
    let parts: Vec<f64> = grid
        .blocks
        .par_iter()
        .enumerate()
        .map(|(b, w)| {
            let gf = block_velocity_gradient(w, lob, &f.block(grid, b));
            let gg = block_velocity_gradient(w, lob, &g.block(grid, b));
            let mut acc = 0.0;
            for a in 0..3 {
                for c in 0..3 {
                    for z in 0..lob.len() {
                        let sf = (gf[a][c][z] + gf[c][a][z]) * 0.5;
                        let sg = (gg[a][c][z] + gg[c][a][z]) * 0.5;
                        acc += 2.0 * lob.weights[z] * (sf.conj() * sg).re;
                    }
                }
            }
            acc
        })
        .collect();
    Ok(grid.area() * ordered_sum(parts) + gamma * wall_inner_product(grid, f, g)?)
}

/// Discrete `H^1` norm `(|f|^2 + |grad f|^2)^{1/2}`.
pub fn h1_norm(grid: &Grid, f: &Field) -> Result<f64> {
    f.check_grid(grid)?;
    let lob = &grid.lobatto;
    let parts: Vec<f64> = grid
        .blocks
        .par_iter()
        .enumerate()
        .map(|(b, w)| {
            let u = f.block(grid, b);
            let gr = block_velocity_gradient(w, lob, &u);
            let mut acc = block_inner(lob, u.as_slice(), u.as_slice()).re;
            for row in &gr {
                for col in row {
                    acc += block_inner(lob, col, col).re;
                }
            }
            acc
        })
        .collect();
    Ok((grid.area() * ordered_sum(parts)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::config::ChannelConfig;
    use crate::domain::field::PhysicalField;
    use crate::domain::transform::Transformer;
    use std::f64::consts::PI;

    fn setup() -> (std::sync::Arc<Grid>, Transformer) {
        let g = Grid::new(ChannelConfig { nx: 8, ny: 8, nz: 17, ..ChannelConfig::default() }).unwrap();
        let t = Transformer::new(&g);
        (g, t)
    }

    #[test]
    fn curl_of_sine_profile() {
        let (g, t) = setup();
        let f = t.to_spectral(&PhysicalField::from_fn(&g, |_, _, z| [(PI * z).sin(), 0.0, 0.0]), &g).unwrap();
        let c = t.to_physical(&curl(&g, &f).unwrap()).unwrap();
        let expect = PhysicalField::from_fn(&g, |_, _, z| [0.0, PI * (PI * z).cos(), 0.0]);
        assert!(c.max_abs_diff(&expect) < 1e-9);
    }

    #[test]
    fn constants_have_no_derivatives() {
        let (g, t) = setup();
        let f = t.to_spectral(&PhysicalField::from_fn(&g, |_, _, _| [1.0, -2.0, 3.0]), &g).unwrap();
        assert!(curl(&g, &f).unwrap().max_abs() < 1e-12);
        let s = t
            .scalar_to_spectral(&crate::domain::field::PhysicalScalar::from_fn(&g, |_, _, _| 4.0), Some(&g))
            .unwrap();
        assert!(gradient(&g, &s).unwrap().max_abs() < 1e-11);
    }

    #[test]
    fn divergence_of_vertical_sine() {
        let (g, t) = setup();
        let f = t.to_spectral(&PhysicalField::from_fn(&g, |_, _, z| [0.0, 0.0, (PI * z).sin()]), &g).unwrap();
        let d = t.scalar_to_physical(&divergence(&g, &f).unwrap()).unwrap();
        let e = crate::domain::field::PhysicalScalar::from_fn(&g, |_, _, z| PI * (PI * z).cos());
        let err = d.values.iter().zip(&e.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn orthogonal_constant_components() {
        let (g, t) = setup();
        let ex = t.to_spectral(&PhysicalField::from_fn(&g, |_, _, _| [1.0, 0.0, 0.0]), &g).unwrap();
        let ey = t.to_spectral(&PhysicalField::from_fn(&g, |_, _, _| [0.0, 1.0, 0.0]), &g).unwrap();
        assert_eq!(inner_product(&g, &ex, &ey).unwrap(), 0.0);
        let vol = g.area();
        assert!((inner_product(&g, &ex, &ex).unwrap() - vol).abs() < 1e-12 * vol);
        let g0 = Grid::new(ChannelConfig { beta: 0.0, ..g.config.clone() }).unwrap();
        assert!(form_a_beta(&g0, &ex, &ex).unwrap().abs() < 1e-20);
    }

    #[test]
    fn matrices_match_matrix_free_kernels() {
        let (g, _) = setup();
        let w = g.blocks[7];
        let lob = &g.lobatto;
        let n = lob.len();
        let u = DVector::from_fn(3 * n, |i, _| C64::new((i as f64).sin(), (i as f64 * 0.7).cos()));
        let c1 = block_curl(&w, lob, &u);
        let c2 = curl_matrix(&w, lob) * &u;
        assert!((c1 - c2).norm() < 1e-10);
    }
}
