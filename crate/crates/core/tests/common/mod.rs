//! Dense reference evaluations shared by the integration tests.
//!
//! Everything here works point by point: horizontal sums are explicit
//! exponentials, the wall-normal derivative is rebuilt from the node set.

#![allow(dead_code)]

use alphaflow::domain::{Field, Grid};
use alphaflow::C64;

pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Barycentric differentiation matrix on arbitrary distinct nodes.
pub fn diff_matrix(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let w: Vec<f64> = (0..n)
        .map(|j| 1.0 / (0..n).filter(|&k| k != j).map(|k| x[j] - x[k]).product::<f64>())
        .collect();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if i != j {
                d[i][j] = (w[j] / w[i]) / (x[i] - x[j]);
                s += d[i][j];
            }
        }
        d[i][i] = -s;
    }
    d
}

/// Point values of a vector field and its gradient, `grad[a][b] = d_b u_a`.
pub struct Dense {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub vals: [Vec<C64>; 3],
    pub grad: [[Vec<C64>; 3]; 3],
}

impl Dense {
    pub fn idx(&self, ix: usize, iy: usize, z: usize) -> usize {
        (ix * self.ny + iy) * self.nz + z
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn at(&self, i: usize) -> [C64; 3] {
        [self.vals[0][i], self.vals[1][i], self.vals[2][i]]
    }

    pub fn curl_at(&self, i: usize) -> [C64; 3] {
        let g = &self.grad;
        [g[2][1][i] - g[1][2][i], g[0][2][i] - g[2][0][i], g[1][0][i] - g[0][1][i]]
    }
}

pub fn dz_column(d: &[Vec<f64>], col: &[C64]) -> Vec<C64> {
    d.iter().map(|row| row.iter().zip(col).map(|(a, b)| b * *a).sum()).collect()
}

/// Evaluate a spectral field at every grid point by explicit summation.
pub fn evaluate(g: &Grid, f: &Field) -> Dense {
    let (nx, ny, nz) = (g.nx(), g.ny(), g.nz());
    let (lx, ly) = (g.config.lx, g.config.ly);
    let d = diff_matrix(&g.lobatto.nodes);
    let n = nx * ny * nz;
    let zero = || vec![C64::new(0.0, 0.0); n];
    let mut out = Dense {
        nx,
        ny,
        nz,
        vals: [zero(), zero(), zero()],
        grad: [[zero(), zero(), zero()], [zero(), zero(), zero()], [zero(), zero(), zero()]],
    };
    for a in 0..3 {
        let s = &f.comps[a];
        for kx in 0..nx {
            for ky in 0..ny {
                let col = s.column(kx, ky);
                if col.iter().all(|c| c.norm() == 0.0) {
                    continue;
                }
                let ax = 2.0 * std::f64::consts::PI * wavenumber(kx, nx) as f64 / lx;
                let ay = 2.0 * std::f64::consts::PI * wavenumber(ky, ny) as f64 / ly;
                let dcol = dz_column(&d, col);
                for ix in 0..nx {
                    for iy in 0..ny {
                        let (x, y) = (ix as f64 * lx / nx as f64, iy as f64 * ly / ny as f64);
                        let ph = C64::from_polar(1.0, ax * x + ay * y);
                        for z in 0..nz {
                            let i = out.idx(ix, iy, z);
                            out.vals[a][i] += col[z] * ph;
                            out.grad[a][0][i] += col[z] * ph * C64::new(0.0, ax);
                            out.grad[a][1][i] += col[z] * ph * C64::new(0.0, ay);
                            out.grad[a][2][i] += dcol[z] * ph;
                        }
                    }
                }
            }
        }
    }
    out
}

/// `int conj(a) . b` by the tensor quadrature on the grid points.
pub fn quad_inner(g: &Grid, a: &[Vec<C64>; 3], b: &[Vec<C64>; 3]) -> C64 {
    let (nx, ny, nz) = (g.nx(), g.ny(), g.nz());
    let cell = g.config.lx * g.config.ly / (nx * ny) as f64;
    let mut s = C64::new(0.0, 0.0);
    for ix in 0..nx {
        for iy in 0..ny {
            for z in 0..nz {
                let i = (ix * ny + iy) * nz + z;
                let w = g.lobatto.weights[z] * cell;
                for c in 0..3 {
                    s += a[c][i].conj() * b[c][i] * w;
                }
            }
        }
    }
    s
}

/// Same over the two walls.
pub fn quad_wall(g: &Grid, a: &[Vec<C64>; 3], b: &[Vec<C64>; 3]) -> C64 {
    let (nx, ny, nz) = (g.nx(), g.ny(), g.nz());
    let cell = g.config.lx * g.config.ly / (nx * ny) as f64;
    let mut s = C64::new(0.0, 0.0);
    for ix in 0..nx {
        for iy in 0..ny {
            for z in [0, nz - 1] {
                let i = (ix * ny + iy) * nz + z;
                for c in 0..3 {
                    s += a[c][i].conj() * b[c][i] * cell;
                }
            }
        }
    }
    s
}

pub fn cross(a: [C64; 3], b: [C64; 3]) -> [C64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Point values of `curl v x u`.
pub fn rotational(g: &Grid, v: &Field, u: &Field) -> [Vec<C64>; 3] {
    let (dv, du) = (evaluate(g, v), evaluate(g, u));
    let n = dv.len();
    let mut out = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    for i in 0..n {
        let c = cross(dv.curl_at(i), du.at(i));
        for a in 0..3 {
            out[a][i] = c[a];
        }
    }
    out
}

/// `(e, (u.grad v + div(u v^T)) / 2)` with the flux derivative moved onto `e`
/// horizontally and applied to the nodal flux in `z`.
pub fn skew_projection(g: &Grid, v: &Field, u: &Field, e: &Field) -> C64 {
    let (dv, du, de) = (evaluate(g, v), evaluate(g, u), evaluate(g, e));
    let (nx, ny, nz) = (g.nx(), g.ny(), g.nz());
    let d = diff_matrix(&g.lobatto.nodes);
    let cell = g.config.lx * g.config.ly / (nx * ny) as f64;
    let mut s = C64::new(0.0, 0.0);
    for ix in 0..nx {
        for iy in 0..ny {
            let base = (ix * ny + iy) * nz;
            for a in 0..3 {
                let flux: Vec<C64> = (0..nz).map(|z| du.vals[2][base + z] * dv.vals[a][base + z]).collect();
                let dflux = dz_column(&d, &flux);
                for z in 0..nz {
                    let i = base + z;
                    let w = g.lobatto.weights[z] * cell;
                    let adv: C64 = (0..3).map(|c| du.vals[c][i] * dv.grad[a][c][i]).sum();
                    let horizontal: C64 =
                        (0..2).map(|c| de.grad[a][c][i].conj() * du.vals[c][i] * dv.vals[a][i]).sum();
                    s += 0.5 * w * (de.vals[a][i].conj() * (adv + dflux[z]) - horizontal);
                }
            }
        }
    }
    s
}

/// Dormand-Prince 5(4) with step control on `c' = f(c)`.
pub fn dopri(f: impl Fn(C64) -> C64, c0: C64, t_end: f64, out: &[f64], tol: f64) -> Vec<C64> {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut res = Vec::new();
    let (mut t, mut c, mut h): (f64, C64, f64) = (0.0, c0, 1e-3);
    let mut next = 0;
    while next < out.len() && out[next] <= 0.0 {
        res.push(c);
        next += 1;
    }
    while t < t_end && next < out.len() {
        let h_try = h.min(out[next] - t);
        let mut k = [C64::new(0.0, 0.0); 7];
        k[0] = f(c);
        for s in 0..6 {
            let mut y = c;
            for (j, a) in A[s].iter().enumerate().take(s + 1) {
                y += k[j] * (h_try * a);
            }
            k[s + 1] = f(y);
        }
        let mut y = c;
        for j in 0..6 {
            y += k[j] * (h_try * A[5][j]);
        }
        let err: f64 = k.iter().zip(E).map(|(kj, e)| kj * e).sum::<C64>().norm() * h_try;
        let scale = tol * (1.0 + c.norm());
        if err <= scale {
            t += h_try;
            c = y;
            if (t - out[next]).abs() < 1e-14 {
                res.push(c);
                next += 1;
            }
        }
        h = h_try * (0.9 * (scale / err.max(1e-300)).powf(0.2)).clamp(0.2, 5.0);
    }
    res
}
