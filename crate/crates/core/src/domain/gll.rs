//! Legendre-Gauss-Lobatto nodal basis on `[0, 1]`.
//!
//! The nodal basis consists of the Lagrange cardinal polynomials of degree
//! `n - 1` at the `n` Lobatto points. Quadrature with the Lobatto weights is
//! exact for polynomials of degree `2n - 3`, which makes the collocation
//! derivative satisfy summation by parts exactly:
//! `W D + D^T W = diag(-1, 0, ..., 0, 1)`.

use nalgebra::DMatrix;

/// Lobatto nodes, weights and the collocation derivative on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Lobatto {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `deriv[(i, j)] = l_j'(z_i)`.
    pub deriv: DMatrix<f64>,
    bary: Vec<f64>,
}

/// Legendre polynomials `P_0..=P_n` at `x` on `[-1, 1]`.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 2..=n {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
    }
    p
}

impl Lobatto {
    pub fn new(npts: usize) -> Self {
        assert!(npts >= 2, "need at least two Lobatto points");
        let n = npts - 1;
        let pi = std::f64::consts::PI;
        let mut x: Vec<f64> = (0..npts).map(|j| -(pi * j as f64 / n as f64).cos()).collect();
        let mut pn = vec![0.0; npts];
        for _ in 0..200 {
            let mut delta: f64 = 0.0;
            for j in 0..npts {
                let p = legendre_all(n, x[j]);
                let step = (x[j] * p[n] - p[n - 1]) / (npts as f64 * p[n]);
                x[j] -= step;
                delta = delta.max(step.abs());
                pn[j] = p[n];
            }
            if delta < 1e-16 {
                break;
            }
        }
        // symmetrize and pin the end points
        for j in 0..npts / 2 {
            let a = 0.5 * (x[n - j] - x[j]);
            x[j] = -a;
            x[n - j] = a;
        }
        if npts % 2 == 1 {
            x[n / 2] = 0.0;
        }
        x[0] = -1.0;
        x[n] = 1.0;
        for j in 0..npts {
            pn[j] = legendre_all(n, x[j])[n];
        }
        let nf = n as f64;
        let weights: Vec<f64> = pn.iter().map(|p| 1.0 / (nf * (nf + 1.0) * p * p)).collect();
        let nodes: Vec<f64> = x.iter().map(|xi| 0.5 * (xi + 1.0)).collect();

        let mut deriv = DMatrix::zeros(npts, npts);
        for i in 0..npts {
            let mut diag = 0.0;
            for j in 0..npts {
                if i != j {
                    let d = 2.0 * pn[i] / (pn[j] * (x[i] - x[j]));
                    deriv[(i, j)] = d;
                    diag -= d;
                }
            }
            deriv[(i, i)] = diag;
        }

        let mut bary = vec![1.0; npts];
        for j in 0..npts {
            for k in 0..npts {
                if k != j {
                    bary[j] /= nodes[j] - nodes[k];
                }
            }
        }
        let scale = bary.iter().fold(0.0_f64, |m, b| m.max(b.abs()));
        bary.iter_mut().for_each(|b| *b /= scale);

        Self {
            nodes,
            weights,
            deriv,
            bary,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values `l_j(z)` of every cardinal function at `z`.
    pub fn cardinal(&self, z: f64) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        if let Some(j) = self.nodes.iter().position(|&zj| zj == z) {
            out[j] = 1.0;
            return out;
        }
        let mut denom = 0.0;
        for j in 0..n {
            let t = self.bary[j] / (z - self.nodes[j]);
            out[j] = t;
            denom += t;
        }
        out.iter_mut().for_each(|v| *v /= denom);
        out
    }

    /// Derivatives `l_j'(z)` of every cardinal function at `z`.
    pub fn cardinal_deriv(&self, z: f64) -> Vec<f64> {
        let n = self.len();
        if let Some(i) = self.nodes.iter().position(|&zj| zj == z) {
            return (0..n).map(|j| self.deriv[(i, j)]).collect();
        }
        // l_j'(z) = l_j(z) * (s1_j) where the barycentric quotient rule gives
        // l_j' = (t_j' S - t_j S') / S^2 with t_j = b_j / (z - z_j).
        let mut t = vec![0.0; n];
        let mut dt = vec![0.0; n];
        let (mut s, mut ds) = (0.0, 0.0);
        for j in 0..n {
            let r = 1.0 / (z - self.nodes[j]);
            t[j] = self.bary[j] * r;
            dt[j] = -self.bary[j] * r * r;
            s += t[j];
            ds += dt[j];
        }
        (0..n).map(|j| (dt[j] * s - t[j] * ds) / (s * s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_is_exact_to_degree_2n_minus_3() {
        let g = Lobatto::new(9);
        for deg in 0..=15 {
            let q: f64 = g
                .nodes
                .iter()
                .zip(&g.weights)
                .map(|(z, w)| w * z.powi(deg))
                .sum();
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((q - exact).abs() < 1e-14, "degree {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn derivative_is_exact_on_polynomials() {
        let g = Lobatto::new(12);
        let f: Vec<f64> = g.nodes.iter().map(|z| z.powi(11) - 3.0 * z * z).collect();
        let df = &g.deriv * nalgebra::DVector::from_vec(f);
        for (i, z) in g.nodes.iter().enumerate() {
            let exact = 11.0 * z.powi(10) - 6.0 * z;
            assert!((df[i] - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn summation_by_parts_holds() {
        let g = Lobatto::new(17);
        let n = g.len();
        let w = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(g.weights.clone()));
        let q = &w * &g.deriv + g.deriv.transpose() * &w;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j && i == 0 {
                    -1.0
                } else if i == j && i == n - 1 {
                    1.0
                } else {
                    0.0
                };
                assert!((q[(i, j)] - expect).abs() < 1e-11, "({i},{j}) = {}", q[(i, j)]);
            }
        }
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let g = Lobatto::new(8);
        let vals: Vec<f64> = g.nodes.iter().map(|z| z.powi(5) + z).collect();
        for &z in &[0.1234, 0.5, 0.987] {
            let c = g.cardinal(z);
            let d = g.cardinal_deriv(z);
            let v: f64 = c.iter().zip(&vals).map(|(a, b)| a * b).sum();
            let dv: f64 = d.iter().zip(&vals).map(|(a, b)| a * b).sum();
            assert!((v - (z.powi(5) + z)).abs() < 1e-13);
            assert!((dv - (5.0 * z.powi(4) + 1.0)).abs() < 1e-11);
        }
    }
}
