//! Pointwise check of the geometric discrepancy term on parametrized surfaces.
//!
//! For a tangent field `u` the boundary identity
//! `(2 S(u) n - curl u x n) . tau = GD(u) . tau`, `GD(u) = -2 S(n) u`,
//! is evaluated with analytic derivatives. Only tangential derivatives of
//! `n` enter, so no extension of the normal off the surface is needed.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{Matrix3, Vector3};

use crate::{Error, Result};

pub type Vec3 = Vector3<f64>;

type Map<T> = Box<dyn Fn(f64, f64) -> T + Send + Sync>;

/// Regular surface `(s, t) -> x(s, t)` with first and second derivatives.
pub struct SurfacePatch {
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
    pub point: Map<Vec3>,
    /// `[x_s, x_t]`
    pub first: Map<[Vec3; 2]>,
    /// `[x_ss, x_st, x_tt]`
    pub second: Map<[Vec3; 3]>,
}

/// Smooth vector field in space with its Jacobian `J[i][j] = d_j u_i`.
pub struct AnalyticField {
    pub value: Box<dyn Fn(&Vec3) -> Vec3 + Send + Sync>,
    pub jacobian: Box<dyn Fn(&Vec3) -> Matrix3<f64> + Send + Sync>,
}

/// Surface frame at one parameter point.
struct Frame {
    x: Vec3,
    n: Vec3,
    tau: [Vec3; 2],
    /// Inverse metric applied to tangent vectors: coordinates `(a_s, a_t)` of `a`.
    coords: Matrix3<f64>,
    dn: [Vec3; 2],
    area: f64,
}

impl SurfacePatch {
    fn frame(&self, s: f64, t: f64) -> Result<Frame> {
        let x = (self.point)(s, t);
        let [xs, xt] = (self.first)(s, t);
        let [xss, xst, xtt] = (self.second)(s, t);
        let big = xs.cross(&xt);
        let len = big.norm();
        if !(len > 1e-12 * xs.norm() * xt.norm()) {
            return Err(Error::Precondition(format!("patch is singular at (s, t) = ({s}, {t})")));
        }
        let n = big / len;
        let unit_deriv = |d: Vec3| (d - n * n.dot(&d)) / len;
        let dn = [unit_deriv(xss.cross(&xt) + xs.cross(&xst)), unit_deriv(xst.cross(&xt) + xs.cross(&xtt))];
        let t1 = xs.normalize();
        let t2 = n.cross(&t1);
        // rows of the pseudo-inverse of [x_s x_t] restricted to the tangent plane
        let m = Matrix3::from_columns(&[xs, xt, n]);
        let coords = m.try_inverse().ok_or_else(|| Error::Numerical("degenerate tangent frame".into()))?;
        Ok(Frame { x, n, tau: [t1, t2], coords, dn, area: len })
    }
}

impl Frame {
    /// Directional derivative of `n` along a tangent vector.
    fn dn_along(&self, a: &Vec3) -> Vec3 {
        let c = self.coords * a;
        self.dn[0] * c[0] + self.dn[1] * c[1]
    }

    /// `GD(u) = -2 S(n) u` for tangent `u`, as a tangent vector.
    fn gd(&self, u: &Vec3) -> Vec3 {
        let du = self.dn_along(u);
        let mut out = Vec3::zeros();
        for tau in &self.tau {
            out += tau * -(tau.dot(&du) + u.dot(&self.dn_along(tau)));
        }
        out
    }
}

fn tangent_value(f: &AnalyticField, fr: &Frame, s: f64, t: f64) -> Result<Vec3> {
    let u = (f.value)(&fr.x);
    if u.dot(&fr.n).abs() > 1e-12 * (1.0 + u.norm()) {
        return Err(Error::Precondition(format!(
            "field is not tangent at (s, t) = ({s}, {t}): u.n = {:e}",
            u.dot(&fr.n)
        )));
    }
    Ok(u)
}

/// Maximum over samples and tangent directions of
/// `|(2 S(u) n - curl u x n - GD(u)) . tau|`.
pub fn gd_on_patch(patch: &SurfacePatch, field: &AnalyticField, samples: &[(f64, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(s, t) in samples {
        let fr = patch.frame(s, t)?;
        let u = tangent_value(field, &fr, s, t)?;
        let j = (field.jacobian)(&fr.x);
        let sym = (j + j.transpose()) * 0.5;
        let w = Vec3::new(j[(2, 1)] - j[(1, 2)], j[(0, 2)] - j[(2, 0)], j[(1, 0)] - j[(0, 1)]);
        let lhs = sym * fr.n * 2.0 - w.cross(&fr.n);
        let gd = fr.gd(&u);
        for tau in &fr.tau {
            worst = worst.max((lhs.dot(tau) - gd.dot(tau)).abs());
        }
    }
    Ok(worst)
}

/// `(int GD(phi) . u, int GD(u) . phi)` over the patch by tensor Gauss-Legendre quadrature.
pub fn gd_symmetry(patch: &SurfacePatch, u: &AnalyticField, phi: &AnalyticField, order: usize) -> Result<(f64, f64)> {
    let n = NonZeroUsize::new(order).ok_or_else(|| Error::Config("quadrature order must be positive".into()))?;
    let rule = GaussLegendre::new(n);
    let pairs = rule.as_node_weight_pairs();
    let ((s0, s1), (t0, t1)) = (patch.s_range, patch.t_range);
    let (hs, ht) = (0.5 * (s1 - s0), 0.5 * (t1 - t0));
    let (mut a, mut b) = (0.0, 0.0);
    for &(xs, ws) in pairs {
        for &(xt, wt) in pairs {
            let (s, t) = (s0 + hs * (xs + 1.0), t0 + ht * (xt + 1.0));
            let fr = patch.frame(s, t)?;
            let uv = tangent_value(u, &fr, s, t)?;
            let pv = tangent_value(phi, &fr, s, t)?;
            let w = ws * wt * hs * ht * fr.area;
            a += w * fr.gd(&pv).dot(&uv);
            b += w * fr.gd(&uv).dot(&pv);
        }
    }
    Ok((a, b))
}

/// Uniform `k x k` grid of sample points inside the parameter rectangle.
pub fn sample_grid(patch: &SurfacePatch, k: usize) -> Vec<(f64, f64)> {
    let ((s0, s1), (t0, t1)) = (patch.s_range, patch.t_range);
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let (a, b) = ((i as f64 + 0.5) / k as f64, (j as f64 + 0.5) / k as f64);
            out.push((s0 + a * (s1 - s0), t0 + b * (t1 - t0)));
        }
    }
    out
}

/// Piece of the wall `z = 0`.
pub fn flat_patch(lx: f64, ly: f64) -> SurfacePatch {
    SurfacePatch {
        s_range: (0.0, lx),
        t_range: (0.0, ly),
        point: Box::new(|s, t| Vec3::new(s, t, 0.0)),
        first: Box::new(|_, _| [Vec3::x(), Vec3::y()]),
        second: Box::new(|_, _| [Vec3::zeros(); 3]),
    }
}

/// Unit sphere in polar angle `s` and azimuth `t`, away from the poles.
pub fn sphere_patch() -> SurfacePatch {
    SurfacePatch {
        s_range: (0.3, PI - 0.3),
        t_range: (0.0, 2.0 * PI),
        point: Box::new(|s, t| Vec3::new(s.sin() * t.cos(), s.sin() * t.sin(), s.cos())),
        first: Box::new(|s, t| {
            [
                Vec3::new(s.cos() * t.cos(), s.cos() * t.sin(), -s.sin()),
                Vec3::new(-s.sin() * t.sin(), s.sin() * t.cos(), 0.0),
            ]
        }),
        second: Box::new(|s, t| {
            [
                Vec3::new(-s.sin() * t.cos(), -s.sin() * t.sin(), -s.cos()),
                Vec3::new(-s.cos() * t.sin(), s.cos() * t.cos(), 0.0),
                Vec3::new(-s.sin() * t.cos(), -s.sin() * t.sin(), 0.0),
            ]
        }),
    }
}

/// `x x a`: tangent to every sphere centred at the origin.
pub fn rotation_field(a: Vec3) -> AnalyticField {
    AnalyticField {
        value: Box::new(move |x| x.cross(&a)),
        jacobian: Box::new(move |_| -a.cross_matrix()),
    }
}

/// `x x a(x)` with `a = (z, x^2, 1 + y)`; tangent to spheres centred at the origin.
pub fn swirl_field() -> AnalyticField {
    AnalyticField {
        value: Box::new(|x| x.cross(&Vec3::new(x.z, x.x * x.x, 1.0 + x.y))),
        jacobian: Box::new(|x| {
            let a = Vec3::new(x.z, x.x * x.x, 1.0 + x.y);
            // d_j (x x a) = e_j x a + x x d_j a
            let da = [Vec3::new(0.0, 2.0 * x.x, 0.0), Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, 0.0)];
            let e = [Vec3::x(), Vec3::y(), Vec3::z()];
            let cols: Vec<Vec3> = (0..3).map(|j| e[j].cross(&a) + x.cross(&da[j])).collect();
            Matrix3::from_columns(&cols)
        }),
    }
}

/// Horizontal field on the plane with `u_z = z w(x, y)` so that it is tangent at `z = 0`.
pub fn wall_field() -> AnalyticField {
    AnalyticField {
        value: Box::new(|x| Vec3::new(x.y.sin() + x.z, (x.x).cos() * x.z + 2.0, x.z * x.x.sin())),
        jacobian: Box::new(|x| {
            Matrix3::new(
                0.0,
                x.y.cos(),
                1.0,
                -x.x.sin() * x.z,
                0.0,
                x.x.cos(),
                x.z * x.x.cos(),
                0.0,
                x.x.sin(),
            )
        }),
    }
}
