use std::f64::consts::PI;

use alphaflow::domain::ops::{form_nsb, form_vsb, inner_product, norm};
use alphaflow::domain::{ChannelConfig, Field, Grid, GridRef};
use alphaflow::fixtures::{random_field, smooth_random_field};
use alphaflow::hodge::{normal_trace, Hodge};
use alphaflow::stokes::{assemble_form, cache, BoundaryData, FormKind, StokesEigenbasis, StokesSolver};

fn grid(nx: usize, nz: usize, beta: f64) -> GridRef {
    Grid::new(ChannelConfig { nx, ny: nx, nz, beta, ..ChannelConfig::default() }).unwrap()
}

fn mean_block_mus(b: &StokesEigenbasis) -> Vec<f64> {
    b.blocks[b.grid.mean_block()].mu.clone()
}

#[test]
fn mean_block_matches_neumann_cosines() {
    let g = grid(4, 65, 0.0);
    let h = Hodge::new(g.clone()).unwrap();
    let b = StokesEigenbasis::compute(&h, FormKind::Vsb { beta: 0.0 }).unwrap();
    let mus = mean_block_mus(&b);
    assert!((mus[0] - 1.0).abs() < 1e-12 && (mus[1] - 1.0).abs() < 1e-12, "{:?}", &mus[..6]);
    for m in 1..=10 {
        let exact = 1.0 + (m as f64 * PI).powi(2);
        for k in 0..2 {
            let got = mus[2 * m + k];
            assert!((got - exact).abs() < 1e-6 * exact, "m={m}: {got} vs {exact}");
        }
    }
}

#[test]
fn large_slip_approaches_dirichlet_values() {
    let g = grid(4, 33, 1e6);
    let h = Hodge::new(g.clone()).unwrap();
    let b = StokesEigenbasis::compute(&h, FormKind::Vsb { beta: 1e6 }).unwrap();
    let mus = mean_block_mus(&b);
    for m in 1..=4 {
        let exact = 1.0 + (m as f64 * PI).powi(2);
        let got = mus[2 * (m - 1)];
        assert!(got < exact && (exact - got) / exact < 1e-4, "m={m}: {got} vs {exact}");
    }
}

#[test]
fn eigenbasis_certificates() {
    for beta in [0.0, 0.3, 5.0] {
        let g = grid(6, 9, beta);
        let h = Hodge::new(g.clone()).unwrap();
        let b = StokesEigenbasis::compute(&h, FormKind::Vsb { beta }).unwrap();
        assert!(b.mu(0) >= 1.0 - 1e-12);
        for j in 1..b.len() {
            assert!(b.mu(j) >= b.mu(j - 1));
        }
        assert!(b.orthonormality_defect() < 1e-10);
        assert!(b.residuals(&h).unwrap() < 1e-8);
    }
}

#[test]
fn flat_wall_forms_agree_on_divergence_free_fields() {
    let g = grid(8, 9, 0.8);
    let h = Hodge::new(g.clone()).unwrap();
    for s in 0..50u64 {
        let f = h.leray_project(&random_field(&g, 2 * s)).unwrap();
        let k = h.leray_project(&random_field(&g, 2 * s + 1)).unwrap();
        let scale = (form_vsb(&g, 0.8, &f, &f).unwrap() * form_vsb(&g, 0.8, &k, &k).unwrap()).sqrt();
        let d = form_vsb(&g, 0.8, &f, &k).unwrap() - form_nsb(&g, 0.8, &f, &k).unwrap();
        assert!(d.abs() < 1e-12 * scale, "{}", d.abs() / scale);
    }
}

#[test]
fn flat_wall_spectra_agree() {
    let g = grid(6, 9, 0.4);
    let h = Hodge::new(g.clone()).unwrap();
    let v = StokesEigenbasis::compute(&h, FormKind::Vsb { beta: 0.4 }).unwrap();
    let n = StokesEigenbasis::compute(&h, FormKind::Nsb { gamma: 0.4 }).unwrap();
    for j in 0..v.len() {
        assert!((v.mu(j) - n.mu(j)).abs() < 1e-9 * v.mu(j));
    }
}

#[test]
fn assembled_blocks_are_hermitian() {
    let g = grid(6, 9, 0.4);
    let f = assemble_form(&g, FormKind::Nsb { gamma: 0.4 }).unwrap();
    assert!(f.raw_asymmetry < 1e-13);
    for a in &f.blocks {
        assert_eq!(a, &a.adjoint());
    }
    assert!(f.min_relative_eigenvalue() > -1e-12);
}

#[test]
fn fractional_powers() {
    let g = grid(6, 9, 0.5);
    let h = Hodge::new(g.clone()).unwrap();
    let b = StokesEigenbasis::compute(&h, FormKind::Vsb { beta: 0.5 }).unwrap();
    let u = h.leray_project(&smooth_random_field(&g, 5)).unwrap();
    let (id, res) = b.apply_fractional(0.0, &u).unwrap();
    assert!(res < 1e-10);
    assert!(norm(&g, &(&id - &u)).unwrap() < 1e-12 * norm(&g, &u).unwrap());
    let (a1, _) = b.apply_fractional(0.3, &u).unwrap();
    let (a2, _) = b.apply_fractional(0.45, &a1).unwrap();
    let (a3, _) = b.apply_fractional(0.75, &u).unwrap();
    assert!(norm(&g, &(&a2 - &a3)).unwrap() < 1e-10 * norm(&g, &a3).unwrap());
    let e = b.mode(7);
    let (ae, _) = b.apply_fractional(1.0, &e).unwrap();
    let mut target = e.clone();
    target.axpy(-b.mu(7), &e);
    assert!(norm(&g, &(&ae - &(&e * b.mu(7)))).unwrap() < 1e-10 * b.mu(7));
}

#[test]
fn shifted_solve_inverts_on_eigenvectors() {
    let g = grid(6, 9, 0.0);
    let h = Hodge::new(g.clone()).unwrap();
    let b = StokesEigenbasis::compute(&h, FormKind::Vsb { beta: 0.0 }).unwrap();
    let s = StokesSolver::new(&h, 0.0).unwrap();
    let lambda = 2.5;
    for j in [0, 5, 40] {
        let e = b.mode(j);
        let (u, res) = s.solve_stokes(lambda, &e, &BoundaryData::zero(&g)).unwrap();
        assert!(res < 1e-10);
        let expect = &e * (1.0 / (lambda + b.mu(j) - 1.0));
        assert!(norm(&g, &(&u - &expect)).unwrap() < 1e-10 * norm(&g, &expect).unwrap());
    }
}

fn curl_curl(g: &Grid, u: &Field) -> Field {
    use alphaflow::domain::ops::curl;
    curl(g, &curl(g, u).unwrap()).unwrap()
}

#[test]
fn manufactured_solutions() {
    let g = grid(8, 11, 0.7);
    let h = Hodge::new(g.clone()).unwrap();
    let ustar = h.leray_project(&smooth_random_field(&g, 21)).unwrap();
    let s = StokesSolver::new(&h, 0.7).unwrap();
    let cc = curl_curl(&g, &ustar);
    // shifted problem with n x curl u = b
    let lambda = 3.0;
    let f = &(&ustar * lambda) + &cc;
    let bd = BoundaryData::from_field(&g, &ustar, 0.0).unwrap();
    let (u, res) = s.solve_stokes(lambda, &f, &bd).unwrap();
    assert!(res < 1e-10);
    assert!(normal_trace(&g, &u).unwrap() < 1e-12);
    let e = norm(&g, &(&u - &ustar)).unwrap() / norm(&g, &ustar).unwrap();
    assert!(e < 1e-8, "{e}");
    // Robin problem n x curl u = beta u + b
    let f = &ustar + &cc;
    let bd = BoundaryData::from_field(&g, &ustar, 0.7).unwrap();
    let r = s.solve_stokes_robin(&f, &bd).unwrap();
    assert!(r.residual < 1e-9, "{}", r.residual);
    assert!(norm(&g, &(&r.u - &ustar)).unwrap() < 1e-8 * norm(&g, &ustar).unwrap());
    assert!(r.history.iter().all(|(_, c)| *c <= 0.9) || r.history.len() > 1);
}

#[test]
fn robin_without_data_matches_direct_solve() {
    let g = grid(6, 9, 2.0);
    let h = Hodge::new(g.clone()).unwrap();
    let s = StokesSolver::new(&h, 2.0).unwrap();
    let f = random_field(&g, 3);
    let z = BoundaryData::zero(&g);
    let (d, _) = s.solve_direct(&f, &z).unwrap();
    let r = s.solve_stokes_robin(&f, &z).unwrap();
    assert!(norm(&g, &(&d - &r.u)).unwrap() < 1e-9 * norm(&g, &d).unwrap());
    let (zero, _) = s.solve_stokes(1.0, &Field::zeros(&g), &z).unwrap();
    assert_eq!(zero.max_abs(), 0.0);
}

#[test]
fn contraction_improves_with_shift() {
    let g = grid(6, 9, 3.0);
    let h = Hodge::new(g.clone()).unwrap();
    let s = StokesSolver::new(&h, 3.0).unwrap();
    let factors: Vec<f64> = [1.0, 4.0, 16.0, 64.0].iter().map(|&l| s.contraction_factor(l, 60).unwrap()).collect();
    for w in factors.windows(2) {
        assert!(w[1] < w[0], "{factors:?}");
    }
}

#[test]
fn poincare_bound_on_fluxless_fields() {
    let g = grid(6, 9, 0.0);
    let h = Hodge::new(g.clone()).unwrap();
    let b = StokesEigenbasis::compute(&h, FormKind::Vsb { beta: 0.0 }).unwrap();
    let first = (0..b.len()).map(|j| b.mu(j) - 1.0).find(|l| *l > 1e-8).unwrap();
    for s in 0..50u64 {
        let c = h.decompose(&random_field(&g, 100 + s)).unwrap();
        let a0 = form_vsb(&g, 0.0, &c.fh, &c.fh).unwrap();
        let l2 = inner_product(&g, &c.fh, &c.fh).unwrap();
        assert!(a0 / l2 >= first - 1e-8);
    }
}

#[test]
fn cache_round_trip() {
    let g = grid(4, 7, 0.2);
    let h = Hodge::new(g.clone()).unwrap();
    let kind = FormKind::Vsb { beta: 0.2 };
    let b = StokesEigenbasis::compute(&h, kind).unwrap();
    let dir = tempfile::tempdir().unwrap();
    cache::store(dir.path(), &b).unwrap();
    let back = cache::load(dir.path(), &g, kind).unwrap();
    assert_eq!(back.blocks, b.blocks);
    assert_eq!(back.order, b.order);
    assert!(cache::load(dir.path(), &g, FormKind::Nsb { gamma: 0.2 }).is_none());
}

