//! One line per acceptance criterion; exits non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use alphaflow::domain::ops::{form_a_beta, form_nsb, form_vsb, norm};
use alphaflow::domain::patch::{
    flat_patch, gd_on_patch, gd_symmetry, rotation_field, sample_grid, sphere_patch, swirl_field, wall_field, Vec3,
};
use alphaflow::domain::{ChannelConfig, Field, Grid, GridRef};
use alphaflow::experiments::run_alpha_sweep;
use alphaflow::fixtures::{random_field, smooth_random_field};
use alphaflow::hodge::Hodge;
use alphaflow::solver::{
    apply_filter, energy_report, setup, stokes_laplacian, Galerkin, InitialCondition, ModelKind, SimConfig, Simulation,
};
use alphaflow::stokes::{FormKind, StokesEigenbasis};
use alphaflow::C64;

type Outcome = (bool, String);

fn channel(n: usize, nz: usize, beta: f64) -> ChannelConfig {
    ChannelConfig { nx: n, ny: n, nz, beta, ..ChannelConfig::default() }
}

fn grid(n: usize, nz: usize, beta: f64) -> GridRef {
    Grid::new(channel(n, nz, beta)).unwrap()
}

fn taylor_vortex() -> InitialCondition {
    InitialCondition::TaylorGreen { amplitude: 5.0, perturbation: 0.5, seed: 3 }
}

fn hodge_suite() -> Outcome {
    let g = grid(16, 33, 0.5);
    let h = Hodge::new(g.clone()).unwrap();
    let (mut orth, mut rec): (f64, f64) = (0.0, 0.0);
    for s in 0..100u64 {
        let u = random_field(&g, s);
        let c = h.decompose(&u).unwrap();
        orth = orth.max(h.orthogonality_defect(&c, &u).unwrap());
        rec = rec.max(c.residual);
    }
    let dims = (h.dim_hh(), h.dim_hg());
    (
        orth <= 1e-10 && rec <= 1e-10 && dims == (2, 1),
        format!("orthogonality {orth:.2e}, reconstruction {rec:.2e}, dim HH {}, dim HG {}", dims.0, dims.1),
    )
}

fn spectrum_suite() -> Outcome {
    // analytic k = 0 family at Nz = 65
    let g = grid(4, 65, 0.0);
    let h = Hodge::new(g.clone()).unwrap();
    let b = StokesEigenbasis::compute(&h, FormKind::Vsb { beta: 0.0 }).unwrap();
    let mus = &b.blocks[g.mean_block()].mu;
    let nu = g.config.nu;
    let mut analytic: f64 = 0.0;
    for m in 1..=10 {
        let exact = 1.0 + nu * (m as f64 * PI).powi(2);
        for k in 0..2 {
            analytic = analytic.max((mus[2 * m + k] - exact).abs() / exact);
        }
    }
    analytic = analytic.max((mus[0] - 1.0).abs()).max((mus[1] - 1.0).abs());
    // certificates on the production grid
    let beta = 0.5;
    let g = grid(16, 33, beta);
    let h = Hodge::new(g.clone()).unwrap();
    let b = StokesEigenbasis::compute(&h, FormKind::Vsb { beta }).unwrap();
    let mu_min = b.mu(0);
    let res = b.residuals(&h).unwrap();
    let mut forms: f64 = 0.0;
    for s in 0..50u64 {
        let f = h.leray_project(&random_field(&g, 2 * s)).unwrap();
        let k = h.leray_project(&random_field(&g, 2 * s + 1)).unwrap();
        let scale = (form_vsb(&g, beta, &f, &f).unwrap() * form_vsb(&g, beta, &k, &k).unwrap()).sqrt();
        forms = forms.max((form_vsb(&g, beta, &f, &k).unwrap() - form_nsb(&g, beta, &f, &k).unwrap()).abs() / scale);
    }
    (
        analytic <= 1e-6 && mu_min >= 1.0 - 1e-12 && res <= 1e-8 && forms <= 1e-12,
        format!("analytic {analytic:.2e}, min mu {mu_min:.15}, residual {res:.2e}, VSB-NSB {forms:.2e}"),
    )
}

fn gd_suite() -> Outcome {
    let flat = flat_patch(2.0 * PI, 2.0 * PI);
    let f1 = gd_on_patch(&flat, &wall_field(), &sample_grid(&flat, 16)).unwrap();
    let f2 = gd_on_patch(&flat, &rotation_field(Vec3::z()), &sample_grid(&flat, 16)).unwrap();
    let sphere = sphere_patch();
    let pts = sample_grid(&sphere, 16);
    let s1 = gd_on_patch(&sphere, &rotation_field(-Vec3::z()), &pts).unwrap();
    let s2 = gd_on_patch(&sphere, &swirl_field(), &pts).unwrap();
    let (a, b) = gd_symmetry(&sphere, &swirl_field(), &rotation_field(Vec3::new(0.3, -1.0, 2.0)), 24).unwrap();
    let gap = (a - b).abs() / a.abs();
    let flat_r = f1.max(f2);
    let sphere_r = s1.max(s2);
    (
        flat_r <= 1e-12 && sphere_r <= 1e-8 && gap <= 1e-8,
        format!("flat {flat_r:.2e}, sphere {sphere_r:.2e}, symmetry gap {gap:.2e}"),
    )
}

fn filter_suite() -> Outcome {
    let beta = 0.5;
    let g = grid(16, 33, beta);
    let h = Hodge::new(g.clone()).unwrap();
    let b = StokesEigenbasis::compute(&h, FormKind::Vsb { beta }).unwrap();
    let alpha = 0.01;
    let mut spectral: f64 = 0.0;
    for j in (0..b.len()).step_by(97) {
        let e = b.mode(j);
        let u = apply_filter(&b, alpha, &e).unwrap();
        let expect = &e * (1.0 / (1.0 + alpha * (b.mu(j) - 1.0)));
        spectral = spectral.max(norm(&g, &(&u - &expect)).unwrap() / norm(&g, &e).unwrap());
    }
    let (mut gap_err, mut violated): (f64, bool) = (0.0, false);
    for s in 0..100u64 {
        let v = h.leray_project(&smooth_random_field(&g, s)).unwrap();
        let u = apply_filter(&b, alpha, &v).unwrap();
        let lhs = norm(&g, &(&v - &u)).unwrap();
        let rhs = alpha * norm(&g, &stokes_laplacian(&b, &u).unwrap()).unwrap();
        let nv = norm(&g, &v).unwrap();
        violated |= lhs > rhs + 1e-10 * nv;
        gap_err = gap_err.max((lhs - rhs).abs() / nv);
    }
    (
        spectral <= 1e-12 && gap_err <= 1e-10 && !violated,
        format!("spectral action {spectral:.2e}, |v - Tv| - alpha |P Lap Tv| {gap_err:.2e}"),
    )
}

fn energy_suite() -> Outcome {
    let base = SimConfig {
        channel: channel(16, 33, 0.5),
        dt: 1e-3,
        t_end: 0.25,
        initial: taylor_vortex(),
        ..SimConfig::default()
    };
    let (hodge, basis) = setup(&base).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut skew: f64 = 0.0;
    for model in [ModelKind::LerayAlpha(0.01), ModelKind::LnsAlpha(0.01)] {
        let res = |dt: f64| {
            let sim = Simulation::new(SimConfig { model, dt, ..base.clone() }, basis.clone()).unwrap();
            let out = sim.run_from(sim.initial_state(&hodge).unwrap(), |_| {});
            assert!(out.blow_up.is_none());
            energy_report(&out.ledger)
        };
        let (a, b) = (res(1e-3), res(5e-4));
        let pick = |r: &alphaflow::solver::EnergyReport| match model {
            ModelKind::LerayAlpha(_) => r.max_res_725,
            _ => r.max_res_547,
        };
        let ratio = pick(&a) / pick(&b);
        skew = skew.max(a.max_skew).max(b.max_skew);
        ok &= (3.4..=4.6).contains(&ratio);
        parts.push(format!("{} ratio {ratio:.3}", model.name()));
    }
    ok &= skew <= 1e-11;
    (ok, format!("{}, skew {skew:.2e}", parts.join(", ")))
}

fn rate_suite() -> Outcome {
    let cfg = SimConfig {
        channel: channel(16, 33, 0.5),
        model: ModelKind::LnsAlpha(0.01),
        dt: 1e-3,
        t_end: 0.5,
        initial: taylor_vortex(),
        ..SimConfig::default()
    };
    let (hodge, basis) = setup(&cfg).unwrap();
    let r = run_alpha_sweep(&cfg, &[2e-2, 1e-2, 5e-3, 2.5e-3], &hodge, &basis).unwrap();
    let slope = |f: &Option<alphaflow::experiments::RateFit>| f.as_ref().map_or(f64::NAN, |x| x.slope);
    let (s1, s2, s3) = (slope(&r.fits.sup_l2_v), slope(&r.fits.int_h1_pair), slope(&r.fits.sup_h1_v));
    (
        s1 >= 0.9 && s2 >= 0.9 && s3 >= 0.45 && r.monotone,
        format!("sup L2 slope {s1:.3}, int H1 pair slope {s2:.3}, sup H1 slope {s3:.3}, monotone {}", r.monotone),
    )
}

fn oracle_suite() -> Outcome {
    // single retained mode against an adaptive scalar integration
    let cfg = SimConfig {
        channel: channel(8, 9, 0.5),
        model: ModelKind::LnsAlpha(0.02),
        modes: Some(1),
        dt: 0.01,
        t_end: 1.0,
        initial: InitialCondition::Mode { index: 0, amplitude: 2.0 },
        ..SimConfig::default()
    };
    let (hodge, basis) = setup(&cfg).unwrap();
    let sim = Simulation::new(cfg, basis.clone()).unwrap();
    let g = sim.gal.grid();
    let id = basis.order[0];
    let lam = basis.mu(0) - 1.0;
    let e = basis.mode(0);
    let de = common::evaluate(g, &e);
    let partner = g.partner(id.block);
    let rhs = |c: C64| {
        let eb = e.block(g, id.block);
        let mut v = Field::zeros(g);
        v.set_block(g, id.block, &eb.map(|x| x * c));
        if partner != id.block {
            v.set_block(g, partner, &eb.map(|x| (x * c).conj()));
        }
        let u = v.scale(1.0 / (1.0 + 0.02 * lam));
        -c * (g.config.nu * lam) - common::quad_inner(g, &de.vals, &common::rotational(g, &v, &u))
    };
    let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.01).collect();
    let oracle = common::dopri(rhs, C64::new(2.0, 0.0), 1.0, &times, 1e-13);
    let mut traj = Vec::new();
    sim.run_from(sim.initial_state(&hodge).unwrap(), |s| traj.push(s.v[id.block][id.local]));
    let ode = if traj.len() == oracle.len() {
        traj.iter().zip(&oracle).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };

    // nonlinearities on 8^3
    let g = grid(8, 9, 0.5);
    let h = Hodge::new(g.clone()).unwrap();
    let b = Arc::new(StokesEigenbasis::compute(&h, FormKind::Vsb { beta: 0.5 }).unwrap());
    let mut nonlin: f64 = 0.0;
    for model in [ModelKind::LnsAlpha(0.02), ModelKind::LerayAlpha(0.02)] {
        let gal = Galerkin::new(b.clone(), model, None, true).unwrap();
        let v = gal.project(&h.leray_project(&smooth_random_field(&g, 3)).unwrap()).unwrap();
        let got = gal.nonlinearity(&v).unwrap();
        let (vf, uf) = (gal.synthesize(&v), gal.synthesize(&gal.filter(&v)));
        let rot = matches!(model, ModelKind::LnsAlpha(_)).then(|| common::rotational(&g, &vf, &uf));
        let (mut err, mut scale): (f64, f64) = (0.0, 0.0);
        for j in 0..b.len() {
            let m = b.order[j];
            let ej = b.mode(j);
            let want = match &rot {
                Some(n) => common::quad_inner(&g, &common::evaluate(&g, &ej).vals, n),
                None => common::skew_projection(&g, &vf, &uf, &ej),
            };
            scale = scale.max(want.norm());
            err = err.max((got[m.block][m.local] - want).norm());
        }
        nonlin = nonlin.max(err / scale);
    }

    // bilinear forms on 8^3
    let mut forms: f64 = 0.0;
    for s in 0..5u64 {
        let (f, k) = (random_field(&g, 10 + s), random_field(&g, 20 + s));
        let (df, dk) = (common::evaluate(&g, &f), common::evaluate(&g, &k));
        let curl = |d: &common::Dense| [0, 1, 2].map(|a| (0..d.len()).map(|i| d.curl_at(i)[a]).collect::<Vec<_>>());
        let want = common::quad_inner(&g, &curl(&df), &curl(&dk)) + common::quad_wall(&g, &df.vals, &dk.vals) * 0.5;
        let scale = (form_a_beta(&g, &f, &f).unwrap() * form_a_beta(&g, &k, &k).unwrap()).sqrt();
        forms = forms.max((form_a_beta(&g, &f, &k).unwrap() - want.re).abs() / scale);
    }
    (
        ode <= 1e-8 && nonlin <= 1e-9 && forms <= 1e-10,
        format!("one-mode trajectory {ode:.2e}, nonlinearity {nonlin:.2e}, forms {forms:.2e}"),
    )
}

fn determinism_suite() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(
        &cfg,
        "[channel]\nnx = 16\nny = 16\nnz = 33\nbeta = 0.5\n\n[model]\nkind = lns-alpha\n\n[run]\ndt = 0.001\nt_end = 0.05\n\n[initial]\nkind = taylor-green\namplitude = 5\nperturbation = 0.5\nseed = 3\n",
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name).join("report.json");
        let status = Command::new(env!("CARGO_BIN_EXE_alphaflow"))
            .env("ALPHAFLOW_CACHE_DIR", dir.path().join("cache"))
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        let read = |p: &Path| std::fs::read(p).unwrap_or_default();
        (status.success(), read(&out), read(&out.with_extension("csv")))
    };
    let (a, b) = (run("first"), run("second"));
    let same = a.1 == b.1 && a.2 == b.2 && !a.1.is_empty() && !a.2.is_empty();
    (a.0 && b.0 && same, format!("exit ok {}, report {} bytes, identical {same}", a.0 && b.0, a.1.len()))
}

fn main() {
    let suites: [(&str, fn() -> Outcome, f64); 8] = [
        ("hodge", hodge_suite, 30.0),
        ("spectrum", spectrum_suite, 60.0),
        ("gd-check", gd_suite, 5.0),
        ("filter", filter_suite, 10.0),
        ("energy", energy_suite, 300.0),
        ("rates", rate_suite, 1200.0),
        ("oracles", oracle_suite, f64::INFINITY),
        ("determinism", determinism_suite, f64::INFINITY),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f, budget)) in suites.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let t = Instant::now();
        let (ok, detail) = f();
        let secs = t.elapsed().as_secs_f64();
        let pass = ok && secs <= *budget;
        failed += usize::from(!pass);
        println!("criterion {} {name}: {} ({detail}; {secs:.1} s)", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
