//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use alphaflow::domain::io::{atomic_write, read_field, write_field};
use alphaflow::domain::ops::{inner_product, norm};
use alphaflow::domain::patch::{
    flat_patch, gd_on_patch, gd_symmetry, rotation_field, sample_grid, sphere_patch, swirl_field, wall_field, Vec3,
};
use alphaflow::domain::{ChannelConfig, Field, Grid};
use alphaflow::experiments::run_alpha_sweep;
use alphaflow::fixtures::random_field;
use alphaflow::hodge::Hodge;
use alphaflow::solver::{energy_report, SimConfig, Simulation};
use alphaflow::stokes::{spectrum_csv, FormKind};
use alphaflow::tolerances;
use serde::Serialize;

use crate::cache::eigenbasis;
use crate::config::parse_config;
use crate::manifest::{sidecar, RunManifest};
use crate::CliError;

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Numerical(e.to_string()))
}

fn json_value<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Numerical(e.to_string()))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    atomic_write(path, text.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct ComponentNorms {
    fh: f64,
    hh: f64,
    cg: f64,
    hg: f64,
    gg: f64,
}

#[derive(Serialize)]
struct FieldCheck {
    label: String,
    norms: ComponentNorms,
    /// `(p_i, p_j) / |u|^2` in the order fh, hh, cg, hg, gg.
    orthogonality: Vec<Vec<f64>>,
    reconstruction: f64,
}

#[derive(Serialize)]
struct HodgeReport {
    manifest: String,
    channel: ChannelConfig,
    dim_hh: usize,
    dim_hg: usize,
    max_orthogonality: f64,
    max_reconstruction: f64,
    pass: bool,
    fields: Vec<FieldCheck>,
}

fn check_field(h: &Hodge, u: &Field, label: String) -> Result<FieldCheck, CliError> {
    let g = &h.grid;
    let c = h.decompose(u)?;
    let p = c.parts();
    let scale = inner_product(g, u, u)?.max(f64::MIN_POSITIVE);
    let mut orth = vec![vec![0.0; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            orth[i][j] = inner_product(g, p[i], p[j])? / scale;
        }
    }
    Ok(FieldCheck {
        label,
        norms: ComponentNorms {
            fh: norm(g, &c.fh)?,
            hh: norm(g, &c.hh)?,
            cg: norm(g, &c.cg)?,
            hg: norm(g, &c.hg)?,
            gg: norm(g, &c.gg)?,
        },
        orthogonality: orth,
        reconstruction: c.residual,
    })
}

pub fn hodge_check(
    config: Option<&Path>,
    field: Option<&Path>,
    samples: usize,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let (channel, input) = match (field, config) {
        (Some(f), _) => {
            let (c, u) = read_field(f)?;
            (c, Some(u))
        }
        (None, Some(c)) => (parse_config(c)?.channel, None),
        (None, None) => (ChannelConfig::default(), None),
    };
    let params = serde_json::json!({ "channel": json_value(&channel)?, "samples": samples, "field": field.map(|f| f.display().to_string()) });
    let mut manifest = RunManifest::new("hodge-check", params, input.is_none().then_some(seed));
    config.into_iter().chain(field).for_each(|p| manifest.input(p));
    let grid = Grid::new(channel.clone())?;
    let h = Hodge::new(grid.clone())?;
    let fields = match input {
        Some(u) => vec![check_field(&h, &u, field.map_or(String::new(), |f| f.display().to_string()))?],
        None => (0..samples as u64)
            .map(|i| check_field(&h, &random_field(&grid, seed + i), format!("seed {}", seed + i)))
            .collect::<Result<_, _>>()?,
    };
    let max_orthogonality = fields
        .iter()
        .flat_map(|f| (0..5).flat_map(move |i| (0..5).filter(move |&j| j != i).map(move |j| f.orthogonality[i][j].abs())))
        .fold(0.0, f64::max);
    let max_reconstruction = fields.iter().map(|f| f.reconstruction).fold(0.0, f64::max);
    let (dim_hh, dim_hg) = (h.dim_hh(), h.dim_hg());
    let pass = max_orthogonality <= tolerances::ORTHOGONALITY
        && max_reconstruction <= tolerances::RECONSTRUCTION
        && (dim_hh, dim_hg) == (2, 1);
    let report = HodgeReport {
        manifest: manifest.hash.clone(),
        channel,
        dim_hh,
        dim_hg,
        max_orthogonality,
        max_reconstruction,
        pass,
        fields,
    };
    write_text(out, &to_json(&report)?)?;
    manifest.output(out);
    manifest.write(&sidecar(out))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "decomposition check failed: orthogonality {max_orthogonality:e}, reconstruction {max_reconstruction:e}, dims ({dim_hh}, {dim_hg})"
        )))
    }
}

pub fn spectrum(config: Option<&Path>, modes: usize, nsb: bool, out: Option<&Path>) -> Result<(), CliError> {
    let channel = match config {
        Some(c) => parse_config(c)?.channel,
        None => ChannelConfig::default(),
    };
    let beta = channel.beta;
    let kind = if nsb { FormKind::Nsb { gamma: beta } } else { FormKind::Vsb { beta } };
    let params = serde_json::json!({ "channel": json_value(&channel)?, "modes": modes, "form": kind.tag() });
    let mut manifest = RunManifest::new("spectrum", params, None);
    config.into_iter().for_each(|p| manifest.input(p));
    let h = Hodge::new(Grid::new(channel)?)?;
    let basis = eigenbasis(&h, kind)?;
    if modes > basis.len() {
        return Err(CliError::Config(format!("{modes} modes requested but the discrete space has {}", basis.len())));
    }
    let text = format!("# manifest={}\n{}", manifest.hash, spectrum_csv(&basis, modes));
    match out {
        Some(p) => {
            write_text(p, &text)?;
            manifest.output(p);
            manifest.write(&sidecar(p))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulationSummary {
    manifest: String,
    model: String,
    alpha: f64,
    retained_modes: usize,
    steps: usize,
    t: f64,
    energy: alphaflow::solver::EnergyReport,
    blow_up: Option<String>,
}

fn snapshot_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("snapshot-{step:06}.afld"))
}

pub fn simulate(config: &Path, out: &Path) -> Result<(), CliError> {
    let cfg = parse_config(config)?;
    let mut manifest = RunManifest::new("simulate", json_value(&cfg)?, None);
    manifest.input(config);
    std::fs::create_dir_all(out)?;
    let grid = Grid::new(cfg.channel.clone())?;
    let hodge = Hodge::new(grid)?;
    let basis = Arc::new(eigenbasis(&hodge, FormKind::Vsb { beta: cfg.channel.beta })?);
    let sim = Simulation::new(cfg.clone(), basis)?;
    let start = sim.initial_state(&hodge)?;
    let mut snap_err = None;
    let every = cfg.snapshot_every;
    let mut written = Vec::new();
    let outcome = sim.run_from(start, |s| {
        if every > 0 && s.step % every == 0 && snap_err.is_none() {
            let p = snapshot_path(out, s.step);
            match write_field(&p, &cfg.channel, &sim.velocity(s)) {
                Ok(()) => written.push(p),
                Err(e) => snap_err = Some(e),
            }
        }
    });
    if let Some(e) = snap_err {
        return Err(e.into());
    }
    written.iter().for_each(|p| manifest.output(p));
    let ledger = out.join("ledger.csv");
    write_text(&ledger, &outcome.ledger.to_csv(Some(&manifest.hash)))?;
    let fin = out.join("final.afld");
    write_field(&fin, &cfg.channel, &sim.velocity(&outcome.state))?;
    let summary = SimulationSummary {
        manifest: manifest.hash.clone(),
        model: cfg.model.name().to_string(),
        alpha: cfg.model.alpha(),
        retained_modes: sim.gal.retained,
        steps: outcome.state.step,
        t: outcome.state.t,
        energy: energy_report(&outcome.ledger),
        blow_up: outcome.blow_up.as_ref().map(|e| e.to_string()),
    };
    let sp = out.join("summary.json");
    write_text(&sp, &to_json(&summary)?)?;
    for p in [&ledger, &fin, &sp] {
        manifest.output(p);
    }
    manifest.write(&out.join("manifest.json"))?;
    match outcome.blow_up {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

pub fn sweep(config: &Path, alphas: &[f64], out: &Path) -> Result<(), CliError> {
    let cfg: SimConfig = parse_config(config)?;
    let params = serde_json::json!({ "config": json_value(&cfg)?, "alphas": alphas });
    let mut manifest = RunManifest::new("sweep", params, None);
    manifest.input(config);
    let grid = Grid::new(cfg.channel.clone())?;
    let hodge = Hodge::new(grid)?;
    let basis = Arc::new(eigenbasis(&hodge, FormKind::Vsb { beta: cfg.channel.beta })?);
    let mut report = run_alpha_sweep(&cfg, alphas, &hodge, &basis)?;
    report.manifest = Some(manifest.hash.clone());
    write_text(out, &report.to_json()?)?;
    let csv = out.with_extension("csv");
    write_text(&csv, &report.series_csv())?;
    manifest.output(out);
    manifest.output(&csv);
    manifest.write(&sidecar(out))?;
    let failed: Vec<String> =
        report.records.iter().filter_map(|r| r.failure.as_ref().map(|f| format!("alpha = {}: {f}", r.alpha))).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("sweep members failed: {}", failed.join("; "))))
    }
}

#[derive(Serialize)]
struct GdReport {
    manifest: String,
    samples: usize,
    flat_residual: f64,
    sphere_residual: f64,
    sphere_swirl_residual: f64,
    /// `int GD(phi).u` and `int GD(u).phi` on the sphere patch.
    symmetry_integrals: [f64; 2],
    symmetry_gap: f64,
    pass: bool,
}

pub fn gd_check(samples: usize, out: Option<&Path>) -> Result<(), CliError> {
    if samples == 0 {
        return Err(CliError::Config("samples must be positive".into()));
    }
    let mut manifest = RunManifest::new("gd-check", serde_json::json!({ "samples": samples }), None);
    let flat = flat_patch(2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI);
    let flat_residual = gd_on_patch(&flat, &wall_field(), &sample_grid(&flat, samples))?;
    let sphere = sphere_patch();
    let pts = sample_grid(&sphere, samples);
    let sphere_residual = gd_on_patch(&sphere, &rotation_field(-Vec3::z()), &pts)?;
    let sphere_swirl_residual = gd_on_patch(&sphere, &swirl_field(), &pts)?;
    let (a, b) = gd_symmetry(&sphere, &swirl_field(), &rotation_field(Vec3::new(0.3, -1.0, 2.0)), 24)?;
    let symmetry_gap = (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let pass = flat_residual <= tolerances::GD_FLAT
        && sphere_residual.max(sphere_swirl_residual) <= tolerances::GD_CURVED
        && symmetry_gap <= tolerances::GD_CURVED;
    let report = GdReport {
        manifest: manifest.hash.clone(),
        samples,
        flat_residual,
        sphere_residual,
        sphere_swirl_residual,
        symmetry_integrals: [a, b],
        symmetry_gap,
        pass,
    };
    let text = to_json(&report)?;
    match out {
        Some(p) => {
            write_text(p, &text)?;
            manifest.output(p);
            manifest.write(&sidecar(p))?;
        }
        None => println!("{text}"),
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::Numerical("geometric discrepancy check failed".into()))
    }
}
