//! Vanishing-alpha sweeps against the alpha = 0 run on the same
//! discretization, rate fits and weak-norm diagnostics.

pub mod fit;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fit::{fit_rate, RateFit};

use crate::hodge::Hodge;
use crate::solver::{Coeffs, SimConfig, Simulation};
use crate::stokes::StokesEigenbasis;
use crate::{Error, Result};

pub const REPORT_SCHEMA: u32 = 1;

/// Squared norms of a coefficient difference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l2: f64,
    /// `a~_beta(w, w)`: squared `H^1` proxy.
    pub h1: f64,
    /// `|A w|^2`: squared `H^2` proxy.
    pub h2: f64,
    /// `|A^{-1/4} w|^2`
    pub neg: f64,
}

/// One row of the raw error series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub v: Norms,
    pub u: Norms,
    /// `|u - v|` and `alpha |P Delta u|` for the filter inequality.
    pub filter_gap: f64,
    pub filter_bound: f64,
}

/// Error metrics of one alpha member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRecord {
    pub alpha: f64,
    pub sup_l2_v: f64,
    pub int_h1_v: f64,
    pub sup_h1_v: f64,
    pub int_h2_v: f64,
    pub sup_l2_u: f64,
    pub int_h1_u: f64,
    pub sup_h1_u: f64,
    pub int_h2_u: f64,
    pub sup_neg_v: f64,
    pub sup_neg_u: f64,
    /// `int |v - v0|_1^2 + |u - v0|_1^2 dt`
    pub int_h1_pair: f64,
    /// Steps completed.
    pub steps: usize,
    /// Failure message when the member run broke down.
    pub failure: Option<String>,
    #[serde(skip)]
    pub series: Vec<SeriesPoint>,
}

/// Fitted rates of the primary metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFits {
    pub sup_l2_v: Option<RateFit>,
    pub int_h1_pair: Option<RateFit>,
    pub sup_h1_v: Option<RateFit>,
    pub sup_h1_u: Option<RateFit>,
    pub sup_neg_v: Option<RateFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: u32,
    pub config: SimConfig,
    /// Members sorted by decreasing alpha; the last one is the reference `alpha = 0`.
    pub records: Vec<AlphaRecord>,
    pub fits: SweepFits,
    /// Whether the four primary metrics decrease with alpha.
    pub monotone: bool,
    pub manifest: Option<String>,
}

fn norms(d: &Coeffs, basis: &StokesEigenbasis) -> Norms {
    let mut n = Norms::default();
    for (x, b) in d.iter().zip(&basis.blocks) {
        for (c, mu) in x.iter().zip(&b.mu) {
            let s = c.norm_sqr();
            n.l2 += s;
            n.h1 += mu * s;
            n.h2 += mu * mu * s;
            n.neg += s / mu.sqrt();
        }
    }
    n
}

fn diff(a: &Coeffs, b: &Coeffs) -> Coeffs {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn summarize(alpha: f64, series: Vec<SeriesPoint>, failure: Option<String>) -> AlphaRecord {
    let sup = |f: &dyn Fn(&SeriesPoint) -> f64| series.iter().map(f).fold(0.0, f64::max);
    let int = |f: &dyn Fn(&SeriesPoint) -> f64| {
        series.windows(2).map(|w| 0.5 * (w[1].t - w[0].t) * (f(&w[0]) + f(&w[1]))).sum::<f64>()
    };
    AlphaRecord {
        alpha,
        sup_l2_v: sup(&|p| p.v.l2),
        int_h1_v: int(&|p| p.v.h1),
        sup_h1_v: sup(&|p| p.v.h1),
        int_h2_v: int(&|p| p.v.h2),
        sup_l2_u: sup(&|p| p.u.l2),
        int_h1_u: int(&|p| p.u.h1),
        sup_h1_u: sup(&|p| p.u.h1),
        int_h2_u: int(&|p| p.u.h2),
        sup_neg_v: sup(&|p| p.v.neg),
        sup_neg_u: sup(&|p| p.u.neg),
        int_h1_pair: int(&|p| p.v.h1 + p.u.h1),
        steps: series.len().saturating_sub(1),
        failure,
        series,
    }
}

/// Run one member and compare it step by step with the reference trajectory.
fn member(cfg: &SimConfig, alpha: f64, hodge: &Hodge, basis: &Arc<StokesEigenbasis>, reference: &[Coeffs]) -> Result<AlphaRecord> {
    let mcfg = SimConfig { model: cfg.model.with_alpha(alpha), ..cfg.clone() };
    let sim = Simulation::new(mcfg, Arc::clone(basis))?;
    let start = sim.initial_state(hodge)?;
    let mut series = Vec::with_capacity(reference.len());
    let lambda = &sim.gal.lambda;
    let out = sim.run_from(start, |s| {
        let r = &reference[s.step];
        let gap = diff(&s.u, &s.v);
        let mut lap = 0.0;
        for (x, l) in s.u.iter().zip(lambda) {
            for (c, lam) in x.iter().zip(l) {
                lap += lam * lam * c.norm_sqr();
            }
        }
        series.push(SeriesPoint {
            t: s.t,
            v: norms(&diff(&s.v, r), basis),
            u: norms(&diff(&s.u, r), basis),
            filter_gap: gap.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt(),
            filter_bound: alpha * lap.sqrt(),
        });
    });
    Ok(summarize(alpha, series, out.blow_up.map(|e| e.to_string())))
}

fn fit_metric(records: &[AlphaRecord], f: impl Fn(&AlphaRecord) -> f64) -> Option<RateFit> {
    let pairs: Vec<(f64, f64)> = records.iter().filter(|r| r.alpha > 0.0 && r.failure.is_none()).map(|r| (r.alpha, f(r))).collect();
    fit_rate(&pairs).ok()
}

/// Sweep `alphas` against the `alpha = 0` run on identical grid, step and data.
pub fn run_alpha_sweep(cfg: &SimConfig, alphas: &[f64], hodge: &Hodge, basis: &Arc<StokesEigenbasis>) -> Result<SweepReport> {
    cfg.validate()?;
    let mut list: Vec<f64> = alphas.to_vec();
    if list.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return Err(Error::Config("alphas must be finite and nonnegative".into()));
    }
    list.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    list.dedup();
    if list.last() != Some(&0.0) {
        list.push(0.0);
    }
    // reference trajectory
    let rcfg = SimConfig { model: cfg.model.with_alpha(0.0), ..cfg.clone() };
    let rsim = Simulation::new(rcfg, Arc::clone(basis))?;
    let mut reference = Vec::with_capacity(cfg.steps() + 1);
    let rout = rsim.run_from(rsim.initial_state(hodge)?, |s| reference.push(s.v.clone()));
    if let Some(e) = rout.blow_up {
        return Err(Error::Numerical(format!("reference run failed: {e}")));
    }
    let records: Vec<AlphaRecord> = list
        .par_iter()
        .map(|&a| member(cfg, a, hodge, basis, &reference))
        .collect::<Result<_>>()?;
    let fits = SweepFits {
        sup_l2_v: fit_metric(&records, |r| r.sup_l2_v),
        int_h1_pair: fit_metric(&records, |r| r.int_h1_pair),
        sup_h1_v: fit_metric(&records, |r| r.sup_h1_v),
        sup_h1_u: fit_metric(&records, |r| r.sup_h1_u),
        sup_neg_v: fit_metric(&records, |r| r.sup_neg_v),
    };
    let monotone = records.windows(2).all(|w| {
        let (a, b) = (&w[0], &w[1]);
        b.sup_l2_v <= a.sup_l2_v && b.int_h1_v <= a.int_h1_v && b.sup_h1_v <= a.sup_h1_v && b.int_h2_v <= a.int_h2_v
    });
    Ok(SweepReport { schema: REPORT_SCHEMA, config: cfg.clone(), records, fits, monotone, manifest: None })
}

/// Per-alpha series of `(t, |v - v0|_{-1/4}, |u - v0|_{-1/4})`.
pub fn weak_convergence_diagnostics(report: &SweepReport) -> Vec<(f64, Vec<(f64, f64, f64)>)> {
    report
        .records
        .iter()
        .map(|r| (r.alpha, r.series.iter().map(|p| (p.t, p.v.neg.sqrt(), p.u.neg.sqrt())).collect()))
        .collect()
}

impl SweepReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    /// Raw per-time error series: `alpha,t,l2_v,h1_v,h2_v,neg_v,l2_u,h1_u,h2_u,neg_u`.
    pub fn series_csv(&self) -> String {
        let mut s = String::new();
        if let Some(m) = &self.manifest {
            s.push_str(&format!("# manifest={m}\n"));
        }
        s.push_str("alpha,t,l2_v,h1_v,h2_v,neg_v,l2_u,h1_u,h2_u,neg_u\n");
        for r in &self.records {
            for p in &r.series {
                let vals = [r.alpha, p.t, p.v.l2, p.v.h1, p.v.h2, p.v.neg, p.u.l2, p.u.h1, p.u.h2, p.u.neg];
                let line: Vec<String> = vals.iter().map(|v| format!("{v:?}")).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
        }
        s
    }
}
