//! Energy ledger: per-step energies, transfer terms and identity residuals.

use serde::Serialize;

/// One ledger row; residuals refer to the step ending at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRow {
    pub t: f64,
    /// `|v|^2`
    pub e_v: f64,
    /// `a_beta(v, v)`
    pub a_beta_v: f64,
    /// `|u|^2 + alpha a_beta(u, u)`
    pub e_u_alpha: f64,
    /// `alpha |P Delta u|^2`
    pub diss: f64,
    /// `(B(v, u), v)`
    pub bvu_v: f64,
    /// `(B(v, u), u)`
    pub bvu_u: f64,
    pub res_51: f64,
    pub res_547: f64,
    pub res_725: f64,
    /// `a_beta(u, u)`, kept for the filtered-energy identity.
    #[serde(skip)]
    pub a_beta_u: f64,
    /// `|u|^2`
    #[serde(skip)]
    pub e_u: f64,
}

pub const CSV_HEADER: &str = "t,E_v,a_beta_v,E_u_alpha,diss,Bvu_v,Bvu_u,res_51,res_547,res_725";

/// Which identities are meaningful for a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Applicable {
    pub eq51: bool,
    pub eq547: bool,
    pub eq725: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub nu: f64,
    pub dt: f64,
    pub applicable: Applicable,
    pub rows: Vec<EnergyRow>,
}

/// Maximum normalized residual of each identity over the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub steps: usize,
    pub max_res_51: f64,
    pub max_res_547: f64,
    pub max_res_725: f64,
    /// Largest skew defect: `|(B, u)| / (|v|_1 |u|^2)` for the rotational form,
    /// `|(B, v)| / (|u|_1 |v|^2)` for the convective one.
    pub max_skew: f64,
    /// Whether `|v|^2` never increased (meaningful for NS and Leray-alpha).
    pub energy_nonincreasing: bool,
}

fn trapezoid_residual(e0: f64, e1: f64, q0: f64, q1: f64, dt: f64) -> f64 {
    let rate = (e1 - e0) / dt;
    let scale = rate.abs().max(q0.abs()).max(q1.abs());
    if scale == 0.0 {
        return 0.0;
    }
    (rate + 0.5 * (q0 + q1)).abs() / scale
}

impl EnergyLedger {
    pub fn new(nu: f64, dt: f64, applicable: Applicable) -> Self {
        Self { nu, dt, applicable, rows: Vec::new() }
    }

    fn q51(&self, r: &EnergyRow) -> f64 {
        2.0 * self.nu * r.a_beta_v + 2.0 * r.bvu_v
    }

    fn q547(&self, r: &EnergyRow) -> f64 {
        2.0 * self.nu * (r.a_beta_u + r.diss) + 2.0 * r.bvu_u
    }

    fn q725(&self, r: &EnergyRow) -> f64 {
        2.0 * self.nu * r.a_beta_v
    }

    /// Append a row, filling its residuals from the previous one.
    pub fn push(&mut self, mut row: EnergyRow) {
        if let Some(prev) = self.rows.last() {
            let dt = row.t - prev.t;
            let a = self.applicable;
            if a.eq51 {
                row.res_51 = trapezoid_residual(prev.e_v, row.e_v, self.q51(prev), self.q51(&row), dt);
            }
            if a.eq547 {
                row.res_547 = trapezoid_residual(prev.e_u_alpha, row.e_u_alpha, self.q547(prev), self.q547(&row), dt);
            }
            if a.eq725 {
                row.res_725 = trapezoid_residual(prev.e_v, row.e_v, self.q725(prev), self.q725(&row), dt);
            }
        }
        self.rows.push(row);
    }

    pub fn to_csv(&self, manifest: Option<&str>) -> String {
        let mut s = String::new();
        if let Some(m) = manifest {
            s.push_str(&format!("# manifest={m}\n"));
        }
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let vals = [r.t, r.e_v, r.a_beta_v, r.e_u_alpha, r.diss, r.bvu_v, r.bvu_u, r.res_51, r.res_547, r.res_725];
            let line: Vec<String> = vals.iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

/// Summarize the identity residuals of a ledger.
pub fn energy_report(ledger: &EnergyLedger) -> EnergyReport {
    let mut rep = EnergyReport {
        steps: ledger.rows.len().saturating_sub(1),
        max_res_51: 0.0,
        max_res_547: 0.0,
        max_res_725: 0.0,
        max_skew: 0.0,
        energy_nonincreasing: true,
    };
    for (i, r) in ledger.rows.iter().enumerate() {
        rep.max_res_51 = rep.max_res_51.max(r.res_51);
        rep.max_res_547 = rep.max_res_547.max(r.res_547);
        rep.max_res_725 = rep.max_res_725.max(r.res_725);
        let (defect, scale) = if ledger.applicable.eq547 {
            (r.bvu_u, (r.e_v + r.a_beta_v).sqrt() * r.e_u)
        } else {
            (r.bvu_v, (r.e_u + r.a_beta_u).sqrt() * r.e_v)
        };
        if scale > 0.0 {
            rep.max_skew = rep.max_skew.max(defect.abs() / scale);
        }
        if i > 0 && r.e_v > ledger.rows[i - 1].e_v {
            rep.energy_nonincreasing = false;
        }
    }
    rep
}
