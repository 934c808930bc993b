//! Exponential time differencing with a second-order Runge-Kutta stage.
//!
//! The linear part `-nu lambda_j` is diagonal in the eigenbasis and is
//! propagated exactly; the projected nonlinearity enters through the
//! `phi_1`, `phi_2` functions, so stiff modes stay slaved to their forcing.

use std::sync::Arc;

use nalgebra::DVector;

use super::galerkin::{coeff_dot, weighted_sq, Coeffs, Galerkin};
use super::initial::initial_coeffs;
use super::ledger::{Applicable, EnergyLedger, EnergyRow};
use super::model::{ModelKind, SimConfig};
use crate::domain::{Field, Grid};
use crate::hodge::Hodge;
use crate::stokes::{FormKind, StokesEigenbasis};
use crate::{tolerances, Error, Result, C64};

/// `(e^z - 1) / z` and `(e^z - 1 - z) / z^2`.
pub fn phi12(z: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        let (mut p1, mut p2) = (0.0, 0.0);
        let mut term = 1.0; // z^k / k!
        for k in 0..18 {
            p1 += term / (k + 1) as f64;
            p2 += term / ((k + 1) * (k + 2)) as f64;
            term *= z / (k + 1) as f64;
        }
        (p1, p2)
    } else {
        let em1 = z.exp_m1();
        (em1 / z, (em1 - z) / (z * z))
    }
}

/// Snapshot of a run.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub step: usize,
    /// Velocity coefficients.
    pub v: Coeffs,
    /// Filtered velocity coefficients.
    pub u: Coeffs,
    /// Projected nonlinearity at `v`.
    pub g: Coeffs,
}

/// Result of `run`: final state, ledger and the blow-up if one happened.
#[derive(Debug)]
pub struct RunOutcome {
    pub state: SimState,
    pub ledger: EnergyLedger,
    pub blow_up: Option<Error>,
}

/// A configured simulation.
#[derive(Debug)]
pub struct Simulation {
    pub cfg: SimConfig,
    pub gal: Galerkin,
    /// Per-mode propagator data `(e^z, phi1, phi2)` with `z = -nu lambda dt`.
    prop: Vec<Vec<(f64, f64, f64)>>,
}

fn applicable(model: ModelKind) -> Applicable {
    match model {
        ModelKind::Ns => Applicable { eq51: true, eq547: true, eq725: true },
        ModelKind::LnsAlpha(_) => Applicable { eq51: true, eq547: true, eq725: false },
        ModelKind::LerayAlpha(_) => Applicable { eq51: true, eq547: false, eq725: true },
    }
}

impl Simulation {
    pub fn new(cfg: SimConfig, basis: Arc<StokesEigenbasis>) -> Result<Self> {
        cfg.validate()?;
        if basis.grid.config != cfg.channel {
            return Err(Error::Config("eigenbasis was computed for a different channel".into()));
        }
        let gal = Galerkin::new(basis, cfg.model, cfg.modes, cfg.nonlinear)?;
        let prop = gal
            .lambda
            .iter()
            .map(|l| {
                l.iter()
                    .map(|&lam| {
                        let z = -gal.nu * lam * cfg.dt;
                        let (p1, p2) = phi12(z);
                        (z.exp(), p1, p2)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { cfg, gal, prop })
    }

    /// State with the given velocity coefficients at time `t`.
    pub fn state_from(&self, mut v: Coeffs, t: f64, step: usize) -> Result<SimState> {
        self.gal.truncate(&mut v);
        self.gal.symmetrize(&mut v);
        let g = self.gal.nonlinearity(&v)?;
        let u = self.gal.filter(&v);
        Ok(SimState { t, step, v, u, g })
    }

    pub fn initial_state(&self, hodge: &Hodge) -> Result<SimState> {
        let v = initial_coeffs(&self.cfg.initial, &self.gal, hodge)?;
        self.state_from(v, 0.0, 0)
    }

    pub fn ledger_row(&self, s: &SimState) -> EnergyRow {
        let a = self.gal.alpha();
        let lam = &self.gal.lambda;
        let ones: Vec<Vec<f64>> = lam.iter().map(|l| vec![1.0; l.len()]).collect();
        let sq: Vec<Vec<f64>> = lam.iter().map(|l| l.iter().map(|x| x * x).collect()).collect();
        let e_u = weighted_sq(&s.u, &ones);
        let a_u = weighted_sq(&s.u, lam);
        EnergyRow {
            t: s.t,
            e_v: weighted_sq(&s.v, &ones),
            a_beta_v: weighted_sq(&s.v, lam),
            e_u_alpha: e_u + a * a_u,
            diss: a * weighted_sq(&s.u, &sq),
            bvu_v: coeff_dot(&s.g, &s.v),
            bvu_u: coeff_dot(&s.g, &s.u),
            res_51: 0.0,
            res_547: 0.0,
            res_725: 0.0,
            a_beta_u: a_u,
            e_u,
        }
    }

    fn check_finite(&self, v: &Coeffs, t: f64) -> Result<()> {
        for (b, x) in v.iter().enumerate() {
            for (j, c) in x.iter().enumerate() {
                if !(c.re.is_finite() && c.im.is_finite()) || c.norm() > tolerances::BLOW_UP {
                    let w = &self.gal.grid().blocks[b];
                    return Err(Error::BlowUp {
                        time: t,
                        detail: format!("coefficient {j} of block k=({}, {}) is {c}", w.kx, w.ky),
                    });
                }
            }
        }
        Ok(())
    }

    /// One step of length `dt`.
    pub fn step(&self, s: &SimState) -> Result<SimState> {
        let h = self.cfg.dt;
        let stage: Coeffs = s
            .v
            .iter()
            .zip(&s.g)
            .zip(&self.prop)
            .map(|((c, g), p)| DVector::from_fn(c.len(), |j, _| c[j] * p[j].0 - g[j] * (h * p[j].1)))
            .collect();
        self.check_finite(&stage, s.t + h)?;
        let ga = self.gal.nonlinearity(&stage)?;
        let mut next: Coeffs = stage
            .iter()
            .zip(ga.iter().zip(&s.g))
            .zip(&self.prop)
            .map(|((a, (ga, gn)), p)| {
                DVector::from_fn(a.len(), |j, _| a[j] - (ga[j] - gn[j]) * C64::new(h * p[j].2, 0.0))
            })
            .collect();
        self.gal.truncate(&mut next);
        self.gal.symmetrize(&mut next);
        self.check_finite(&next, s.t + h)?;
        self.state_from(next, s.t + h, s.step + 1)
    }

    /// Integrate to `t_end`; `observer` sees every accepted state (including the first).
    pub fn run_from(&self, start: SimState, mut observer: impl FnMut(&SimState)) -> RunOutcome {
        let mut ledger = EnergyLedger::new(self.gal.nu, self.cfg.dt, applicable(self.cfg.model));
        ledger.push(self.ledger_row(&start));
        observer(&start);
        let mut state = start;
        for _ in 0..self.cfg.steps() {
            match self.step(&state) {
                Ok(next) => {
                    ledger.push(self.ledger_row(&next));
                    observer(&next);
                    state = next;
                }
                Err(e) => return RunOutcome { state, ledger, blow_up: Some(e) },
            }
        }
        RunOutcome { state, ledger, blow_up: None }
    }

    pub fn velocity(&self, s: &SimState) -> Field {
        self.gal.synthesize(&s.v)
    }

    pub fn filtered(&self, s: &SimState) -> Field {
        self.gal.synthesize(&s.u)
    }
}

/// Projectors and eigenbasis for a channel (the expensive setup of every run).
pub fn setup(cfg: &SimConfig) -> Result<(Hodge, Arc<StokesEigenbasis>)> {
    let grid = Grid::new(cfg.channel.clone())?;
    let hodge = Hodge::new(grid)?;
    let basis = StokesEigenbasis::compute(&hodge, FormKind::Vsb { beta: cfg.channel.beta })?;
    Ok((hodge, Arc::new(basis)))
}

/// Build everything from the configuration and integrate.
pub fn run(cfg: &SimConfig) -> Result<RunOutcome> {
    let (hodge, basis) = setup(cfg)?;
    let sim = Simulation::new(cfg.clone(), basis)?;
    let start = sim.initial_state(&hodge)?;
    Ok(sim.run_from(start, |_| {}))
}

#[cfg(test)]
mod tests {
    use super::phi12;

    #[test]
    fn phi_functions_are_continuous_across_the_switch() {
        for z in [-0.0999999, -0.1000001, 0.0999999, 0.1000001] {
            let (p1, p2) = phi12(z);
            assert!((p1 - z.exp_m1() / z).abs() < 1e-13);
            assert!((p2 - (z.exp_m1() - z) / (z * z)).abs() < 1e-10);
        }
        assert_eq!(phi12(0.0), (1.0, 0.5));
    }
}
