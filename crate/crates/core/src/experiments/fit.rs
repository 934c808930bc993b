//! Log-log least-squares rate fits.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

/// Fitted `log e = slope log alpha + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub rms_residual: f64,
    /// Half-width of the 95% confidence interval of the slope (`None` with two points).
    pub slope_ci95: Option<f64>,
    pub points: usize,
    /// Pairs dropped for a non-positive value.
    pub excluded: Vec<f64>,
}

pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit> {
    let mut excluded = Vec::new();
    let mut pts = Vec::new();
    for &(a, e) in pairs {
        if a > 0.0 && e > 0.0 && a.is_finite() && e.is_finite() {
            pts.push((a.ln(), e.ln()));
        } else {
            log::warn!("excluding pair (alpha = {a}, error = {e}) from the rate fit");
            excluded.push(a);
        }
    }
    if pts.len() < 2 || (pairs.len() < 3) {
        return Err(Error::Precondition(format!("rate fit needs at least 3 pairs, got {} usable", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("rate fit needs distinct alphas".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let rms_residual = (sse / n).sqrt();
    let slope_ci95 = if pts.len() > 2 {
        let dof = n - 2.0;
        let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::Numerical(e.to_string()))?.inverse_cdf(0.975);
        Some(t * (sse / dof / sxx).sqrt())
    } else {
        None
    };
    Ok(RateFit { slope, intercept, rms_residual, slope_ci95, points: pts.len(), excluded })
}
