use alphaflow::domain::ChannelConfig;
use alphaflow::experiments::{fit_rate, run_alpha_sweep, weak_convergence_diagnostics};
use alphaflow::solver::{setup, InitialCondition, ModelKind, SimConfig};
use proptest::prelude::*;

fn sweep_config() -> SimConfig {
    SimConfig {
        channel: ChannelConfig { nx: 8, ny: 8, nz: 9, beta: 0.5, ..ChannelConfig::default() },
        model: ModelKind::LnsAlpha(0.01),
        dt: 0.005,
        t_end: 0.2,
        initial: InitialCondition::TaylorGreen { amplitude: 4.0, perturbation: 0.3, seed: 2 },
        ..SimConfig::default()
    }
}

#[test]
fn exact_power_laws() {
    let alphas = [0.02, 0.01, 0.005, 0.0025];
    let lin: Vec<(f64, f64)> = alphas.iter().map(|&a| (a, 3.0 * a)).collect();
    let f = fit_rate(&lin).unwrap();
    assert!((f.slope - 1.0).abs() < 1e-12 && f.rms_residual < 1e-12);
    let half: Vec<(f64, f64)> = alphas.iter().map(|&a| (a, 0.7 * a.sqrt())).collect();
    assert!((fit_rate(&half).unwrap().slope - 0.5).abs() < 1e-12);
}

#[test]
fn two_term_series_matches_closed_form_fit() {
    let alphas = [0.4, 0.2, 0.1, 0.05, 0.025];
    let pairs: Vec<(f64, f64)> = alphas.iter().map(|&a| (a, 2.0 * a + 5.0 * a * a)).collect();
    let f = fit_rate(&pairs).unwrap();
    // slope = cov(x, y) / var(x) written out with raw sums
    let n = pairs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(a, e) in &pairs {
        let (x, y) = (a.ln(), e.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(f.slope > 1.0 && f.slope < 2.0);
    assert!((f.slope - slope).abs() < 1e-10);
    assert!(f.slope_ci95.unwrap() > 0.0);
}

#[test]
fn nonpositive_pairs_are_excluded() {
    let pairs = [(0.1, 0.1), (0.05, 0.0), (0.025, 0.025), (0.0125, 0.0125)];
    let f = fit_rate(&pairs).unwrap();
    assert_eq!(f.excluded, vec![0.05]);
    assert_eq!(f.points, 3);
    assert!(fit_rate(&pairs[..2]).is_err());
}

#[test]
fn reference_only_sweep_has_zero_errors() {
    let cfg = sweep_config();
    let (h, b) = setup(&cfg).unwrap();
    let r = run_alpha_sweep(&cfg, &[0.0], &h, &b).unwrap();
    assert_eq!(r.records.len(), 1);
    let rec = &r.records[0];
    assert_eq!(rec.alpha, 0.0);
    for v in [rec.sup_l2_v, rec.int_h1_v, rec.sup_h1_v, rec.int_h2_v, rec.sup_l2_u, rec.int_h1_u, rec.sup_neg_v] {
        assert_eq!(v, 0.0);
    }
    assert!(r.fits.sup_l2_v.is_none());
}

#[test]
fn small_sweep_orders_and_rates() {
    let cfg = sweep_config();
    let (h, b) = setup(&cfg).unwrap();
    let r = run_alpha_sweep(&cfg, &[0.0025, 0.02, 0.01, 0.005], &h, &b).unwrap();
    let alphas: Vec<f64> = r.records.iter().map(|x| x.alpha).collect();
    assert_eq!(alphas, vec![0.02, 0.01, 0.005, 0.0025, 0.0]);
    assert!(r.monotone);
    for rec in &r.records {
        assert!(rec.failure.is_none());
        for p in &rec.series {
            assert!(p.v.neg <= p.v.l2 && p.v.l2 <= p.v.h1 && p.v.h1 <= p.v.h2 + p.v.l2);
            assert!(p.u.neg <= p.u.l2 && p.u.l2 <= p.u.h1);
            assert!(p.filter_gap <= p.filter_bound * (1.0 + 1e-10) + 1e-300);
        }
    }
    assert!(r.fits.sup_l2_v.as_ref().unwrap().slope >= 0.9);
    assert!(r.fits.int_h1_pair.as_ref().unwrap().slope >= 0.9);
    assert!(r.fits.sup_h1_v.as_ref().unwrap().slope >= 0.45);
    let weak = weak_convergence_diagnostics(&r);
    let last = |k: usize| weak[k].1.last().unwrap().1;
    assert!(last(3) < last(0));
    assert!(weak[4].1.iter().all(|p| p.1 == 0.0 && p.2 == 0.0));
    // halving alpha roughly halves the negative-norm error
    for k in 0..3 {
        let ratio = r.records[k].sup_neg_v.sqrt() / r.records[k + 1].sup_neg_v.sqrt();
        assert!((1.5..=3.0).contains(&ratio), "{ratio}");
    }
}

#[test]
fn report_serialization_is_reproducible() {
    let cfg = SimConfig { t_end: 0.05, ..sweep_config() };
    let (h, b) = setup(&cfg).unwrap();
    let a = run_alpha_sweep(&cfg, &[0.01, 0.005, 0.0025], &h, &b).unwrap();
    let c = run_alpha_sweep(&cfg, &[0.01, 0.005, 0.0025], &h, &b).unwrap();
    assert_eq!(a.to_json().unwrap(), c.to_json().unwrap());
    assert_eq!(a.series_csv(), c.series_csv());
    let back: alphaflow::experiments::SweepReport = serde_json::from_str(&a.to_json().unwrap()).unwrap();
    assert_eq!(back.fits, a.fits);
}

#[test]
fn negative_alpha_is_rejected() {
    let cfg = sweep_config();
    let (h, b) = setup(&cfg).unwrap();
    assert!(matches!(run_alpha_sweep(&cfg, &[0.01, -0.01], &h, &b), Err(alphaflow::Error::Config(_))));
}

proptest! {
    #[test]
    fn power_law_slopes_are_recovered(p in 0.1f64..3.0, c in 0.01f64..100.0) {
        let pairs: Vec<(f64, f64)> = [0.3, 0.1, 0.03, 0.01].iter().map(|&a: &f64| (a, c * a.powf(p))).collect();
        prop_assert!((fit_rate(&pairs).unwrap().slope - p).abs() < 1e-10);
    }
}
