//! Monte Carlo behaviour of the visibility estimator.

use entbase::channels::postselected_events;
use entbase::protocol::*;
use entbase::qcore::*;

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn rmse_falls_as_inverse_root_n() {
    let v = AstroVisibility::new(0.6, 0.7).unwrap();
    let x = XState::bell(0.0);
    let ph = PhaseSettings::default();
    let ns = [1_000u64, 10_000, 100_000];
    let rmse: Vec<f64> = ns
        .iter()
        .map(|&n| replicate_rmse(&v, &x, &ph, n, 200, 11).unwrap().0)
        .collect();
    let lx: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = rmse.iter().map(|r| r.ln()).collect();
    let s = slope(&lx, &ly);
    assert!((s + 0.5).abs() <= 0.05, "slope {s}");
}

#[test]
fn error_bars_cover_truth() {
    let v = AstroVisibility::new(0.7, 0.9).unwrap();
    let x = XState::bell(0.0);
    let ph = PhaseSettings::default();
    let covered = (0..100)
        .filter(|&s| {
            let est = run_observation(&v, &x, &ph, 1_000_000, derive_seed(3, s)).unwrap();
            (est.v_a_hat - 0.7).abs() <= 5.0 * est.dv_a
        })
        .count();
    assert!(covered >= 95, "{covered}/100");
}

#[test]
fn amplitude_error_tracks_concurrence_and_weight() {
    let v = AstroVisibility::new(0.5, std::f64::consts::FRAC_PI_4).unwrap();
    let ph = PhaseSettings::default();
    let n0 = 100_000;
    let mut products = Vec::new();
    for c in [0.3, 0.6, 1.0] {
        for xi in [0.3, 0.6, 1.0] {
            let x = XState::single_excitation(xi / 2.0, xi / 2.0, c * xi / 2.0, 0.0).unwrap();
            let n = postselected_events(xi, n0);
            let (ra, _) = replicate_rmse(&v, &x, &ph, n, 200, 21).unwrap();
            products.push(ra * c * xi.sqrt());
        }
    }
    let mean = products.iter().sum::<f64>() / products.len() as f64;
    for p in &products {
        assert!((p / mean - 1.0).abs() <= 0.2, "{products:?}");
    }
}

#[test]
fn phase_error_tracks_weight_at_fixed_concurrence() {
    let v = AstroVisibility::new(0.5, std::f64::consts::FRAC_PI_4).unwrap();
    let ph = PhaseSettings::default();
    let mut products = Vec::new();
    for xi in [0.3, 0.6, 1.0] {
        let x = XState::single_excitation(xi / 2.0, xi / 2.0, xi / 2.0, 0.0).unwrap();
        let (_, rp) = replicate_rmse(&v, &x, &ph, postselected_events(xi, 100_000), 200, 5).unwrap();
        products.push(rp * xi.sqrt());
    }
    let mean = products.iter().sum::<f64>() / 3.0;
    for p in &products {
        assert!((p / mean - 1.0).abs() <= 0.2, "{products:?}");
    }
}

#[test]
fn replicas_are_reproducible() {
    let v = AstroVisibility::new(0.4, -1.0).unwrap();
    let x = XState::single_excitation(0.4, 0.4, 0.3, 0.2).unwrap();
    let ph = PhaseSettings::default();
    let a = replicate_rmse(&v, &x, &ph, 5000, 64, 9).unwrap();
    let b = replicate_rmse(&v, &x, &ph, 5000, 64, 9).unwrap();
    assert_eq!(a, b);
}
