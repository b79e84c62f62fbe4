use entbase::imaging::*;
use entbase::protocol::PhaseSettings;
use entbase::ResourceModel;
use num_complex::Complex64;
use proptest::prelude::*;

const LAMBDA: f64 = 1.0;
const SEP: f64 = 0.01;

fn threshold() -> f64 {
    LAMBDA / (2.0 * SEP)
}

fn grid() -> Vec<f64> {
    symmetric_grid(0.03, 121).unwrap()
}

fn exact_samples(sky: &SkyModel, plan: &BaselinePlan) -> Vec<VisibilitySample> {
    plan.baselines()
        .iter()
        .map(|&b| VisibilitySample::exact(b, true_visibility(sky, b)))
        .collect()
}

fn dense_plan(b_max: f64) -> BaselinePlan {
    BaselinePlan::linear(b_max, b_max.round() as usize).unwrap()
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn two_sources_resolved_only_above_threshold() {
    let sky = SkyModel::two_point(SEP, LAMBDA).unwrap();
    let g = grid();
    for (factor, expected) in [(0.5, 1), (2.0, 2)] {
        let img = reconstruct_intensity(&exact_samples(&sky, &dense_plan(factor * threshold())), &g, LAMBDA).unwrap();
        let peaks = find_peaks(&img, 0.5);
        assert_eq!(peaks.len(), expected, "B_m = {factor}x threshold: peaks at {peaks:?}");
    }
}

#[test]
fn reconstruction_is_real() {
    let sky = SkyModel::new(
        vec![
            PointSource { theta: -0.012, flux: 1.0 },
            PointSource { theta: 0.004, flux: 0.5 },
            PointSource { theta: 0.017, flux: 2.0 },
        ],
        LAMBDA,
    )
    .unwrap();
    let img = reconstruct_intensity_complex(&exact_samples(&sky, &dense_plan(80.0)), &grid(), LAMBDA).unwrap();
    for z in img {
        assert!(z.im.abs() <= 1e-12 * z.norm().max(1e-3), "{z}");
    }
}

#[test]
fn real_and_complex_reconstructions_agree() {
    let sky = SkyModel::two_point(SEP, LAMBDA).unwrap();
    let samples = exact_samples(&sky, &dense_plan(60.0));
    let re = reconstruct_intensity(&samples, &grid(), LAMBDA).unwrap();
    let cx = reconstruct_intensity_complex(&samples, &grid(), LAMBDA).unwrap();
    for (a, b) in re.iter().zip(&cx) {
        assert!((a - b.re).abs() <= 1e-12);
    }
}

#[test]
fn fidelity_improves_with_longer_baselines() {
    let sky = SkyModel::two_point(SEP, LAMBDA).unwrap();
    let g = grid();
    let truth = bin_sky(&sky, &g);
    let errs: Vec<f64> = [25.0, 50.0, 100.0, 200.0]
        .iter()
        .map(|&bm| l2(&reconstruct_intensity(&exact_samples(&sky, &dense_plan(bm)), &g, LAMBDA).unwrap(), &truth))
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] <= w[0], "{errs:?}");
    }
}

#[test]
fn end_to_end_peaks_match_truth() {
    let sky = SkyModel::two_point(SEP, LAMBDA).unwrap();
    let plan = BaselinePlan::linear(4.0 * threshold(), 64).unwrap();
    let obs = ObservationPlan { settings: PhaseSettings::default(), trials: 1_000_000, seed: 2024, r_e: 1.0 };
    let g = grid();
    let report = observe_and_image(&sky, &plan, &ResourceModel::Ideal, &obs, &g).unwrap();
    let est: Vec<f64> = report.intensity.iter().map(|r| r.estimated).collect();
    let exact: Vec<f64> = report.intensity.iter().map(|r| r.exact).collect();
    let cell = g[1] - g[0];
    let pe = find_peaks(&est, 0.5);
    let px = find_peaks(&exact, 0.5);
    assert_eq!(pe, px);
    assert_eq!(pe.len(), 2);
    for (i, truth) in pe.iter().zip([-SEP / 2.0, SEP / 2.0]) {
        assert!((g[*i] - truth).abs() <= cell, "{} vs {truth}", g[*i]);
    }
    assert_eq!(report.low_confidence, 0);
}

#[test]
fn noisy_reconstruction_converges() {
    let sky = SkyModel::two_point(SEP, LAMBDA).unwrap();
    let plan = BaselinePlan::linear(100.0, 32).unwrap();
    let g = grid();
    let dist = |trials: u64| {
        let mut sq = 0.0;
        for seed in 0..16 {
            let obs = ObservationPlan { settings: PhaseSettings::default(), trials, seed, r_e: 1.0 };
            let r = observe_and_image(&sky, &plan, &ResourceModel::Ideal, &obs, &g).unwrap();
            let est: Vec<f64> = r.intensity.iter().map(|x| x.estimated).collect();
            let exact: Vec<f64> = r.intensity.iter().map(|x| x.exact).collect();
            sq += l2(&est, &exact).powi(2);
        }
        (sq / 16.0).sqrt()
    };
    let ratio = dist(10_000) / dist(40_000);
    assert!((ratio / 2.0 - 1.0).abs() <= 0.3, "ratio {ratio}");
}

#[test]
fn single_event_flags_every_baseline() {
    let sky = SkyModel::two_point(SEP, LAMBDA).unwrap();
    let plan = BaselinePlan::linear(50.0, 8).unwrap();
    let obs = ObservationPlan { settings: PhaseSettings::default(), trials: 1, seed: 0, r_e: 1.0 };
    let r = observe_and_image(&sky, &plan, &ResourceModel::Ideal, &obs, &grid()).unwrap();
    assert_eq!(r.low_confidence, 8);
    assert!(r.baselines.iter().all(|b| b.estimate.v_a_hat.is_finite()));
}

#[test]
fn zero_weight_resource_fails() {
    let sky = SkyModel::two_point(SEP, LAMBDA).unwrap();
    let plan = BaselinePlan::linear(50.0, 8).unwrap();
    let obs = ObservationPlan { settings: PhaseSettings::default(), trials: 100, seed: 0, r_e: 1.0 };
    let dead = ResourceModel::AmplitudeDamping { lambda_l: 1.0, lambda_r: 1.0 };
    let err = observe_and_image(&sky, &plan, &dead, &obs, &grid()).unwrap_err();
    assert!(matches!(err, entbase::Error::DegenerateResource));
}

fn arb_sky() -> impl Strategy<Value = SkyModel> {
    proptest::collection::vec((-0.1f64..=0.1, 0.01f64..10.0), 1..6).prop_map(|v| {
        SkyModel::new(v.into_iter().map(|(theta, flux)| PointSource { theta, flux }).collect(), LAMBDA).unwrap()
    })
}

proptest! {
    #[test]
    fn visibility_bounded_by_one(sky in arb_sky(), b in 0.0f64..500.0) {
        prop_assert!(true_visibility(&sky, b).norm() <= 1.0 + 1e-14);
        prop_assert!((true_visibility(&sky, 0.0) - Complex64::new(1.0, 0.0)).norm() <= 1e-14);
        let distinct = sky.sources().windows(2).any(|w| (w[0].theta - w[1].theta).abs() > 1e-4);
        let max_off_unity = (1..200)
            .map(|k| 1.0 - true_visibility(&sky, 5.0 * k as f64).norm())
            .fold(0.0f64, f64::max);
        if sky.sources().len() == 1 {
            prop_assert!(max_off_unity <= 1e-14);
        } else if distinct {
            prop_assert!(max_off_unity > 1e-6);
        }
    }
}
