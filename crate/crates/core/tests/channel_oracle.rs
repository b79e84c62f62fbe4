//! Closed-form channel states against brute-force Kraus composition.

use entbase::channels::*;
use entbase::qcore::*;
use proptest::prelude::*;

fn psi_plus() -> DensityMatrix4 {
    make_bell_psi(0.0)
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

type Family = (&'static str, fn(f64) -> entbase::Result<KrausChannel>);

const FAMILIES: [Family; 3] = [
    ("amplitude_damping", kraus_amplitude_damping),
    ("dephasing", kraus_dephasing),
    ("depolarizing", kraus_depolarizing),
];

fn closed_form(name: &str, l: f64, r: f64) -> XState {
    match name {
        "amplitude_damping" => xstate_amplitude_damping(l, r),
        "dephasing" => xstate_dephasing(l, r),
        _ => xstate_depolarizing(l, r),
    }
    .unwrap()
}

#[test]
fn closed_forms_match_kraus_on_11x11_grid() {
    for (name, make) in FAMILIES {
        for &l in &grid(11) {
            for &r in &grid(11) {
                let brute = apply_independent_channels(&psi_plus(), &make(l).unwrap(), &make(r).unwrap());
                let closed = closed_form(name, l, r).to_density();
                let diff = brute.max_abs_diff(&closed);
                assert!(diff <= 1e-12, "{name} ({l}, {r}): {diff:e}");
            }
        }
    }
}

#[test]
fn cross_channel_combinations_stay_x_form() {
    for (_, left) in FAMILIES {
        for (_, right) in FAMILIES {
            for &l in &grid(6) {
                for &r in &grid(6) {
                    let out = apply_independent_channels(&psi_plus(), &left(l).unwrap(), &right(r).unwrap());
                    out.validate().unwrap();
                    extract_xstate(&out, 1e-12).unwrap();
                }
            }
        }
    }
}

#[test]
fn mixed_mechanisms_preserve_x_form() {
    let out = apply_independent_channels(
        &psi_plus(),
        &kraus_amplitude_damping(0.3).unwrap(),
        &kraus_dephasing(0.5).unwrap(),
    );
    assert!(out.max_off_x_entry() <= 1e-12);
}

#[test]
fn equal_arm_loss_parameters() {
    let x = xstate_amplitude_damping(0.5, 0.5).unwrap();
    assert_eq!(x.subspace_weight(), 0.5);
    let x = xstate_depolarizing(1.0, 1.0).unwrap();
    assert!((x.subspace_weight() - 5.0 / 9.0).abs() < 1e-15);
    assert!((x.w_a - 1.0 / 18.0).abs() < 1e-15);
}

#[test]
fn depolarizing_x_parameter_bounded() {
    for &l in &grid(41) {
        for &r in &grid(41) {
            let x = depolarizing_x(l, r).unwrap();
            assert!((-1e-15..=1.0 / 3.0 + 1e-15).contains(&x), "x({l},{r}) = {x}");
        }
    }
}

#[test]
fn concurrence_and_rate_monotone_on_equal_arms() {
    let fine = grid(101);
    let families: [(&str, f64); 3] = [("amplitude_damping", 1.0), ("dephasing", 1.0), ("depolarizing", 0.75)];
    for (name, top) in families {
        let mut last_c = f64::INFINITY;
        let mut last_rate = f64::INFINITY;
        for &p in fine.iter().map(|p| p * top).collect::<Vec<_>>().iter() {
            let x = closed_form(name, p, p);
            let c = if x.subspace_weight() > 0.0 { x.concurrence_subspace().unwrap() } else { 0.0 };
            let rate = normalized_rate(x.subspace_weight());
            assert!(c <= last_c + 1e-12, "{name}: C rises at {p}");
            assert!(rate <= last_rate + 1e-12, "{name}: rate rises at {p}");
            last_c = c;
            last_rate = rate;
        }
    }
}

#[test]
fn rate_monotone_in_each_arm() {
    let fine = grid(31);
    for (name, top) in [("amplitude_damping", 1.0), ("dephasing", 1.0), ("depolarizing", 0.75)] {
        for &fixed in &fine {
            let fixed = fixed * top;
            let mut last = f64::INFINITY;
            for &p in &fine {
                let rate = normalized_rate(closed_form(name, p * top, fixed).subspace_weight());
                assert!(rate <= last + 1e-12, "{name}: rate rises at ({p}, {fixed})");
                last = rate;
            }
        }
    }
}

#[test]
fn memory_dephasing_superoperator_matches_bell_mixture() {
    let tau = 1.7;
    for sign in [BellSign::Plus, BellSign::Minus] {
        for k in 0..=20 {
            let t = 0.25 * k as f64;
            let gamma = memory_dephasing_channel(t, tau).unwrap();
            let out = apply_independent_channels(&make_bell_psi(sign.phase()), &gamma, &gamma);
            let expected = memory_xstate(t, tau, sign).unwrap().to_density();
            assert!(out.max_abs_diff(&expected) <= 1e-12, "t = {t}");
        }
    }
}

#[test]
fn swap_composes_storage_times() {
    let tau = 2.0;
    for sign in [BellSign::Plus, BellSign::Minus] {
        for i in 0..=10 {
            for j in 0..=10 {
                let (t1, t2) = (0.3 * i as f64, 0.45 * j as f64);
                let swapped = swap_memories(t1, t2, tau, sign).unwrap().to_density();
                let stored = memory_xstate(t1 + t2, tau, sign).unwrap().to_density();
                assert!(swapped.max_abs_diff(&stored) <= 1e-12);
            }
        }
    }
}

#[test]
fn fiber_log_rate_is_the_exact_rate() {
    let rates = RateModel::new(0.6, 1e6).unwrap();
    let l0 = 3.0;
    for k in 0..=30 {
        let b = 0.6 * k as f64;
        let x = FiberLink::symmetric(b).unwrap().amplitude_damped(l0).unwrap();
        let exact = measurement_rate(x.subspace_weight(), &rates).ln();
        assert!((exact - log_rate_fiber(b, l0, &rates).unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn depolarizing_rate_expansion() {
    let rates = RateModel::new(1.0, 1.0).unwrap();
    let beta = 0.5;
    let at = |bl: f64| {
        let l = bl / beta;
        let x = FiberLink::symmetric(l).unwrap().depolarized(beta).unwrap();
        let exact = log_rate_exact(x.subspace_weight(), &rates).unwrap();
        let approx = log_rate_depol_approx(l, beta, &rates).unwrap();
        (exact, approx)
    };
    let (exact, approx) = at(10.0);
    assert!((exact - approx.ln_rate).abs() <= 0.01);
    assert!(approx.in_regime);
    let (_, approx) = at(0.0);
    assert!(!approx.in_regime);
    let (exact, _) = at(60.0);
    assert!((exact.exp() - 5.0 / 18.0).abs() < 1e-12);
}

fn arb_density() -> impl Strategy<Value = DensityMatrix4> {
    proptest::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
        let a = nalgebra::Matrix4::from_fn(|i, j| num_complex::Complex64::new(v[2 * (4 * i + j)], v[2 * (4 * i + j) + 1]));
        let m = a * a.adjoint();
        let tr = m.trace();
        DensityMatrix4::new(m / tr).unwrap()
    })
}

fn arb_channel() -> impl Strategy<Value = KrausChannel> {
    (0usize..3, 0.0f64..=1.0).prop_map(|(k, p)| FAMILIES[k].1(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn channels_preserve_density_invariants(rho in arb_density(), l in arb_channel(), r in arb_channel()) {
        let out = apply_independent_channels(&rho, &l, &r);
        prop_assert!((out.trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(out.trace().im.abs() <= 1e-12);
        prop_assert!(out.hermiticity_defect() <= 1e-12);
        prop_assert!(out.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn wootters_agrees_with_subspace_when_no_double_occupancy(
        g in 0.0f64..0.5, f in 0.0f64..0.5, frac in 0.0f64..=1.0, wp in -3.0f64..3.0
    ) {
        prop_assume!(g + f > 1e-6);
        let x = XState::single_excitation(g, f, frac * (g * f).sqrt(), wp).unwrap();
        let full = x.concurrence_wootters();
        let sub = x.concurrence_subspace().unwrap() * x.subspace_weight();
        prop_assert!((full - sub).abs() <= 1e-12);
    }
}
