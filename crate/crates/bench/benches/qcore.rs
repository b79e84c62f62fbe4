use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use entbase::channels::xstate_depolarizing;
use entbase::protocol::{raw_probabilities, raw_probabilities_oracle};
use entbase::qcore::{
    apply_independent_channels, kraus_amplitude_damping, kraus_depolarizing, make_astro_state,
    make_bell_psi, AstroVisibility,
};

fn kraus(c: &mut Criterion) {
    let bell = make_bell_psi(0.0);
    let l = kraus_amplitude_damping(0.3).unwrap();
    let r = kraus_depolarizing(0.2).unwrap();
    c.bench_function("apply_independent_channels", |b| {
        b.iter(|| apply_independent_channels(black_box(&bell), &l, &r))
    });
}

fn probabilities(c: &mut Criterion) {
    let v = AstroVisibility::new(0.6, 0.8).unwrap();
    let x = xstate_depolarizing(0.2, 0.4).unwrap();
    let (rho_a, rho_x) = (make_astro_state(&v), x.to_density());
    c.bench_function("raw_probabilities closed form", |b| {
        b.iter(|| raw_probabilities(black_box(&v), black_box(&x)))
    });
    c.bench_function("raw_probabilities projector oracle", |b| {
        b.iter(|| raw_probabilities_oracle(black_box(&rho_a), black_box(&rho_x)))
    });
}

criterion_group!(benches, kraus, probabilities);
criterion_main!(benches);
