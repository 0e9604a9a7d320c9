use cmsflow_core::verify::{check_identity, named_families};
use cmsflow_core::{Identity, VerifyOptions};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn identity_checks(c: &mut Criterion) {
    let family = named_families(&["perturbed"]).unwrap().remove(0);
    let options = VerifyOptions {
        grid_counts: Some(vec![9, 17]),
        quadrature_counts: Some(vec![24, 32]),
        ..Default::default()
    };
    let mut group = c.benchmark_group("identity");
    group.sample_size(10);
    for identity in [
        Identity::MetricEvolution,
        Identity::Thomas,
        Identity::SurfaceIntegral,
        Identity::PotentialEnergy,
    ] {
        group.bench_function(identity.name(), |b| {
            b.iter(|| check_identity(identity, &family, black_box(1e-2), &options).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, identity_checks);
criterion_main!(benches);
