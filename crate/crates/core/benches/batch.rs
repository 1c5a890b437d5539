//! Sequential against rayon batch planning of the same seeded scenarios.
//! Scenario generation is done once up front; only the planner runs are timed.

use std::hint::black_box;

use carplan::harness::{generate_scenario, run_scenario, RunConfig};
use carplan::par;
use criterion::{criterion_group, criterion_main, Criterion};

const BATCH: u64 = 16;
const SEED: u64 = 1;

fn batch(c: &mut Criterion) {
    let cfg = RunConfig::default();
    let items: Vec<_> = (0..BATCH)
        .map(|i| generate_scenario(SEED, i, &cfg).expect("scenario with a path"))
        .collect();
    let plan = |(s, path): &(carplan::harness::Scenario, Vec<carplan::refgen::Pose>)| {
        run_scenario("bench", s, &cfg, Some(path.clone()))
            .expect("run completes")
            .record
            .success
    };

    let mut group = c.benchmark_group("plan_batch");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| black_box(par::map_seq(&items, plan))));
    #[cfg(feature = "parallel")]
    group.bench_function("rayon", |b| b.iter(|| black_box(par::map_par(&items, plan))));
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
