use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use e2qes::dyson::{sample_compliant, solve_dyson, tdde_residual};
use e2qes::model::PtClass;
use e2qes::observables::double_scaling_compare;
use e2qes::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn class_solves(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases: Vec<_> = PtClass::ALL
        .iter()
        .flat_map(|&class| (0..2).map(move |_| class))
        .map(|class| {
            let (inputs, free) = sample_compliant(class, &mut rng);
            (class, inputs, free)
        })
        .collect();
    let mut group = c.benchmark_group("class_solves");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec.map(&cases, |(class, inputs, free)| {
                    let sol = solve_dyson(*class, inputs, free).unwrap();
                    tdde_residual(inputs, &sol.h_coeffs, &sol.params, 0.3, 24).unwrap()
                })
            })
        });
    }
    group.finish();
}

fn double_scaling(c: &mut Criterion) {
    let zetas = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
    let mut group = c.benchmark_group("double_scaling");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| double_scaling_compare(1.0, &zetas, 0.3, 48, 4, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, class_solves, double_scaling);
criterion_main!(benches);
