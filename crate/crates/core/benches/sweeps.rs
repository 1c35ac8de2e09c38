//! Parallel vs sequential sweep timings.
//!
//! Each group runs the same workload twice, toggling `exec::set_parallel`
//! between the rayon path and the plain-iterator fallback.  Built without
//! the `parallel` feature the toggle is a no-op and the two labels time
//! the same sequential code.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ccvar_core::balg::BooleanAlgebra;
use ccvar_core::bset::{free_bset, naive_bset_homs_by_action};
use ccvar_core::clone::bicross::bicross_build;
use ccvar_core::matched::{bm_exponential, extract_from_endos, m_bmset, MatchedTheoryData};
use ccvar_core::{exec, Limits};

const MODES: [(&str, bool); 2] = [("parallel", true), ("sequential", false)];

fn bench_bset_homs(c: &mut Criterion) {
    let limits = Limits::default();
    let alg = BooleanAlgebra::new(2).unwrap();
    // Carriers 4 and 16, so the sweep filters 16^4 = 65536 candidate maps.
    let x = free_bset(&alg, 2, &limits).unwrap().bset;
    let y = free_bset(&alg, 3, &limits).unwrap().bset;

    let mut group = c.benchmark_group("bset_homs_naive");
    for (label, par) in MODES {
        group.bench_function(label, |b| {
            exec::set_parallel(par);
            b.iter(|| naive_bset_homs_by_action(black_box(&x), black_box(&y), &limits).unwrap());
        });
    }
    group.finish();
    exec::set_parallel(true);
}

fn bench_bm_exponential(c: &mut Criterion) {
    let limits = Limits::default();
    let pair = extract_from_endos(2, &limits).unwrap();
    let m = m_bmset(&pair, &limits).unwrap();

    let mut group = c.benchmark_group("bm_exponential");
    for (label, par) in MODES {
        group.bench_function(label, |b| {
            exec::set_parallel(par);
            b.iter(|| bm_exponential(black_box(&m), black_box(&m), &limits).unwrap());
        });
    }
    group.finish();
    exec::set_parallel(true);
}

fn bench_bicross_ops(c: &mut Criterion) {
    let limits = Limits::default();
    let pair = extract_from_endos(2, &limits).unwrap();
    let data = MatchedTheoryData { pair };

    let mut group = c.benchmark_group("bicross_ops");
    group.sample_size(10);
    for (label, par) in MODES {
        group.bench_function(label, |b| {
            exec::set_parallel(par);
            b.iter(|| bicross_build(black_box(&data), 2, &limits).unwrap());
        });
    }
    group.finish();
    exec::set_parallel(true);
}

criterion_group!(benches, bench_bset_homs, bench_bm_exponential, bench_bicross_ops);
criterion_main!(benches);
