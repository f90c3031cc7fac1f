//! Each workload runs once on the global rayon pool and once inside a
//! single-thread pool. Building with `--no-default-features` makes both
//! variants sequential.

use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, criterion_group, criterion_main};
use crouzeix_lab::C64;
use crouzeix_lab::conformal::{EllipseMapSeries, QuinticMap, SymmetryMode, phi_inverse, verify_symmetry};
use crouzeix_lab::crouzeix::{cauchy_transform_numeric, ratio_search};
use crouzeix_lab::matrices::{DenseMatrix, Matrix2, nr_boundary};
use rayon::ThreadPool;

fn single_thread_pool() -> ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool")
}

fn compare<R: Send>(c: &mut Criterion, name: &str, work: impl Fn() -> R + Sync) {
    let sequential = single_thread_pool();
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("parallel", rayon::current_num_threads()), |b| b.iter(|| black_box(work())));
    group.bench_function(BenchmarkId::new("sequential", 1), |b| b.iter(|| sequential.install(|| black_box(work()))));
    group.finish();
}

fn bench_symmetry(c: &mut Criterion) {
    let q = QuinticMap::new(0.25, 0.05).unwrap();
    let r: Vec<f64> = (1..=200).map(|i| i as f64 / 200.0).collect();
    let t: Vec<f64> = (0..200).map(|k| 2.0 * PI * k as f64 / 200.0).collect();
    compare(c, "verify_symmetry_bicirc_200x200", || {
        verify_symmetry(|z| q.eval(z), SymmetryMode::Bicircular, &r, &t, 1e-10)
    });

    let m = EllipseMapSeries::new(1.0, 1e-14).unwrap();
    let r: Vec<f64> = (1..=40).map(|i| 0.999 * i as f64 / 40.0).collect();
    let t: Vec<f64> = (0..40).map(|k| 2.0 * PI * k as f64 / 40.0).collect();
    compare(c, "verify_symmetry_phi_inverse_40x40", || {
        verify_symmetry(|w| phi_inverse(&m, w, 1e-13).unwrap(), SymmetryMode::Bicircular, &r, &t, 1e-8)
    });
}

fn bench_numrange(c: &mut Criterion) {
    let a = Matrix2::from_real(1.0, 2.0, 0.0, -1.0);
    compare(c, "nr_boundary_2x2_4096", || nr_boundary(&a, 4096).unwrap());

    let entries: Vec<C64> = (0..36).map(|k| C64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos())).collect();
    let dense = DenseMatrix::from_row_slice(6, &entries).unwrap();
    compare(c, "nr_boundary_dense6_720", || nr_boundary(&dense, 720).unwrap());
}

fn bench_crouzeix(c: &mut Criterion) {
    compare(c, "cauchy_transform_8192", || cauchy_transform_numeric(1.0, C64::new(0.3, 0.2), 8192).unwrap());
    let a = Matrix2::from_real(0.0, 2.0, 0.0, 0.0);
    compare(c, "ratio_search_degree2_8", || ratio_search(&a, 2, 8, 0).unwrap());
}

criterion_group!(benches, bench_symmetry, bench_numrange, bench_crouzeix);
criterion_main!(benches);
