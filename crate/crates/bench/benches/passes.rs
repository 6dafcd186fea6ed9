use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gzz_forge::cliffordpass::compile_cx_layer;
use gzz_forge::diagpass::{compile_diagonal, phase_poly_from_table, DiagOptions};
use gzz_forge::qftpass::qft_compile;
use gzz_forge::schedule::{order_encodings, Heuristic};
use gzz_forge::solver::{hadamard_quotient, solve_lp, solve_mip};
use gzz_forge::trapmodel::coupling_matrix;
use gzz_forge::{SolveOptions, TrapParams};
use gzz_forge_bench::{random_binary, random_lower, random_real, random_table, rng};

fn lp(c: &mut Criterion) {
    let mut g = c.benchmark_group("lp");
    g.sample_size(10);
    let opts = SolveOptions::default();
    for n in [6, 9, 12] {
        let j = coupling_matrix(&TrapParams::yb171_paper(n)).unwrap().j;
        let m = hadamard_quotient(&random_binary(n, &mut rng(n as u64)), &j).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| solve_lp(m, &opts).unwrap()));
    }
    g.finish();
}

fn mip(c: &mut Criterion) {
    let mut g = c.benchmark_group("mip");
    g.sample_size(10);
    let opts = SolveOptions::default();
    for n in [4, 6] {
        let j = coupling_matrix(&TrapParams::yb171_paper(n)).unwrap().j;
        let m = hadamard_quotient(&random_binary(n, &mut rng(n as u64)), &j).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| solve_mip(m, &opts).unwrap()));
    }
    g.finish();
}

fn schedule(c: &mut Criterion) {
    let mut g = c.benchmark_group("schedule");
    for n in [8, 12] {
        let d = solve_lp(&random_real(n, &mut rng(100 + n as u64)), &SolveOptions::default()).unwrap();
        g.bench_with_input(BenchmarkId::new("nn-two-opt", n), &d, |b, d| {
            b.iter(|| order_encodings(d, Heuristic::NnTwoOpt))
        });
    }
    g.finish();
}

fn trap(c: &mut Criterion) {
    let p = TrapParams::yb171_paper(20);
    c.bench_function("trap/couplings/20", |b| b.iter(|| coupling_matrix(&p).unwrap()));
}

fn clifford(c: &mut Criterion) {
    let mut g = c.benchmark_group("directed_cx");
    for n in [8, 16, 32] {
        let bm = random_lower(n, &mut rng(200 + n as u64));
        g.bench_with_input(BenchmarkId::from_parameter(n), &bm, |b, bm| b.iter(|| compile_cx_layer(bm).unwrap()));
    }
    g.finish();
}

fn qft(c: &mut Criterion) {
    let mut g = c.benchmark_group("qft");
    for n in [8, 32] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| qft_compile(n, false).unwrap()));
    }
    g.finish();
}

fn diagonal(c: &mut Criterion) {
    let mut g = c.benchmark_group("diagonal");
    g.sample_size(20);
    for n in [5, 8] {
        let p = phase_poly_from_table(&random_table(n, &mut rng(300 + n as u64))).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| compile_diagonal(p, &DiagOptions::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lp, mip, schedule, trap, clifford, qft, diagonal);
criterion_main!(benches);
