use std::collections::HashSet;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use fsmx_bench::{exhaustive_sample, random_dfa};
use fsmx_core::automata::Pfa;
use fsmx_core::extraction::{extract, DfaOracle, ExtractionConfig, Method};
use fsmx_core::oracle_learning::{most_probable_strings, rpni, DpfaReference};

fn bench_minimize(c: &mut Criterion) {
    let dfa = random_dfa(64, 1);
    c.bench_function("dfa_minimize_64", |b| b.iter(|| black_box(&dfa).minimize()));
}

fn bench_equiv(c: &mut Criterion) {
    let a = random_dfa(32, 2);
    let d = random_dfa(32, 3);
    c.bench_function("dfa_equiv_32x32", |b| {
        b.iter(|| black_box(&a).equiv(black_box(&d)).unwrap())
    });
}

fn bench_pfa_mass(c: &mut Criterion) {
    let pfa = Pfa::unary_halving();
    c.bench_function("pfa_mass_up_to_1000", |b| b.iter(|| black_box(&pfa).mass_up_to(1000)));
}

fn bench_rpni(c: &mut Criterion) {
    let target = fsmx_core::bench::tomita_dfa(2).unwrap();
    let sample = exhaustive_sample(&target, 7);
    c.bench_function("rpni_tomita2_depth7", |b| b.iter(|| rpni(black_box(&sample)).unwrap()));
}

fn bench_extraction(c: &mut Criterion) {
    let dfa = random_dfa(8, 4);
    let oracle = DfaOracle::new(&dfa);
    let cfg = ExtractionConfig { clusters: 8, budget: 800, ..ExtractionConfig::default() };
    let mut group = c.benchmark_group("extraction_dfa8");
    for method in [Method::Quantization, Method::Clustering, Method::Lstar] {
        group.bench_function(method.name(), |b| {
            b.iter(|| extract(black_box(&oracle), method, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_mps(c: &mut Criterion) {
    let lm = DpfaReference::new(Pfa::unary_halving()).unwrap();
    c.bench_function("mps_top50_unary", |b| {
        b.iter(|| most_probable_strings(black_box(&lm), 50, &HashSet::new()).unwrap())
    });
}

criterion_group!(
    benches,
    bench_minimize,
    bench_equiv,
    bench_pfa_mass,
    bench_rpni,
    bench_extraction,
    bench_mps
);
criterion_main!(benches);
