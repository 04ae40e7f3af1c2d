use chainscope::chain::ChainDigraph;
use chainscope::chaos::{classify_sft, search_distal_sft, ClassifyParams};
use chainscope::corpus;
use chainscope::cyclic::decompose;
use chainscope::furstenberg::{rotation_time_set, Family, WindowParams};
use chainscope::report::{cmd_analyze, AnalysisConfig};
use chainscope::system::RealParam;
use chainscope::SftGraph;
use chainscope_bench::{golden_rotation, middle_delta, tent};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn chain_digraph(c: &mut Criterion) {
    let mut group = c.benchmark_group("chain_digraph");
    for cells in [64, 256, 1024] {
        let sys = tent(cells);
        let delta = middle_delta(&sys);
        group.bench_with_input(BenchmarkId::new("tent", cells), &sys, |b, sys| {
            b.iter(|| ChainDigraph::build(sys, delta).chain_components().len())
        });
    }
    group.finish();
}

fn cyclic(c: &mut Criterion) {
    let mut group = c.benchmark_group("cyclic_decompose");
    for cells in [64, 256] {
        let sys = golden_rotation(cells);
        let dg = ChainDigraph::build(&sys, middle_delta(&sys));
        let comps = dg.chain_components();
        group.bench_function(BenchmarkId::new("golden_rotation", cells), |b| {
            b.iter(|| comps.iter().map(|comp| decompose(&dg, comp).map(|d| d.period).unwrap_or(0)).sum::<usize>())
        });
    }
    group.finish();
}

fn furstenberg(c: &mut Criterion) {
    let w = rotation_time_set(&RealParam::GoldenConjugate, 10_000);
    let params = WindowParams { run_req: 100, m_max: 20, ..WindowParams::defaults(10_000) };
    c.bench_function("furstenberg/iapstar_window_10000", |b| {
        b.iter(|| w.window_family_member(Family::IapStar, black_box(&params)).unwrap().member)
    });
}

fn chaos(c: &mut Criterion) {
    let full = SftGraph::full_shift(2);
    let comp = full.irreducible_component().unwrap();
    c.bench_function("chaos/distal_pair_full_shift", |b| {
        b.iter(|| search_distal_sft(&full, &comp, 0, 2, 1_000_000).unwrap().is_some())
    });
    let golden = SftGraph::golden_mean();
    let params = ClassifyParams { n_max: 2, surrogate_trials: 0, ..ClassifyParams::default() };
    c.bench_function("chaos/classify_golden_mean", |b| b.iter(|| classify_sft(&golden, &params).unwrap().len()));
}

fn report(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    for spec in corpus::builtins() {
        let config = AnalysisConfig { spec: spec.name.clone(), ..AnalysisConfig::default() };
        group.bench_function(&spec.name, |b| b.iter(|| cmd_analyze(&spec, &config).unwrap().to_json().len()));
    }
    group.finish();
}

criterion_group!(benches, chain_digraph, cyclic, furstenberg, chaos, report);
criterion_main!(benches);
