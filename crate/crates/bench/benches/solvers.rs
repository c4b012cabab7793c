use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tollsub_core::poa::two_link_affine;
use tollsub_core::{
    affine_worstcase_search, nash_flow, optimal_flow, pigou_generator, AffineGrid, GameInstance,
    LatencyFunction, Mechanism, RoutingProblem, SensitivityModel, SensitivitySpec, SolverParams,
};

fn pigou(c: &mut Criterion) {
    let params = SolverParams::default();
    let game = GameInstance::with_mechanism(
        pigou_generator(4).unwrap(),
        SensitivityModel::homogeneous(),
        &Mechanism::MarginalCost,
    )
    .unwrap();
    c.bench_function("nash pigou p=4 mc", |b| b.iter(|| nash_flow(black_box(&game), &params).unwrap()));
    let problem = pigou_generator(4).unwrap();
    c.bench_function("optimal pigou p=4", |b| b.iter(|| optimal_flow(black_box(&problem), &params).unwrap()));
}

fn heterogeneous(c: &mut Criterion) {
    let params = SolverParams::default();
    let two = GameInstance::with_mechanism(
        two_link_affine(1.0, 0.0, 0.3, 0.7).unwrap(),
        SensitivityModel::two_class(0.4, 1.0, 4.0).unwrap(),
        &Mechanism::scaled_marginal_cost(1.0, 4.0).unwrap(),
    )
    .unwrap();
    c.bench_function("two-class two-link smc", |b| b.iter(|| nash_flow(black_box(&two), &params).unwrap()));

    let four = GameInstance::with_mechanism(
        RoutingProblem::parallel(vec![
            LatencyFunction::affine(1.0, 0.0).unwrap(),
            LatencyFunction::affine(0.5, 0.2).unwrap(),
            LatencyFunction::affine(2.0, 0.1).unwrap(),
            LatencyFunction::affine(0.2, 0.6).unwrap(),
        ])
        .unwrap(),
        SensitivityModel::two_class(0.4, 1.0, 4.0).unwrap(),
        &Mechanism::scaled_marginal_cost(1.0, 4.0).unwrap(),
    )
    .unwrap();
    c.bench_function("two-class four-link smc", |b| b.iter(|| nash_flow(black_box(&four), &params).unwrap()));
}

fn grid(c: &mut Criterion) {
    let params = SolverParams::default();
    let grid = AffineGrid { points: 6, ..AffineGrid::default() };
    let mut g = c.benchmark_group("grid");
    g.sample_size(10);
    g.bench_function("toll beta=0.5, 6 points", |b| {
        b.iter(|| {
            affine_worstcase_search(
                &Mechanism::opt_bounded_toll(0.5).unwrap(),
                &SensitivitySpec::Homogeneous,
                &grid,
                &params,
            )
            .unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, pigou, heterogeneous, grid);
criterion_main!(benches);
