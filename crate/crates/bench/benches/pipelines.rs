use criterion::{black_box, criterion_group, criterion_main, Criterion};
use horseshoe_thermo::maps::MapParams;
use horseshoe_thermo::potentials::{central_potential, PotentialSpec};
use horseshoe_thermo::symbolic::enumerate_level;
use horseshoe_thermo::{expansion, inducing, measures, thermo};

fn bench_enumerate_level(c: &mut Criterion) {
    c.bench_function("enumerate_level_12", |b| {
        b.iter(|| enumerate_level(black_box(12), black_box(0.4)).unwrap())
    });
}

fn bench_markov_equilibrium(c: &mut Criterion) {
    let params = MapParams::standard();
    let phi = central_potential(&params);
    c.bench_function("markov_equilibrium_l8", |b| {
        b.iter(|| measures::markov_equilibrium(black_box(&phi), 8, &params).unwrap())
    });
}

fn bench_pressure_curve_point(c: &mut Criterion) {
    let params = MapParams::standard();
    let grid = [0.5];
    c.bench_function("pressure_curve_point_l8", |b| {
        b.iter(|| expansion::pressure_curve(black_box(&grid), 8, &params).unwrap())
    });
}

fn bench_gibbs_approx(c: &mut Criterion) {
    let params = MapParams::standard();
    let phi = PotentialSpec::constant(-0.5);
    let table = inducing::InducedPotentialTable::build(&phi, 8, 0.4, 8, &params).unwrap();
    c.bench_function("gibbs_approx_k8", |b| {
        b.iter(|| thermo::gibbs_approx(black_box(&table)).unwrap())
    });
}

fn bench_induced_table(c: &mut Criterion) {
    let params = MapParams::standard();
    let phi = central_potential(&params);
    c.bench_function("induced_table_k8", |b| {
        b.iter(|| inducing::InducedPotentialTable::build(black_box(&phi), 8, 0.4, 8, &params).unwrap())
    });
}

criterion_group!(
    pipelines,
    bench_enumerate_level,
    bench_markov_equilibrium,
    bench_pressure_curve_point,
    bench_gibbs_approx,
    bench_induced_table,
);
criterion_main!(pipelines);
