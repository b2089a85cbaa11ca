use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use oddsym_core::bv::{compose, compose_relations, delta_l, DarbouxChart, Lagrangian, Semidensity};
use oddsym_core::deformed::DeformedForms;
use oddsym_core::examples::pair_groupoid_demo;
use oddsym_core::poisson::{darboux, LieStructureConstants, OddPoissonStructure};
use oddsym_core::testing::{random_poly, rng};

fn bv_delta(c: &mut Criterion) {
    let chart = DarbouxChart::standard(3).unwrap();
    let vars: Vec<usize> = (0..6).collect();
    let mut r = rng(1);
    c.bench_function("bv_delta (3 pairs, degree 5)", |b| {
        b.iter_batched(
            || Semidensity::new(&chart, random_poly(&mut r, chart.table(), &vars, 5, 6, None)).unwrap(),
            |s| black_box(s.bv_delta().bv_delta()),
            BatchSize::SmallInput,
        )
    });
}

fn normal_form(c: &mut Criterion) {
    let pi = OddPoissonStructure::kirillov_kostant(&LieStructureConstants::sl2()).unwrap();
    let omega = DeformedForms::new(&pi).unwrap();
    let mut r = rng(2);
    c.bench_function("normal-form product in the sl2 crossed product", |b| {
        b.iter_batched(
            || {
                (
                    omega.random_element(&mut r, 2, 2, 3),
                    omega.random_element(&mut r, 2, 2, 3),
                )
            },
            |(x, y)| black_box(omega.mul(&x, &y).unwrap()),
            BatchSize::SmallInput,
        )
    });
    let pi = darboux(2, 1).unwrap();
    c.bench_function("associated graded of darboux(2) through filtration 3", |b| {
        b.iter(|| black_box(DeformedForms::new(&pi).unwrap().gr_dimension_check(4, 3).unwrap()))
    });
}

fn lagrangian_composition(c: &mut Criterion) {
    let mut r = rng(3);
    let hom = DarbouxChart::hom(2, 2).unwrap();
    let pairs: Vec<_> = std::iter::repeat_with(|| (Lagrangian::random(&mut r, &hom), Lagrangian::random(&mut r, &hom)))
        .filter(|(a, b)| compose_relations(a, b).is_ok())
        .take(16)
        .collect();
    c.bench_function("compose δ_L on (2|2) × (2|2)", |b| {
        b.iter(|| {
            for (l1, l2) in &pairs {
                black_box(compose(&delta_l(l1).unwrap(), &delta_l(l2).unwrap()).unwrap());
            }
        })
    });
}

fn groupoid(c: &mut Criterion) {
    let mut group = c.benchmark_group("pair groupoid");
    group.sample_size(10);
    group.bench_function("n = 1 through filtration 1", |b| {
        b.iter(|| black_box(pair_groupoid_demo(1, 1).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bv_delta, normal_form, lagrangian_composition, groupoid);
criterion_main!(benches);
