use criterion::{black_box, criterion_group, criterion_main, Criterion};
use gwcycle::{
    big_gw_projective, divisor_class, fourpoint_divisor, parse_element_list, pushforward_divisor,
    GwSpec, TargetSpace,
};

fn spec(space: &str, d: u32, ins: &str) -> GwSpec {
    let space: TargetSpace = space.parse().unwrap();
    GwSpec::with_inferred_codim(space, d, parse_element_list(space, ins).unwrap()).unwrap()
}

fn numbers(c: &mut Criterion) {
    let ex3 = spec("Q3", 2, "H3,H3,H2,H2");
    c.bench_function("fourpoint Q3 ex3", |b| {
        b.iter(|| fourpoint_divisor(black_box(&ex3)).unwrap())
    });
    c.bench_function("plane quartics", |b| {
        b.iter(|| big_gw_projective(2, black_box(4), &[2; 11]).unwrap())
    });
}

fn classes(c: &mut Criterion) {
    let q7 = spec("Q7", 4, "H3,H5,H7,H7,H7,H7");
    c.bench_function("divisor class Q7 d=4", |b| {
        b.iter(|| divisor_class(black_box(&q7)).unwrap())
    });
    let q6 = spec("Q6", 2, "H1,H6,Xi1,Xi1,Xi1,Xi1");
    c.bench_function("divisor class Q6 d=2", |b| {
        b.iter(|| divisor_class(black_box(&q6)).unwrap())
    });
    let z = spec("P3", 2, "H1,H1,H1,H1,H3,H3,H3");
    let mut group = c.benchmark_group("pushforward");
    group.sample_size(20);
    group.bench_function("P3 d=2 to M_0,6", |b| {
        b.iter(|| pushforward_divisor(black_box(&z)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, numbers, classes);
criterion_main!(benches);
