use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ramcx::quotient::{generate_group, search_polynomial, DEFAULT_GROUP_BUDGET};
use ramcx::spectra::{biregular_top_pair, second_eigenvalue, LanczosConfig};
use ramcx::{Field, SparseSym};

fn field_mul(c: &mut Criterion) {
    let f = Field::new(3, 4).unwrap();
    let xs: Vec<_> = f.elements().collect();
    c.bench_function("f81 mul all pairs", |b| {
        b.iter(|| {
            let mut acc = f.one();
            for &x in &xs {
                for &y in &xs {
                    acc = f.add(acc, f.mul(x, y));
                }
            }
            black_box(acc)
        })
    });
}

fn group_generation(c: &mut Criterion) {
    let cmap = search_polynomial(3, 2, 2, 2).unwrap();
    let gens = cmap.generators().unwrap();
    let mut g = c.benchmark_group("quotient");
    g.sample_size(10);
    g.bench_function("pgl2(9) enumerate", |b| {
        b.iter(|| black_box(generate_group(&gens, &cmap, DEFAULT_GROUP_BUDGET).unwrap().len()))
    });
    g.finish();
}

fn lanczos(c: &mut Criterion) {
    let cmap = search_polynomial(3, 2, 2, 2).unwrap();
    let group = generate_group(&cmap.generators().unwrap(), &cmap, DEFAULT_GROUP_BUDGET).unwrap();
    let op = SparseSym::from_cayley(&group.graph);
    let side: Vec<bool> = group.graph.types.as_ref().unwrap().iter().map(|&t| t == 0).collect();
    let ex = biregular_top_pair(&side, 4.0, 4.0);
    let mut g = c.benchmark_group("spectra");
    g.sample_size(10);
    g.bench_function("pgl2(9) second eigenvalue", |b| {
        b.iter(|| black_box(second_eigenvalue(&op, &ex, &LanczosConfig::default()).unwrap().value))
    });
    g.finish();
}

criterion_group!(benches, field_mul, group_generation, lanczos);
criterion_main!(benches);
