use criterion::{black_box, criterion_group, criterion_main, Criterion};
use invmap_core::coherent::configuration_from_coloring;
use invmap_core::simsim::{decide_sim_similar, random_family};
use invmap_core::structures::{CfiStructure, OrderedGraph};
use invmap_core::wl::wl_refine;
use invmap_core::{FieldMatrix, PrimeField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfi(name: &str, p: u64) -> CfiStructure {
    let g = OrderedGraph::catalog(name).unwrap();
    CfiStructure::build(g.clone(), p, &vec![0; g.n()]).unwrap()
}

fn linear_algebra(c: &mut Criterion) {
    let f = PrimeField::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = FieldMatrix::from_fn(f, 120, 120, |_, _| rng.gen_range(0..3));
    c.bench_function("rank 120x120 F3", |b| b.iter(|| black_box(&m).rank()));
    c.bench_function("kernel 120x120 F3", |b| b.iter(|| black_box(&m).kernel_basis()));
}

fn refinement(c: &mut Criterion) {
    let k4 = cfi("K4", 2).to_structure();
    let petersen = cfi("petersen", 2).to_structure();
    c.bench_function("wl k=1 petersen p=2", |b| b.iter(|| wl_refine(black_box(&petersen), 1).unwrap()));
    c.bench_function("wl k=3 K4 p=2", |b| b.iter(|| wl_refine(black_box(&k4), 3).unwrap()));
    c.bench_function("closure K4 p=3 F5", |b| {
        let s = cfi("K4", 3).to_structure();
        let cc = configuration_from_coloring(&s, 1, 3).unwrap();
        b.iter(|| cc.verify_closure(PrimeField::new(5).unwrap()).unwrap())
    });
}

fn similarity(c: &mut Criterion) {
    let f = PrimeField::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let families: Vec<_> = (0..16).map(|_| random_family(f, 6, 3, &mut rng)).collect();
    c.bench_function("decide 16 families n=6 F2", |b| {
        b.iter(|| families.iter().filter(|fam| decide_sim_similar(fam, 0).unwrap().is_some()).count())
    });
}

criterion_group!(kernels, linear_algebra, refinement, similarity);
criterion_main!(kernels);
