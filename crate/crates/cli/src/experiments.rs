//! Desk-scale experiments. Each returns an [`ExperimentReport`]; `check_*` functions name
//! the first violated expectation.

use std::time::Instant;

use invmap_core::algebra::{group_algebra, is_semisimple_commutative, PermGroupGens};
use invmap_core::cocyclic::{kernel_generators, solve_invariant_system, span_dimension, InvariantSystem};
use invmap_core::coherent::configuration_from_coloring;
use invmap_core::simsim::{
    brute_force_similar, decide_sim_similar, diag_project, intertwiner_space, random_block_family, random_family,
};
use invmap_core::structures::{CfiStructure, OrderedGraph, Structure, CATALOG};
use invmap_core::wl::wl_refine;
use invmap_core::{FieldMatrix, FieldVector, MatrixFamilyPair, PrimeField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::ExperimentReport;
use crate::CliError;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `CFI[G; p; 0]` and `CFI[G; p; e_0]`.
pub fn cfi_pair(graph: &str, p: u64) -> Result<(CfiStructure, CfiStructure), CliError> {
    let g = OrderedGraph::catalog(graph)?;
    let mut twisted = vec![0; g.n()];
    twisted[0] = 1;
    let a = CfiStructure::build(g.clone(), p, &vec![0; g.n()])?;
    let b = CfiStructure::build(g, p, &twisted)?;
    Ok((a, b))
}

fn loads(s: &CfiStructure) -> String {
    s.load().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

/// Basis families of the two sides: `k`-WL on the disjoint union, restricted to pairs,
/// one indicator matrix per class on `A x A` and on `B x B`.
pub fn basis_families(a: &Structure, b: &Structure, k: usize) -> Result<(Vec<Vec<u32>>, usize, usize), CliError> {
    let union = Structure::disjoint_union(a, b)?;
    let pairs = wl_refine(&union, k)?.restrict(2);
    let n = union.n();
    let na = a.n();
    let nb = b.n();
    let classes = pairs.num_classes();
    // cells[i] = (class on A x A, class on B x B) packed as two grids.
    let mut grid = vec![vec![u32::MAX; na * na], vec![u32::MAX; nb * nb]];
    for x in 0..na {
        for y in 0..na {
            grid[0][x * na + y] = pairs.colors()[x * n + y];
        }
    }
    for x in 0..nb {
        for y in 0..nb {
            grid[1][x * nb + y] = pairs.colors()[(na + x) * n + na + y];
        }
    }
    Ok((grid, classes, na))
}

fn family_over(field: PrimeField, grid: &[Vec<u32>], size: usize) -> Result<MatrixFamilyPair, CliError> {
    let mut present: Vec<u32> = grid.iter().flatten().copied().collect();
    present.sort_unstable();
    present.dedup();
    let indicator = |side: &Vec<u32>, class: u32| {
        FieldMatrix::from_fn(field, size, size, |r, c| (side[r * size + c] == class) as u32)
    };
    let m = present.iter().map(|&c| indicator(&grid[0], c)).collect();
    let n = present.iter().map(|&c| indicator(&grid[1], c)).collect();
    Ok(MatrixFamilyPair::unblocked(field, m, n)?)
}

/// Basis families of `CFI[G; p; 0]` and `CFI[G; p; e_0]`, decided over `F_q` and `F_p`.
pub fn separation(graph: &str, p: u64, q: u64, k: usize, seed: u64) -> Result<ExperimentReport, CliError> {
    if p == q {
        return Err(CliError::Usage(format!("q = {q} must differ from p")));
    }
    let start = Instant::now();
    let (a, b) = cfi_pair(graph, p)?;
    let mut r = ExperimentReport::new("separation", seed);
    r.input("graph", graph)
        .input("p", p)
        .input("q", q)
        .input("k", k)
        .input("l", 1)
        .input("load-a", loads(&a))
        .input("load-b", loads(&b));
    let t = Instant::now();
    let (grid, classes, size) = basis_families(&a.to_structure(), &b.to_structure(), k)?;
    r.timing("wl", t.elapsed()).classes("pair-classes", &[classes]);
    if grid[0].len() != grid[1].len() {
        return Err(CliError::Assertion("sides of different sizes".into()));
    }
    for (name, prime) in [("coprime", q), ("matching", p)] {
        let field = PrimeField::new(prime)?;
        let t = Instant::now();
        let fam = family_over(field, &grid, size)?;
        let verdict = decide_sim_similar(&fam, seed)?;
        if let Some(s) = &verdict {
            if !fam.is_witness(s) {
                return Err(CliError::Assertion(format!("witness over F{prime} does not verify")));
            }
        }
        r.input(&format!("{name}-members"), fam.len())
            .verdict(&format!("similar-over-F{prime}"), verdict.is_some())
            .timing(&format!("decide-F{prime}"), t.elapsed());
    }
    let asym = r.verdict_value(&format!("similar-over-F{q}")) == Some("true")
        && r.verdict_value(&format!("similar-over-F{p}")) == Some("false");
    r.verdict("expected-asymmetry", if asym { "holds" } else { "violated" });
    r.timing("total", start.elapsed());
    Ok(r)
}

pub fn check_separation(r: &ExperimentReport) -> Result<(), CliError> {
    match r.verdict_value("expected-asymmetry") {
        Some("holds") => Ok(()),
        _ => Err(CliError::Assertion(
            "expected-asymmetry: similarity over the coprime field and none over the matching field".into(),
        )),
    }
}

/// Minimal `k` with `k`-WL on pairs equal to the automorphism orbits on pairs.
pub fn minimal_homogeneity_k(s: &CfiStructure, max_k: usize) -> Result<Option<usize>, CliError> {
    let orbits = s.orbit_partition(2)?;
    let structure = s.to_structure();
    for k in 2..=max_k {
        let pairs = match wl_refine(&structure, k) {
            Ok(c) => c.restrict(2),
            Err(invmap_core::Error::BudgetExceeded { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        if pairs.same_partition(&orbits) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

pub fn homogeneity(instances: &[(String, u64)], max_k: usize) -> Result<ExperimentReport, CliError> {
    let mut r = ExperimentReport::new("homogeneity", 0);
    r.input("max-k", max_k);
    for (graph, p) in instances {
        let g = OrderedGraph::catalog(graph)?;
        let s = CfiStructure::build(g.clone(), *p, &vec![0; g.n()])?;
        let t = Instant::now();
        let k = minimal_homogeneity_k(&s, max_k)?;
        let key = format!("{graph}-p{p}");
        r.input("instance", &key)
            .verdict(&format!("{key}-minimal-k"), k.map_or("none".to_string(), |k| k.to_string()))
            .timing(&key, t.elapsed());
    }
    Ok(r)
}

pub fn check_homogeneity(r: &ExperimentReport) -> Result<(), CliError> {
    match r.verdicts.iter().find(|(_, v)| v == "none") {
        Some((k, _)) => Err(CliError::Assertion(format!("{k}: no width up to the maximum recovers the orbits"))),
        None => Ok(()),
    }
}

/// Orders of the cyclic factors of every abelian group of order `n` (prime-power form).
pub fn abelian_groups(n: usize) -> Vec<Vec<usize>> {
    fn partitions(e: usize, max: usize) -> Vec<Vec<usize>> {
        if e == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in (1..=e.min(max)).rev() {
            for mut rest in partitions(e - first, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut d = 2;
    while m > 1 {
        let mut e = 0;
        while m.is_multiple_of(d) {
            m /= d;
            e += 1;
        }
        if e > 0 {
            factors.push((d, e));
        }
        d += 1;
    }
    let mut groups = vec![vec![]];
    for (p, e) in factors {
        let mut next = Vec::new();
        for g in &groups {
            for part in partitions(e, e) {
                let mut h: Vec<usize> = g.clone();
                h.extend(part.iter().map(|&x| p.pow(x as u32)));
                next.push(h);
            }
        }
        groups = next;
    }
    groups
}

pub fn maschke(max_order: usize, primes: &[u64]) -> Result<ExperimentReport, CliError> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("maschke", 0);
    let ps: Vec<String> = primes.iter().map(u64::to_string).collect();
    r.input("max-order", max_order).input("fields", ps.join(","));
    let (mut cases, mut disagreements) = (0, Vec::new());
    for n in 1..=max_order {
        for orders in abelian_groups(n) {
            let g = PermGroupGens::abelian_regular(&orders);
            for &q in primes {
                let field = PrimeField::new(q)?;
                let semisimple = is_semisimple_commutative(&group_algebra(&g, field)?)?;
                cases += 1;
                if semisimple != !(n as u64).is_multiple_of(q) {
                    disagreements.push(format!("{orders:?}/F{q}"));
                }
            }
        }
    }
    r.verdict("cases", cases).verdict("disagreements", disagreements.len());
    if !disagreements.is_empty() {
        r.verdict("disagreeing", disagreements.join(" "));
    }
    r.timing("total", start.elapsed());
    Ok(r)
}

fn check_zero(r: &ExperimentReport, key: &str) -> Result<(), CliError> {
    match r.verdict_value(key) {
        Some("0") => Ok(()),
        v => Err(CliError::Assertion(format!("{key}: {}", v.unwrap_or("missing")))),
    }
}

pub fn check_maschke(r: &ExperimentReport) -> Result<(), CliError> {
    check_zero(r, "disagreements")
}

/// Decision against exhaustive search on random families with `|I| = 3`: `trials` over
/// `F_2` and `trials / 2` over `F_3`.
pub fn oracle(trials: usize, seed: u64) -> Result<ExperimentReport, CliError> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("oracle", seed);
    r.input("trials-F2", trials).input("trials-F3", trials / 2).input("size", 3);
    let mut total = 0;
    for (q, count) in [(2u64, trials), (3, trials / 2)] {
        let field = PrimeField::new(q)?;
        let mut g = rng(seed ^ q);
        let (mut present, mut disagree, mut bad_witness) = (0, 0, 0);
        for i in 0..count {
            let members = 1 + i % 3;
            let fam = if i % 3 == 2 {
                random_block_family(field, &[1, 2], members, i % 2 == 0, &mut g)
            } else {
                random_family(field, 3, members, &mut g)
            };
            let d = decide_sim_similar(&fam, seed)?;
            let b = brute_force_similar(&fam)?;
            present += d.is_some() as usize;
            disagree += (d.is_some() != b.is_some()) as usize;
            bad_witness += [d, b].iter().flatten().filter(|s| !fam.is_witness(s)).count();
        }
        r.verdict(&format!("present-F{q}"), present)
            .verdict(&format!("disagreements-F{q}"), disagree)
            .verdict(&format!("bad-witnesses-F{q}"), bad_witness);
        total += disagree + bad_witness;
    }
    r.verdict("violations", total).timing("total", start.elapsed());
    Ok(r)
}

pub fn check_oracle(r: &ExperimentReport) -> Result<(), CliError> {
    check_zero(r, "violations")
}

/// Block-diagonal projection on random compatible block families: `Diag(S) ∈ H` for sampled
/// `S ∈ H`, and `Diag(S)` invertible with `S` in faithful families.
pub fn block_projection(trials: usize, seed: u64) -> Result<ExperimentReport, CliError> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("blocks", seed);
    r.input("trials", trials);
    let mut g = rng(seed);
    let (mut samples, mut invertible, mut violations) = (0, 0, 0);
    for i in 0..trials {
        let q = if i % 2 == 0 { 2 } else { 3 };
        let field = PrimeField::new(q)?;
        let sizes: Vec<usize> = (0..g.gen_range(2..4)).map(|_| g.gen_range(1..3)).collect();
        let faithful = i % 4 < 2;
        let members = g.gen_range(1..4);
        let fam = random_block_family(field, &sizes, members, faithful, &mut g);
        let h = intertwiner_space(&fam)?;
        for _ in 0..8 {
            let coords: Vec<u32> = (0..h.dim()).map(|_| g.gen_range(0..q as u32)).collect();
            let s = h.element(&coords);
            let d = diag_project(&s, fam.cip(), None)?;
            samples += 1;
            if !h.contains(&d) {
                violations += 1;
            }
            if faithful && s.is_invertible() {
                invertible += 1;
                if !d.is_invertible() {
                    violations += 1;
                }
            }
        }
    }
    r.verdict("samples", samples)
        .verdict("invertible-faithful-samples", invertible)
        .verdict("violations", violations)
        .timing("total", start.elapsed());
    Ok(r)
}

pub fn check_blocks(r: &ExperimentReport) -> Result<(), CliError> {
    check_zero(r, "violations")
}

/// Random system invariant under `orders` acting regularly on `copies_i` row blocks and
/// `copies_j` column blocks; half of them get a right-hand side in the image.
fn random_invariant_system<R: Rng>(field: PrimeField, orders: &[usize], rng: &mut R) -> Result<InvariantSystem, CliError> {
    let group = PermGroupGens::abelian_regular(orders);
    let elements = group.elements()?;
    let order = elements.len();
    let (ci, cj) = (rng.gen_range(1..3), rng.gen_range(1..4));
    let (rows, cols) = (ci * order, cj * order);
    let q = field.modulus();
    // M[(a, x)][(b, y)] depends on (a, b, x^{-1} y) through the regular action.
    let index: std::collections::HashMap<&[usize], usize> =
        elements.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
    let inverse: Vec<usize> = elements
        .iter()
        .map(|e| index[invmap_core::algebra::invert(e).as_slice()])
        .collect();
    // Points of each block are element indices; the group acts by left multiplication.
    let mul = |x: usize, y: usize| index[invmap_core::algebra::compose(&elements[x], &elements[y]).as_slice()];
    let table: Vec<u32> = (0..ci * cj * order).map(|_| rng.gen_range(0..q)).collect();
    let m = FieldMatrix::from_fn(field, rows, cols, |r, c| {
        let (a, x) = (r / order, r % order);
        let (b, y) = (c / order, c % order);
        table[(a * cj + b) * order + mul(inverse[x], y)]
    });
    let b = if rng.gen_bool(0.5) {
        let orbit_vals: Vec<u32> = (0..cj).map(|_| rng.gen_range(0..q)).collect();
        let c = FieldVector::new(field, (0..cols).map(|c| orbit_vals[c / order]).collect())?;
        m.mul_vec(&c)?
    } else {
        let vals: Vec<u32> = (0..ci).map(|_| rng.gen_range(0..q)).collect();
        FieldVector::new(field, (0..rows).map(|r| vals[r / order]).collect())?
    };
    let gens = group
        .generators()
        .iter()
        .map(|g| {
            let gi = index[g.as_slice()];
            let act = |copies: usize| (0..copies * order).map(|p| (p / order) * order + mul(gi, p % order)).collect();
            (act(ci), act(cj))
        })
        .collect();
    Ok(InvariantSystem::new(m, b, gens)?)
}

pub fn invariant_systems(trials: usize, seed: u64) -> Result<ExperimentReport, CliError> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("cocyclic", seed);
    r.input("trials", trials).input("groups", "Z2 Z4 Z2xZ2").input("fields", "3,5");
    let mut g = rng(seed);
    let groups: [&[usize]; 3] = [&[2], &[4], &[2, 2]];
    let (mut solvable, mut violations) = (0, 0);
    for i in 0..trials {
        let field = PrimeField::new(if i % 2 == 0 { 3 } else { 5 })?;
        let sys = random_invariant_system(field, groups[i % 3], &mut g)?;
        let generic = sys.matrix().solve(sys.rhs())?;
        let symmetric = solve_invariant_system(&sys);
        solvable += symmetric.is_some() as usize;
        if generic.is_some() != symmetric.is_some() {
            violations += 1;
        }
        if let Some(x) = &symmetric {
            if !sys.is_solution(x) || !sys.is_symmetric(x) {
                violations += 1;
            }
        }
        let gens = kernel_generators(&sys)?;
        let m = sys.matrix();
        if span_dimension(field, m.cols(), &gens) != m.cols() - m.rank() {
            violations += 1;
        }
        for kg in &gens {
            if !m.mul_vec(&kg.vector)?.is_zero() {
                violations += 1;
            }
        }
    }
    r.verdict("solvable", solvable)
        .verdict("violations", violations)
        .timing("total", start.elapsed());
    Ok(r)
}

pub fn check_invariant_systems(r: &ExperimentReport) -> Result<(), CliError> {
    check_zero(r, "violations")
}

/// Closure of the stable pair configurations of every catalog CFI instance.
pub fn closure(primes: &[u64], fields: &[u64]) -> Result<ExperimentReport, CliError> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("closure", 0);
    let fs: Vec<String> = fields.iter().map(u64::to_string).collect();
    r.input("fields", fs.join(","));
    let mut violations = 0;
    for name in CATALOG {
        for &p in primes {
            let g = OrderedGraph::catalog(name)?;
            let s = CfiStructure::build(g.clone(), p, &vec![0; g.n()])?.to_structure();
            let t = Instant::now();
            let cc = configuration_from_coloring(&s, 1, 3)?;
            let key = format!("{name}-p{p}");
            r.input("instance", &key).classes(&key, &[cc.num_classes()]);
            for &q in fields {
                if cc.verify_closure(PrimeField::new(q)?).is_err() {
                    violations += 1;
                    r.verdict(&format!("{key}-F{q}"), "not-closed");
                }
            }
            r.timing(&key, t.elapsed());
        }
    }
    r.verdict("violations", violations).timing("total", start.elapsed());
    Ok(r)
}

pub fn check_closure(r: &ExperimentReport) -> Result<(), CliError> {
    check_zero(r, "violations")
}
