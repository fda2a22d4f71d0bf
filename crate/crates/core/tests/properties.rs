use invmap_core::algebra::{group_algebra, is_semisimple_commutative, PermGroupGens};
use invmap_core::cocyclic::{solve_invariant_system, symmetrize_solution, InvariantSystem};
use invmap_core::simsim::{decide_sim_similar, random_family};
use invmap_core::structures::{CfiStructure, OrderedGraph, SimpleGraph, TwistVector};
use invmap_core::wl::{wl_equivalent, wl_refine};
use invmap_core::{FieldMatrix, FieldVector, MatrixFamilyPair, PrimeField, Structure};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 101, 2_147_483_647])
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

fn matrix(q: u64, n: usize, seed: &[u64]) -> FieldMatrix {
    let f = PrimeField::new(q).unwrap();
    FieldMatrix::from_fn(f, n, n, |r, c| f.from_u64(seed[(r * n + c) % seed.len()].wrapping_mul(r as u64 + 7 * c as u64 + 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_inverse_and_fermat(q in prime(), a in 1u64..u64::MAX) {
        let f = PrimeField::new(q).unwrap();
        let x = f.from_u64(a);
        prop_assume!(x != 0);
        let inv = f.inv(x).unwrap();
        prop_assert_eq!(f.mul(x, inv), 1);
        prop_assert_eq!(f.pow(x, q - 1), 1);
        prop_assert_eq!(f.add(x, f.neg(x)), 0);
        prop_assert_eq!(f.sub(f.add(x, inv), inv), x);
    }

    #[test]
    fn rank_nullity(q in small_prime(), rows in 1usize..7, cols in 1usize..7, seed in prop::collection::vec(any::<u64>(), 1..50)) {
        let f = PrimeField::new(q).unwrap();
        let m = FieldMatrix::from_fn(f, rows, cols, |r, c| f.from_u64(seed[(r * cols + c) % seed.len()] >> (r + c)));
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        for v in &kernel {
            prop_assert!(m.mul_vec(v).unwrap().is_zero());
        }
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn inverse_round_trip(q in small_prime(), n in 1usize..6, seed in prop::collection::vec(any::<u64>(), 1..40)) {
        let m = matrix(q, n, &seed);
        if m.is_invertible() {
            let inv = m.inverse().unwrap();
            prop_assert_eq!(m.checked_mul(&inv).unwrap(), FieldMatrix::identity(m.field(), n));
        } else {
            prop_assert!(m.inverse().is_err());
        }
    }

    #[test]
    fn solve_returns_solutions(q in small_prime(), n in 1usize..6, seed in prop::collection::vec(any::<u64>(), 1..40), b in prop::collection::vec(any::<u64>(), 6)) {
        let m = matrix(q, n, &seed);
        let f = m.field();
        let b = FieldVector::new(f, b[..n].iter().map(|&x| f.from_u64(x)).collect()).unwrap();
        if let Some(x) = m.solve(&b).unwrap() {
            prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
        } else {
            prop_assert!(!m.is_invertible());
        }
    }

    #[test]
    fn maschke_on_cyclic_groups(order in 1usize..13, q in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let gens = PermGroupGens::abelian_regular(&[order]);
        let alg = group_algebra(&gens, PrimeField::new(q).unwrap()).unwrap();
        prop_assert_eq!(is_semisimple_commutative(&alg).unwrap(), !(order as u64).is_multiple_of(q));
    }

    #[test]
    fn conjugated_families_are_similar(q in prop::sample::select(vec![2u64, 3]), n in 1usize..5, count in 1usize..4, seed in any::<u64>()) {
        let f = PrimeField::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(f, n, count, &mut rng);
        // Keep M, replace N by a conjugate of M under an invertible matrix.
        let s = (0..50)
            .map(|i| matrix(q, n, &[seed.wrapping_add(i), seed ^ 0x9e37, i + 3]))
            .find(|s| s.is_invertible());
        prop_assume!(s.is_some());
        let s = s.unwrap();
        let inv = s.inverse().unwrap();
        let n_fam: Vec<FieldMatrix> = fam.m().iter().map(|m| inv.checked_mul(m).unwrap().checked_mul(&s).unwrap()).collect();
        let pair = MatrixFamilyPair::unblocked(f, fam.m().to_vec(), n_fam).unwrap();
        let w = decide_sim_similar(&pair, seed).unwrap();
        prop_assert!(w.is_some());
        prop_assert!(pair.is_witness(&w.unwrap()));
    }

    #[test]
    fn decider_witnesses_verify(q in prop::sample::select(vec![2u64, 3]), n in 1usize..4, count in 1usize..4, seed in any::<u64>()) {
        let f = PrimeField::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(f, n, count, &mut rng);
        if let Some(w) = decide_sim_similar(&fam, seed).unwrap() {
            prop_assert!(fam.is_witness(&w));
        }
    }

    #[test]
    fn wl_is_relabelling_invariant(n in 3usize..9, edges in prop::collection::vec((0usize..9, 0usize..9), 0..14), shift in 0usize..9) {
        let edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a % n, b % n)).filter(|(a, b)| a != b).collect();
        let mut dedup = edges.clone();
        dedup.iter_mut().for_each(|e| if e.0 > e.1 { *e = (e.1, e.0) });
        dedup.sort_unstable();
        dedup.dedup();
        let g = SimpleGraph::new(n, dedup).unwrap();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let a = Structure::from_graph(&g);
        let b = a.relabel(&perm).unwrap();
        for k in 1..=2 {
            prop_assert!(wl_equivalent(&a, &b, k).unwrap());
            let ca = wl_refine(&a, k).unwrap();
            let cb = wl_refine(&b, k).unwrap();
            prop_assert_eq!(ca.num_classes(), cb.num_classes());
        }
    }

    #[test]
    fn twists_preserve_invariant(p in prop::sample::select(vec![2u64, 3, 5]), values in prop::collection::vec(0u32..5, 6), load in prop::collection::vec(0u32..5, 4)) {
        let g = OrderedGraph::catalog("K4").unwrap();
        let f = PrimeField::new(p).unwrap();
        let load: Vec<u32> = load.iter().map(|&x| x % p as u32).collect();
        let s = CfiStructure::build(g.clone(), p, &load).unwrap();
        let mut pi = vec![0u32; g.directed_count()];
        for (i, &(u, v)) in g.undirected_edges().iter().enumerate() {
            let e = g.edge_index(u, v).unwrap();
            pi[e] = values[i] % p as u32;
            pi[g.dual(e)] = f.neg(pi[e]);
        }
        let mut text = format!("twist {} mod {p}\n", pi.len());
        for (e, &x) in pi.iter().enumerate() {
            let (u, v) = g.directed_edges()[e];
            text.push_str(&format!("{u} {v} {x}\n"));
        }
        let pi = TwistVector::parse(&text, &g, f).unwrap();
        let t = s.apply_twist(&pi).unwrap();
        prop_assert_eq!(t.iso_invariant(), s.iso_invariant());
        prop_assert!(s.brute_force_isomorphic(&t).unwrap().is_some());
    }

    #[test]
    fn symmetrized_solutions_stay_solutions(q in prop::sample::select(vec![3u64, 5]), seed in prop::collection::vec(0u64..5, 8), x in prop::collection::vec(0u64..5, 4)) {
        // Z2 swapping halves of rows and columns; M = [[A, B], [B, A]] is invariant.
        let f = PrimeField::new(q).unwrap();
        let m = FieldMatrix::from_fn(f, 4, 4, |i, j| f.from_u64(seed[((i / 2) ^ (j / 2)) * 4 + (i % 2) * 2 + j % 2]));
        let swap = vec![2, 3, 0, 1];
        // Symmetric part fixes an invariant right-hand side; a kernel vector breaks the symmetry.
        let mut c: Vec<u32> = [x[0], x[1], x[0], x[1]].iter().map(|&v| f.from_u64(v)).collect();
        let b = m.mul_vec(&FieldVector::new(f, c.clone()).unwrap()).unwrap();
        if let Some(k) = m.kernel_basis().first() {
            for (ci, &ki) in c.iter_mut().zip(k.entries()) {
                *ci = f.add(*ci, f.mul(ki, f.from_u64(x[2] + 1)));
            }
        }
        let c = FieldVector::new(f, c).unwrap();
        let sys = InvariantSystem::new(m, b, vec![(swap.clone(), swap)]).unwrap();
        prop_assert!(sys.is_solution(&c));
        let sym = symmetrize_solution(&sys, &c).unwrap();
        prop_assert!(sys.is_solution(&sym));
        prop_assert!(sys.is_symmetric(&sym));
        let direct = solve_invariant_system(&sys);
        prop_assert!(direct.is_some());
        let direct = direct.unwrap();
        prop_assert!(sys.is_solution(&direct) && sys.is_symmetric(&direct));
    }
}
