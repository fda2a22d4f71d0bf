use rand::Rng;

use super::{ColouredIndexPair, MatrixFamilyPair};
use crate::gf::{FieldMatrix, PrimeField};

fn random_matrix<R: Rng>(field: PrimeField, rows: usize, cols: usize, rng: &mut R) -> FieldMatrix {
    FieldMatrix::from_fn(field, rows, cols, |_, _| rng.gen_range(0..field.modulus()))
}

fn random_invertible<R: Rng>(field: PrimeField, n: usize, rng: &mut R) -> FieldMatrix {
    loop {
        let m = random_matrix(field, n, n, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Family pair on `n x n` with `count` members: `N` is a conjugate of `M` (half the time),
/// a conjugate with one entry of one member changed, or independent.
pub fn random_family<R: Rng>(field: PrimeField, n: usize, count: usize, rng: &mut R) -> MatrixFamilyPair {
    let m: Vec<FieldMatrix> = (0..count).map(|_| random_matrix(field, n, n, rng)).collect();
    let kind = rng.gen_range(0..4);
    let nn = if kind == 3 {
        (0..count).map(|_| random_matrix(field, n, n, rng)).collect()
    } else {
        let s = random_invertible(field, n, rng);
        let inv = s.inverse().expect("invertible");
        let mut nn: Vec<FieldMatrix> = m.iter().map(|a| &(&inv * a) * &s).collect();
        if kind == 2 && count > 0 && n > 0 {
            let k = rng.gen_range(0..count);
            let (r, c) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let v = field.add(nn[k].get(r, c), rng.gen_range(1..field.modulus()));
            nn[k].set(r, c, v);
        }
        nn
    };
    MatrixFamilyPair::unblocked(field, m, nn).expect("consistent shapes")
}

fn piece<R: Rng>(
    field: PrimeField,
    cip: &ColouredIndexPair,
    s: usize,
    t: usize,
    rng: &mut R,
) -> FieldMatrix {
    let n = cip.left_len();
    let mut m = FieldMatrix::zeros(field, n, n);
    for r in cip.left_range(s) {
        for c in cip.left_range(t) {
            m.set(r, c, rng.gen_range(0..field.modulus()));
        }
    }
    m
}

/// Family of compatible block pairs: every member pair is supported on one block `(s, t)` on
/// both sides. `N` is conjugate to `M` by a random block-diagonal matrix, or (a third of the
/// time) independent. Faithful families also contain the block identity pairs.
pub fn random_block_family<R: Rng>(
    field: PrimeField,
    sizes: &[usize],
    count: usize,
    faithful: bool,
    rng: &mut R,
) -> MatrixFamilyPair {
    let cip = ColouredIndexPair::from_sizes(sizes.to_vec(), sizes.to_vec()).expect("equal sizes");
    let n = cip.left_len();
    let blocks = sizes.len();
    let mut m = Vec::new();
    let mut nn = Vec::new();
    let mut d = FieldMatrix::zeros(field, n, n);
    for b in 0..blocks {
        let inv = random_invertible(field, sizes[b], rng);
        for (i, r) in cip.left_range(b).enumerate() {
            for (j, c) in cip.left_range(b).enumerate() {
                d.set(r, c, inv.get(i, j));
            }
        }
    }
    let d_inv = d.inverse().expect("block diagonal of invertibles");
    let independent = rng.gen_range(0..3) == 0;
    for _ in 0..count {
        let (s, t) = (rng.gen_range(0..blocks), rng.gen_range(0..blocks));
        let a = piece(field, &cip, s, t, rng);
        let b = if independent {
            piece(field, &cip, s, t, rng)
        } else {
            &(&d_inv * &a) * &d
        };
        m.push(a);
        nn.push(b);
    }
    if faithful {
        for b in 0..blocks {
            let id = FieldMatrix::from_fn(field, n, n, |r, c| (r == c && cip.left_range(b).contains(&r)) as u32);
            m.push(id.clone());
            nn.push(id);
        }
    }
    MatrixFamilyPair::new(field, cip, m, nn).expect("consistent shapes")
}
