use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::intertwine::{centralizer, diag_project, intertwiner_module};
use super::{intertwiner_space, ColouredIndexPair, MatrixFamilyPair};
use crate::algebra::{close_under_multiplication, increment, is_cyclic_module, module_closure, ModuleBasis};
use crate::algebra::{EXHAUSTIVE_BUDGET, RANDOM_TRIALS};
use crate::coherent::AlgebraBasis;
use crate::error::{Error, Result};
use crate::gf::{FieldMatrix, PrimeField, Span};

/// Largest number of candidate matrices the oracle enumerates.
pub const BRUTE_FORCE_BUDGET: u128 = 1 << 22;

/// `S N` touching only the nonzeros of `N`.
fn mul_sparse_right(s: &FieldMatrix, n: &FieldMatrix) -> FieldMatrix {
    let f = s.field();
    let mut out = FieldMatrix::zeros(f, s.rows(), n.cols());
    for (t, c, v) in n.nonzeros() {
        for r in 0..s.rows() {
            let x = s.get(r, t);
            if x != 0 {
                out.set(r, c, f.add(out.get(r, c), f.mul(x, v)));
            }
        }
    }
    out
}

fn intertwines(m: &[FieldMatrix], n: &[FieldMatrix], s: &FieldMatrix) -> bool {
    m.iter().zip(n).all(|(a, b)| (a * s) == mul_sparse_right(s, b))
}

/// Rank and trace of every member agree.
fn invariants_agree(m: &[FieldMatrix], n: &[FieldMatrix]) -> bool {
    m.iter().zip(n).all(|(a, b)| a.trace() == b.trace() && a.rank() == b.rank())
}

/// Similarity tests against one fixed family `M`, reusing its centralizer.
pub struct Decider<'a> {
    field: PrimeField,
    size: usize,
    m: &'a [FieldMatrix],
    centralizer: AlgebraBasis,
    seed: u64,
}

impl<'a> Decider<'a> {
    pub fn new(field: PrimeField, size: usize, m: &'a [FieldMatrix], seed: u64) -> Result<Self> {
        Ok(Decider {
            field,
            size,
            m,
            centralizer: centralizer(field, size, m)?,
            seed,
        })
    }

    pub fn centralizer(&self) -> &AlgebraBasis {
        &self.centralizer
    }

    /// An invertible `S` with `M_k S = S N_k`, via cyclicity of `H_{M,N}` over `C_M`. Rank and
    /// trace invariants are assumed to have been compared by the caller.
    pub fn decide(&self, n: &[FieldMatrix]) -> Result<Option<FieldMatrix>> {
        let h = intertwiner_module(self.field, self.size, self.size, self.m, n)?;
        self.decide_with(n, &h)
    }

    fn decide_with(&self, n: &[FieldMatrix], h: &ModuleBasis) -> Result<Option<FieldMatrix>> {
        if h.dim() == 0 || h.dim() != self.centralizer.dim() {
            return Ok(None);
        }
        match is_cyclic_module(&self.centralizer, h, self.seed)? {
            Some(g) if g.is_invertible() => {
                assert!(intertwines(self.m, n, &g), "generator outside the intertwiner space");
                Ok(Some(g))
            }
            _ => Ok(None),
        }
    }
}

/// Properties of a family pair relative to its coloured index pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockProperties {
    pub block_generated: bool,
    pub faithful: bool,
}

fn pair_vector(a: &FieldMatrix, b: &FieldMatrix) -> Vec<u32> {
    a.data().iter().chain(b.data()).copied().collect()
}

fn block_piece(m: &FieldMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> FieldMatrix {
    let mut out = FieldMatrix::zeros(m.field(), m.rows(), m.cols());
    for r in rows {
        for c in cols.clone() {
            out.set(r, c, m.get(r, c));
        }
    }
    out
}

/// Block generation: every block piece of every pair `(M_k, N_k)` lies in the span of the
/// pairs. Faithfulness: additionally every pair of block identities does.
pub fn check_block_properties(fam: &MatrixFamilyPair) -> BlockProperties {
    let cip = fam.cip();
    let field = fam.field();
    let (rows, cols) = (cip.left_len(), cip.right_len());
    let mut span = Span::new(field, rows * rows + cols * cols);
    for (a, b) in fam.m().iter().zip(fam.n()) {
        span.push(&pair_vector(a, b));
    }
    let block_generated = fam.m().iter().zip(fam.n()).all(|(a, b)| {
        (0..cip.blocks()).all(|s| {
            (0..cip.blocks()).all(|t| {
                let pa = block_piece(a, cip.left_range(s), cip.left_range(t));
                let pb = block_piece(b, cip.right_range(s), cip.right_range(t));
                (pa.is_zero() && pb.is_zero()) || span.contains(&pair_vector(&pa, &pb))
            })
        })
    });
    let faithful = block_generated
        && (0..cip.blocks()).all(|s| {
            let ia = block_piece(&FieldMatrix::identity(field, rows), cip.left_range(s), cip.left_range(s));
            let ib = block_piece(&FieldMatrix::identity(field, cols), cip.right_range(s), cip.right_range(s));
            span.contains(&pair_vector(&ia, &ib))
        });
    BlockProperties {
        block_generated,
        faithful,
    }
}

fn block_of(m: &FieldMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> FieldMatrix {
    let r0 = rows.start;
    let c0 = cols.start;
    FieldMatrix::from_fn(m.field(), rows.len(), cols.len(), |r, c| m.get(r0 + r, c0 + c))
}

/// Per block `l`: some `S` in `H_{M,N}` with `Diag_l(S)` invertible, or `None` if there is none.
pub fn is_loc_sim_similar(fam: &MatrixFamilyPair, seed: u64) -> Result<Vec<Option<FieldMatrix>>> {
    let h = intertwiner_space(fam)?;
    loc_sim_witnesses(fam.cip(), &h, seed)
}

fn loc_sim_witnesses(cip: &ColouredIndexPair, h: &ModuleBasis, seed: u64) -> Result<Vec<Option<FieldMatrix>>> {
    let field = h.field();
    let q = field.modulus();
    (0..cip.blocks())
        .map(|l| {
            let (rows, cols) = (cip.left_range(l), cip.right_range(l));
            if rows.is_empty() {
                return Ok(Some(h.element(&vec![0; h.dim()])));
            }
            // Coordinates of H whose projections span the projected space.
            let mut span = Span::new(field, rows.len() * cols.len());
            let mut gens = Vec::new();
            for (j, b) in h.basis().iter().enumerate() {
                if span.push(block_of(b, rows.clone(), cols.clone()).data()) {
                    gens.push(j);
                }
            }
            let d = gens.len();
            let candidate = |c: &[u32]| {
                let mut coords = vec![0u32; h.dim()];
                for (&j, &x) in gens.iter().zip(c) {
                    coords[j] = x;
                }
                let s = h.element(&coords);
                block_of(&s, rows.clone(), cols.clone()).is_invertible().then_some(s)
            };
            if d == 0 {
                return Ok(None);
            }
            let total = (q as u128).checked_pow(d as u32);
            if let Some(total) = total.filter(|&t| t <= EXHAUSTIVE_BUDGET) {
                let mut c = vec![0u32; d];
                for _ in 1..total {
                    increment(&mut c, q);
                    if let Some(s) = candidate(&c) {
                        return Ok(Some(s));
                    }
                }
                return Ok(None);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ l as u64);
            for _ in 0..RANDOM_TRIALS {
                let c: Vec<u32> = (0..d).map(|_| rng.gen_range(0..q)).collect();
                if let Some(s) = candidate(&c) {
                    return Ok(Some(s));
                }
            }
            Err(Error::BudgetExceeded {
                what: format!("invertible projection search on block {l}"),
                required: total.unwrap_or(u128::MAX),
                budget: EXHAUSTIVE_BUDGET,
            })
        })
        .collect()
}

/// Decides whether an invertible `S` with `M_k S = S N_k` for all `k` exists, and returns one.
///
/// Quick refutations by rank and trace come first. Faithful block-generated families with
/// locally similar blocks are decided on diagonal parts; the rest by cyclicity of `H_{M,N}`
/// over `C_M`. Every returned `S` is re-verified.
pub fn decide_sim_similar(fam: &MatrixFamilyPair, seed: u64) -> Result<Option<FieldMatrix>> {
    let field = fam.field();
    let cip = fam.cip();
    let (m, n) = (fam.m(), fam.n());
    if cip.left_len() != cip.right_len() || !invariants_agree(m, n) {
        return Ok(None);
    }
    let size = cip.left_len();
    if m == n {
        return Ok(Some(verified(fam, FieldMatrix::identity(field, size))));
    }
    let h = intertwiner_space(fam)?;
    if h.dim() == 0 {
        return Ok(None);
    }
    let decider = Decider::new(field, size, m, seed)?;
    if h.dim() != decider.centralizer().dim() {
        return Ok(None);
    }

    if cip.blocks() >= 2 {
        let props = check_block_properties(fam);
        if props.faithful && props.block_generated {
            match loc_sim_witnesses(cip, &h, seed) {
                Ok(w) if w.iter().any(Option::is_none) => return Ok(None),
                Ok(_) => {
                    let c_diag: Vec<FieldMatrix> = decider
                        .centralizer()
                        .basis()
                        .iter()
                        .map(|z| diag_project(z, cip, None))
                        .collect::<Result<_>>()?;
                    let c_diag = close_under_multiplication(&c_diag, field)?;
                    let h_diag: Vec<FieldMatrix> = h
                        .basis()
                        .iter()
                        .map(|x| diag_project(x, cip, None))
                        .collect::<Result<_>>()?;
                    let h_diag = module_closure(&c_diag, &h_diag)?;
                    match is_cyclic_module(&c_diag, &h_diag, seed) {
                        Ok(None) => return Ok(None),
                        Ok(Some(g)) if g.is_invertible() && intertwines(m, n, &g) => {
                            return Ok(Some(verified(fam, g)));
                        }
                        Ok(Some(_)) | Err(Error::BudgetExceeded { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                Err(Error::BudgetExceeded { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }

    Ok(decider.decide_with(n, &h)?.map(|s| verified(fam, s)))
}

fn verified(fam: &MatrixFamilyPair, s: FieldMatrix) -> FieldMatrix {
    assert!(fam.is_witness(&s), "returned matrix is not an invertible intertwiner");
    s
}

/// First invertible intertwiner in little-endian order over the entries (row-major).
pub fn brute_force_similar(fam: &MatrixFamilyPair) -> Result<Option<FieldMatrix>> {
    let field = fam.field();
    let cip = fam.cip();
    let (rows, cols) = (cip.left_len(), cip.right_len());
    if rows != cols {
        return Ok(None);
    }
    let q = field.modulus();
    let cells = (rows * cols) as u32;
    let total = (q as u128).checked_pow(cells).filter(|&t| t <= BRUTE_FORCE_BUDGET).ok_or(
        Error::BudgetExceeded {
            what: "enumerating candidate matrices".into(),
            required: (q as u128).checked_pow(cells).unwrap_or(u128::MAX),
            budget: BRUTE_FORCE_BUDGET,
        },
    )?;
    let mut data = vec![0u32; rows * cols];
    for _ in 1..total {
        increment(&mut data, q);
        let s = FieldMatrix::from_raw(field, rows, cols, data.clone());
        if intertwines(fam.m(), fam.n(), &s) && s.is_invertible() {
            return Ok(Some(s));
        }
    }
    // The zero matrix is a witness only for empty index sets.
    Ok((rows == 0).then(|| FieldMatrix::zeros(field, 0, 0)))
}
