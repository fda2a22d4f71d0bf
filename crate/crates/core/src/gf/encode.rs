//! The two matrix encodings: 0-1 layers per nonzero field element, and
//! rectangular maps as triples of endomorphisms on a shared index set.

use super::field::PrimeField;
use super::matrix::FieldMatrix;
use crate::error::{Error, Result};

/// Splits `m` into 0-1 layers `(t, M^t)` for `t = 1..q-1`, where `M^t[x][y] = 1` iff `m[x][y] = t`.
pub fn layer_decompose(m: &FieldMatrix) -> Vec<(u32, FieldMatrix)> {
    let field = m.field();
    (1..field.modulus())
        .map(|t| {
            let layer = FieldMatrix::from_fn(field, m.rows(), m.cols(), |i, j| {
                u32::from(m.get(i, j) == t)
            });
            (t, layer)
        })
        .collect()
}

/// `sum_t t * M^t`.
pub fn layer_compose(
    field: PrimeField,
    rows: usize,
    cols: usize,
    layers: &[(u32, FieldMatrix)],
) -> Result<FieldMatrix> {
    let mut out = FieldMatrix::zeros(field, rows, cols);
    for (t, layer) in layers {
        if layer.shape() != (rows, cols) {
            return Err(Error::DimensionMismatch(format!(
                "layer {t} has shape {:?}, expected {:?}",
                layer.shape(),
                (rows, cols)
            )));
        }
        out.add_scaled(layer, *t);
    }
    Ok(out)
}

/// Square encoding of an `L x K` matrix over the ambient index set `0..ambient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareEncoding {
    /// Projection onto `F^K`.
    pub dom: FieldMatrix,
    /// Projection onto `F^L`.
    pub im: FieldMatrix,
    /// `M` composed with `dom`, embedded into `B x B`.
    pub star: FieldMatrix,
}

fn check_subset(name: &str, set: &[usize], ambient: usize) -> Result<()> {
    if let Some(&bad) = set.iter().find(|&&i| i >= ambient) {
        return Err(Error::NotSubset(format!(
            "{name} contains {bad}, ambient set has {ambient} elements"
        )));
    }
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotSubset(format!(
            "{name} must be strictly increasing"
        )));
    }
    Ok(())
}

fn projection(field: PrimeField, set: &[usize], ambient: usize) -> FieldMatrix {
    let mut p = FieldMatrix::zeros(field, ambient, ambient);
    for &i in set {
        p.set(i, i, 1);
    }
    p
}

/// Encodes the `L x K` matrix `m` (rows indexed by `l`, columns by `k`, both sorted
/// subsets of `0..ambient`) as three `ambient x ambient` endomorphisms.
pub fn square_encode(m: &FieldMatrix, k: &[usize], l: &[usize], ambient: usize) -> Result<SquareEncoding> {
    check_subset("K", k, ambient)?;
    check_subset("L", l, ambient)?;
    if m.shape() != (l.len(), k.len()) {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {:?}, expected |L| x |K| = {:?}",
            m.shape(),
            (l.len(), k.len())
        )));
    }
    let field = m.field();
    let mut star = FieldMatrix::zeros(field, ambient, ambient);
    for (i, &li) in l.iter().enumerate() {
        for (j, &kj) in k.iter().enumerate() {
            star.set(li, kj, m.get(i, j));
        }
    }
    Ok(SquareEncoding {
        dom: projection(field, k, ambient),
        im: projection(field, l, ambient),
        star,
    })
}

fn projection_support(p: &FieldMatrix, name: &str) -> Result<Vec<usize>> {
    if !p.is_diagonal() {
        return Err(Error::MalformedEncoding(format!("{name} is not diagonal")));
    }
    let mut support = Vec::new();
    for i in 0..p.rows() {
        match p.get(i, i) {
            0 => {}
            1 => support.push(i),
            v => {
                return Err(Error::MalformedEncoding(format!(
                    "{name} has diagonal entry {v}, expected 0 or 1"
                )))
            }
        }
    }
    Ok(support)
}

/// Inverts [`square_encode`], returning `(M, K, L)`.
pub fn square_decode(enc: &SquareEncoding) -> Result<(FieldMatrix, Vec<usize>, Vec<usize>)> {
    let n = enc.star.rows();
    if [enc.dom.shape(), enc.im.shape(), enc.star.shape()]
        .iter()
        .any(|&s| s != (n, n))
    {
        return Err(Error::MalformedEncoding("shapes differ".into()));
    }
    let k = projection_support(&enc.dom, "dom")?;
    let l = projection_support(&enc.im, "im")?;
    let mut in_k = vec![false; n];
    let mut in_l = vec![false; n];
    k.iter().for_each(|&i| in_k[i] = true);
    l.iter().for_each(|&i| in_l[i] = true);
    if enc.star.nonzeros().any(|(r, c, _)| !in_l[r] || !in_k[c]) {
        return Err(Error::MalformedEncoding(
            "star has entries outside L x K".into(),
        ));
    }
    Ok((enc.star.select(&l, &k), k, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let m = FieldMatrix::from_rows(f3, &[vec![2]]).unwrap();
        let layers = layer_decompose(&m);
        assert_eq!(layers[0].1.get(0, 0), 0);
        assert_eq!(layers[1].1.get(0, 0), 1);

        let z = FieldMatrix::zeros(f3, 2, 3);
        assert!(layer_decompose(&z).iter().all(|(_, l)| l.is_zero()));

        let zo = FieldMatrix::from_rows(f3, &[vec![1, 0], vec![1, 1]]).unwrap();
        let layers = layer_decompose(&zo);
        assert_eq!(layers[0].1, zo);
        assert!(layers[1].1.is_zero());
    }

    #[test]
    fn full_subsets_encode_to_identity_projections() {
        let f = PrimeField::new(5).unwrap();
        let m = FieldMatrix::from_rows(f, &[vec![1, 2], vec![3, 4]]).unwrap();
        let enc = square_encode(&m, &[0, 1], &[0, 1], 2).unwrap();
        assert_eq!(enc.dom, FieldMatrix::identity(f, 2));
        assert_eq!(enc.im, FieldMatrix::identity(f, 2));
        assert_eq!(enc.star, m);
    }

    #[test]
    fn zero_map_keeps_projections() {
        let f = PrimeField::new(2).unwrap();
        let m = FieldMatrix::zeros(f, 1, 2);
        let enc = square_encode(&m, &[0, 2], &[1], 3).unwrap();
        assert!(enc.star.is_zero());
        assert_eq!(enc.dom.trace(), 0); // 1 + 1 mod 2
        assert_eq!(enc.dom.nnz(), 2);
        assert_eq!(enc.im.nnz(), 1);
    }

    #[test]
    fn rejects_indices_outside_ambient() {
        let f = PrimeField::new(2).unwrap();
        let m = FieldMatrix::zeros(f, 1, 1);
        assert!(matches!(
            square_encode(&m, &[3], &[0], 3),
            Err(Error::NotSubset(_))
        ));
    }
}
