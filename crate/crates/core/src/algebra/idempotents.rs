//! Local decomposition of commutative algebras, in coordinates.

use crate::coherent::{AlgebraBasis, StructureConstants};
use crate::error::{Error, Result};
use crate::gf::{FieldMatrix, PrimeField};

pub(crate) struct Commutative<'a> {
    field: PrimeField,
    c: &'a StructureConstants,
    one: Vec<u32>,
}

impl<'a> Commutative<'a> {
    /// Fails with `NotCommutative`, or `NotClosed` if the identity is missing.
    pub(crate) fn new(alg: &'a AlgebraBasis) -> Result<Self> {
        let c = alg.constants()?;
        if !c.is_commutative() {
            return Err(Error::NotCommutative);
        }
        let one = alg
            .identity_coordinates()
            .ok_or_else(|| Error::NotClosed("identity is not in the algebra".into()))?;
        Ok(Commutative {
            field: alg.field(),
            c,
            one,
        })
    }

    pub(crate) fn mul(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        self.c.multiply(self.field, x, y)
    }

    fn pow(&self, x: &[u32], mut e: u64) -> Vec<u32> {
        let mut base = x.to_vec();
        let mut acc = self.one.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn dim(&self) -> usize {
        self.c.dim()
    }

    fn unit(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.dim()];
        v[i] = 1 % self.field.modulus();
        v
    }

    /// `x -> x^q`, linear in characteristic `q`.
    fn frobenius(&self) -> FieldMatrix {
        let d = self.dim();
        let q = self.field.modulus() as u64;
        let mut phi = FieldMatrix::zeros(self.field, d, d);
        for i in 0..d {
            for (r, v) in self.pow(&self.unit(i), q).into_iter().enumerate() {
                phi.set(r, i, v);
            }
        }
        phi
    }

    /// Basis of the nilpotent elements.
    pub(crate) fn nilradical(&self) -> Vec<Vec<u32>> {
        let d = self.dim();
        let q = self.field.modulus() as usize;
        let phi = self.frobenius();
        let mut power = phi.clone();
        let mut reach = q;
        while reach < d {
            power = &power * &phi;
            reach = reach.saturating_mul(q);
        }
        power.kernel_basis().into_iter().map(|v| v.into_entries()).collect()
    }

    /// Primitive idempotents, summing to the identity.
    pub(crate) fn primitive_idempotents(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let fixed = (&self.frobenius() - &FieldMatrix::identity(f, self.dim())).kernel_basis();
        let mut idempotents = vec![self.one.clone()];
        for b in &fixed {
            let mut next = Vec::new();
            for e in &idempotents {
                for lambda in f.elements() {
                    let mut p = e.clone();
                    for mu in f.elements().filter(|&mu| mu != lambda) {
                        let inv = f.inv(f.sub(lambda, mu)).expect("distinct");
                        let shifted: Vec<u32> = b
                            .entries()
                            .iter()
                            .zip(&self.one)
                            .map(|(&x, &o)| f.mul(inv, f.sub(x, f.mul(mu, o))))
                            .collect();
                        p = self.mul(&p, &shifted);
                        if p.iter().all(|&x| x == 0) {
                            break;
                        }
                    }
                    if p.iter().any(|&x| x != 0) {
                        next.push(p);
                    }
                }
            }
            idempotents = next;
        }
        idempotents
    }
}

/// Primitive idempotents of a commutative unital algebra, as matrices.
pub(crate) fn primitive_idempotents(alg: &AlgebraBasis) -> Result<Vec<FieldMatrix>> {
    let comm = Commutative::new(alg)?;
    Ok(comm
        .primitive_idempotents()
        .iter()
        .map(|e| alg.element(e))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{group_algebra, PermGroupGens};

    #[test]
    fn group_algebra_components() {
        // F_3[Z_2] splits into two copies of F_3; F_2[Z_2] is local with 1-dim radical.
        let f3 = PrimeField::new(3).unwrap();
        let f2 = PrimeField::new(2).unwrap();
        let z2 = PermGroupGens::abelian_regular(&[2]);
        let a3 = group_algebra(&z2, f3).unwrap();
        let c3 = Commutative::new(&a3).unwrap();
        assert_eq!(c3.primitive_idempotents().len(), 2);
        assert!(c3.nilradical().is_empty());
        let a2 = group_algebra(&z2, f2).unwrap();
        let c2 = Commutative::new(&a2).unwrap();
        assert_eq!(c2.primitive_idempotents().len(), 1);
        assert_eq!(c2.nilradical().len(), 1);
        // F_2[Z_3] = F_2 x F_4.
        let a = group_algebra(&PermGroupGens::abelian_regular(&[3]), f2).unwrap();
        let es = primitive_idempotents(&a).unwrap();
        assert_eq!(es.len(), 2);
        for e in &es {
            assert_eq!(&(e * e), e);
        }
    }
}
