use std::fmt;

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps `a + b` inside `u32` and `a * b` inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

/// The prime field F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    q: u32,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q: q as u32 })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.q) {
            return None;
        }
        Some(self.pow(a, self.q as u64 - 2))
    }

    /// Reduces an arbitrary signed integer into `[0, q)`.
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    pub fn from_u64(&self, v: u64) -> u32 {
        (v % self.q as u64) as u32
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_large_moduli() {
        assert_eq!(PrimeField::new(4), Err(Error::NotPrime(4)));
        assert_eq!(PrimeField::new(1), Err(Error::NotPrime(1)));
        assert!(matches!(
            PrimeField::new(1 << 31),
            Err(Error::ModulusTooLarge(_))
        ));
        assert!(PrimeField::new(2_147_483_647).is_ok());
    }

    #[test]
    fn inverse_round_trips() {
        for q in [2u64, 3, 5, 7, 101] {
            let f = PrimeField::new(q).unwrap();
            for a in 1..f.modulus() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            assert_eq!(f.inv(0), None);
        }
    }

    #[test]
    fn large_modulus_products_do_not_overflow() {
        let f = PrimeField::new(2_147_483_647).unwrap();
        let a = f.modulus() - 1;
        assert_eq!(f.mul(a, a), 1);
        assert_eq!(f.add(a, a), a - 1);
    }
}
