use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::structures::{check_permutation, GROUP_BUDGET};

/// A permutation group on `0..degree` given by generators. Permutations compose as
/// `(g h)(x) = g(h(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroupGens {
    degree: usize,
    generators: Vec<Vec<usize>>,
    abelian: bool,
}

pub fn compose(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&x| g[x]).collect()
}

pub fn invert(g: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; g.len()];
    for (x, &y) in g.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

impl PermGroupGens {
    /// With `abelian` set, pairwise commutation of the generators is verified.
    pub fn new(degree: usize, generators: Vec<Vec<usize>>, abelian: bool) -> Result<Self> {
        for g in &generators {
            check_permutation(g, degree)?;
        }
        if abelian {
            for (i, g) in generators.iter().enumerate() {
                for h in &generators[i + 1..] {
                    if compose(g, h) != compose(h, g) {
                        return Err(Error::NotAbelian);
                    }
                }
            }
        }
        Ok(PermGroupGens {
            degree,
            generators,
            abelian,
        })
    }

    /// Regular action of `Z_{n_1} x ... x Z_{n_r}` on itself, elements in mixed radix
    /// with the last factor fastest.
    pub fn abelian_regular(orders: &[usize]) -> Self {
        let degree: usize = orders.iter().product();
        let mut generators = Vec::new();
        let mut stride = degree;
        for &n in orders {
            stride /= n;
            if n == 1 {
                continue;
            }
            let g = (0..degree)
                .map(|x| {
                    let digit = (x / stride) % n;
                    x - digit * stride + ((digit + 1) % n) * stride
                })
                .collect();
            generators.push(g);
        }
        PermGroupGens::new(degree, generators, true).expect("commuting shifts")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    /// All group elements, identity first, in breadth-first order over the generators.
    pub fn elements(&self) -> Result<Vec<Vec<usize>>> {
        let identity: Vec<usize> = (0..self.degree).collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(identity.clone(), 0);
        let mut elements = vec![identity];
        let mut head = 0;
        while head < elements.len() {
            for g in &self.generators {
                let next = compose(g, &elements[head]);
                if !index.contains_key(&next) {
                    if elements.len() as u128 >= GROUP_BUDGET {
                        return Err(Error::BudgetExceeded {
                            what: "enumerating a permutation group".into(),
                            required: GROUP_BUDGET + 1,
                            budget: GROUP_BUDGET,
                        });
                    }
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
            head += 1;
        }
        Ok(elements)
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_regular_orders() {
        assert_eq!(PermGroupGens::abelian_regular(&[2, 2]).order().unwrap(), 4);
        assert_eq!(PermGroupGens::abelian_regular(&[3, 9]).order().unwrap(), 27);
        assert_eq!(PermGroupGens::abelian_regular(&[1]).order().unwrap(), 1);
    }

    #[test]
    fn abelian_flag_verified() {
        let a = vec![1, 0, 2];
        let b = vec![0, 2, 1];
        assert_eq!(
            PermGroupGens::new(3, vec![a.clone(), b.clone()], true),
            Err(Error::NotAbelian)
        );
        assert_eq!(PermGroupGens::new(3, vec![a, b], false).unwrap().order().unwrap(), 6);
    }

    #[test]
    fn compose_and_invert() {
        let g = vec![1, 2, 0];
        assert_eq!(compose(&g, &invert(&g)), vec![0, 1, 2]);
        assert_eq!(compose(&g, &g), vec![2, 0, 1]);
    }
}
