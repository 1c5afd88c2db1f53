//! Exact sparse row echelon forms over `Q` and `F_p`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{inv_mod, mul_mod, reduce_big};

pub(crate) trait Field {
    type Elem: Clone;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn lift(&self, c: &BigInt) -> Self::Elem;
    fn sub_mul(&self, a: &Self::Elem, k: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

pub(crate) struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn lift(&self, c: &BigInt) -> BigRational {
        BigRational::from_integer(c.clone())
    }
    fn sub_mul(&self, a: &BigRational, k: &BigRational, b: &BigRational) -> BigRational {
        a - k * b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        BigRational::one() / a
    }
}

pub(crate) struct PrimeField(pub u64);

impl Field for PrimeField {
    type Elem = u64;
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn lift(&self, c: &BigInt) -> u64 {
        reduce_big(c, self.0)
    }
    fn sub_mul(&self, a: &u64, k: &u64, b: &u64) -> u64 {
        let kb = mul_mod(*k, *b, self.0);
        (a + self.0 - kb) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0)
    }
    fn inv(&self, a: &u64) -> u64 {
        inv_mod(*a, self.0).expect("nonzero element of a prime field")
    }
}

pub(crate) type SparseRow<E> = BTreeMap<usize, E>;

/// Rows kept in echelon form: each stored row is monic at its smallest column.
pub(crate) struct Echelon<F: Field> {
    field: F,
    rows: HashMap<usize, SparseRow<F::Elem>>,
}

impl<F: Field> Echelon<F> {
    pub(crate) fn new(field: F) -> Self {
        Echelon {
            field,
            rows: HashMap::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` until its leading column is not a pivot (or it vanishes).
    fn reduce(&self, mut v: SparseRow<F::Elem>) -> SparseRow<F::Elem> {
        let mut from = 0usize;
        loop {
            let Some((&col, lead)) = v.range(from..).next() else {
                return v;
            };
            let Some(row) = self.rows.get(&col) else {
                from = col + 1;
                continue;
            };
            let k = lead.clone();
            for (&c, x) in row {
                let cur = v.remove(&c);
                let updated = match cur {
                    Some(a) => self.field.sub_mul(&a, &k, x),
                    None => self.field.sub_mul(&self.field.lift(&BigInt::zero()), &k, x),
                };
                if !self.field.is_zero(&updated) {
                    v.insert(c, updated);
                }
            }
            from = col + 1;
        }
    }

    /// Adds `v` to the row space; returns `true` if the rank grew.
    pub(crate) fn insert(&mut self, v: SparseRow<F::Elem>) -> bool {
        let v = self.reduce(v);
        // after reduction the leading column is never a pivot
        let Some((&pivot, lead)) = v.iter().next() else {
            return false;
        };
        let inv = self.field.inv(lead);
        let row = v
            .into_iter()
            .map(|(c, x)| (c, self.field.mul(&x, &inv)))
            .collect();
        self.rows.insert(pivot, row);
        true
    }

    pub(crate) fn contains(&self, v: SparseRow<F::Elem>) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Rank of a list of integer vectors over `Q`.
pub(crate) fn rational_rank(vectors: &[Vec<BigInt>]) -> usize {
    let mut ech = Echelon::new(Rationals);
    for v in vectors {
        let row: SparseRow<BigRational> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, BigRational::from_integer(x.clone())))
            .collect();
        ech.insert(row);
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(rational_rank(&[ints(&[1, 2]), ints(&[2, 4])]), 1);
        assert_eq!(
            rational_rank(&[ints(&[1, 2, 0]), ints(&[0, 1, 1]), ints(&[1, 3, 1])]),
            2
        );
        assert_eq!(rational_rank(&[ints(&[0, 0])]), 0);
    }

    #[test]
    fn membership_mod_p() {
        let mut e = Echelon::new(PrimeField(3));
        e.insert([(0usize, 1u64), (1, 1)].into_iter().collect());
        e.insert([(1usize, 1u64), (2, 2)].into_iter().collect());
        // (1,1,0) + (0,1,2) = (1,2,2)
        assert!(e.contains([(0usize, 1u64), (1, 2), (2, 2)].into_iter().collect()));
        assert!(!e.contains([(2usize, 1u64)].into_iter().collect()));
    }
}
