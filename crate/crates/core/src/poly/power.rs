//! Single coefficients of `f^n` without expanding the power.
//!
//! A monomial of `f^n` comes from a composition `(β_1, ..., β_T)` of `n`
//! over the `T` terms of `f`, contributing
//! `n!/(β_1!⋯β_T!) · ∏ c_t^{β_t}` at exponent `Σ β_t E_t`. Terms are
//! consumed one at a time while tracking the residual exponent demand; the
//! multinomial factors as a product of binomials `C(remaining, β_t)`, so the
//! weight is well-defined in any coefficient ring. Partial choices that
//! overshoot the target in any coordinate are abandoned, and distinct
//! partial compositions that leave the same residual demand are merged.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use super::{ExpVec, FactorialTable, SparsePoly};
use crate::arith::{mul_mod, reduce_big};

/// Coefficient ring for [`coeff_in_power_in`].
pub trait CoeffRing {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn lift(&self, c: &BigInt) -> Self::Elem;
    fn binomial(&self, n: u64, k: u64) -> Self::Elem;
}

/// Exact integers.
pub struct Integers;

impl CoeffRing for Integers {
    type Elem = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn lift(&self, c: &BigInt) -> BigInt {
        c.clone()
    }
    fn binomial(&self, n: u64, k: u64) -> BigInt {
        binomial(BigInt::from(n), BigInt::from(k))
    }
}

/// Integers modulo a prime.
pub struct ModPrime {
    table: FactorialTable,
}

impl ModPrime {
    pub fn new(p: u64) -> Self {
        ModPrime {
            table: FactorialTable::new(p),
        }
    }

    pub fn prime(&self) -> u64 {
        self.table.prime()
    }
}

impl CoeffRing for ModPrime {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.prime()
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.prime()
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.prime())
    }
    fn lift(&self, c: &BigInt) -> u64 {
        reduce_big(c, self.prime())
    }
    fn binomial(&self, n: u64, k: u64) -> u64 {
        self.table.binomial(n, k)
    }
}

/// Coefficient of `x^target` in `f^n` over `ring`.
pub fn coeff_in_power_in<R: CoeffRing>(
    ring: &R,
    f: &SparsePoly,
    n: u64,
    target: &ExpVec,
) -> R::Elem {
    assert_eq!(target.len(), f.n_vars(), "target length mismatch");
    let terms: Vec<(&ExpVec, R::Elem)> = f
        .terms()
        .map(|(e, c)| (e, ring.lift(c)))
        .filter(|(_, c)| !ring.is_zero(c))
        .collect();
    if terms.is_empty() {
        return if n == 0 && target.is_zero() {
            ring.one()
        } else {
            ring.zero()
        };
    }

    let pow_table = |c: &R::Elem| {
        let mut v = Vec::with_capacity(n as usize + 1);
        let mut acc = ring.one();
        for _ in 0..=n {
            v.push(acc.clone());
            acc = ring.mul(&acc, c);
        }
        v
    };

    let mut states: HashMap<(u64, ExpVec), R::Elem> = HashMap::new();
    states.insert((n, target.clone()), ring.one());

    let (last, init) = terms.split_last().unwrap();
    for (e, c) in init {
        let powers = pow_table(c);
        let mut next: HashMap<(u64, ExpVec), R::Elem> = HashMap::new();
        for ((remaining, residual), weight) in states {
            let mut demand = residual.clone();
            for beta in 0..=remaining {
                if beta > 0 {
                    match demand.checked_sub(e) {
                        Some(d) => demand = d,
                        None => break,
                    }
                }
                let b = ring.binomial(remaining, beta);
                if ring.is_zero(&b) {
                    continue;
                }
                let w = ring.mul(&ring.mul(&weight, &b), &powers[beta as usize]);
                if ring.is_zero(&w) {
                    continue;
                }
                let slot = next
                    .entry((remaining - beta, demand.clone()))
                    .or_insert_with(|| ring.zero());
                *slot = ring.add(slot, &w);
            }
        }
        next.retain(|_, w| !ring.is_zero(w));
        states = next;
        if states.is_empty() {
            return ring.zero();
        }
    }

    let (e, c) = last;
    let powers = pow_table(c);
    let mut total = ring.zero();
    for ((remaining, residual), weight) in states {
        if residual == e.scaled(remaining as u32) {
            total = ring.add(&total, &ring.mul(&weight, &powers[remaining as usize]));
        }
    }
    total
}

/// Coefficient of `x^target` in `f^n`, reduced modulo the prime `p`.
pub fn coeff_in_power(f: &SparsePoly, n: u64, target: &ExpVec, p: u64) -> u64 {
    coeff_in_power_in(&ModPrime::new(p), f, n, target)
}

/// Exact coefficient of `x^target` in `f^n`.
pub fn coeff_in_power_exact(f: &SparsePoly, n: u64, target: &ExpVec) -> BigInt {
    coeff_in_power_in(&Integers, f, n, target)
}
