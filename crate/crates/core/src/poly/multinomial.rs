//! Factorials and multinomial coefficients modulo a prime.
//!
//! `n! = p^{v(n)} · u(n)` with `v(n) = Σ ⌊n/p^i⌋` (Legendre) and the unit
//! part `u(n) mod p` obtained from the table `0!, ..., (p−1)!` through
//! `u(n) ≡ (−1)^{⌊n/p⌋} · (n mod p)! · u(⌊n/p⌋)` (Wilson).

use num_bigint::BigInt;
use num_traits::One;

use super::PolyError;
use crate::arith::{inv_mod, is_prime, mul_mod};

/// p-adic valuation of an exact multinomial together with its residue
/// (zero whenever the valuation is positive).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultinomialResidue {
    pub valuation: u64,
    pub residue: u64,
}

#[derive(Clone, Debug)]
pub struct FactorialTable {
    p: u64,
    small: Vec<u64>,
}

impl FactorialTable {
    /// Panics if `p` is not prime.
    pub fn new(p: u64) -> Self {
        assert!(is_prime(p), "factorial table modulus {p} is not prime");
        let mut small = Vec::with_capacity(p as usize);
        let mut acc = 1u64;
        small.push(1);
        for k in 1..p {
            acc = mul_mod(acc, k, p);
            small.push(acc);
        }
        FactorialTable { p, small }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// `ord_p(n!)`.
    pub fn valuation(&self, mut n: u64) -> u64 {
        let mut v = 0;
        while n > 0 {
            n /= self.p;
            v += n;
        }
        v
    }

    /// `n! / p^{ord_p(n!)} mod p`.
    pub fn unit(&self, mut n: u64) -> u64 {
        let p = self.p;
        let mut acc = 1u64;
        while n > 0 {
            acc = mul_mod(acc, self.small[(n % p) as usize], p);
            if (n / p) % 2 == 1 {
                acc = (p - acc) % p;
            }
            n /= p;
        }
        acc
    }

    pub fn binomial(&self, n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        self.multinomial_unchecked(n, &[k, n - k]).residue
    }

    /// Dense tables `(v(k), u(k), u(k)^{-1})` for `k = 0..=n_max`, for inner loops.
    pub fn dense(&self, n_max: u64) -> DenseFactorials {
        let p = self.p;
        let mut val = Vec::with_capacity(n_max as usize + 1);
        let mut unit = Vec::with_capacity(n_max as usize + 1);
        let mut inv_unit = Vec::with_capacity(n_max as usize + 1);
        for k in 0..=n_max {
            let u = self.unit(k);
            val.push(self.valuation(k));
            unit.push(u);
            inv_unit.push(inv_mod(u, p).expect("unit part is invertible"));
        }
        DenseFactorials {
            val,
            unit,
            inv_unit,
        }
    }

    fn multinomial_unchecked(&self, n: u64, parts: &[u64]) -> MultinomialResidue {
        let p = self.p;
        let valuation = self.valuation(n) - parts.iter().map(|&b| self.valuation(b)).sum::<u64>();
        if valuation > 0 {
            return MultinomialResidue {
                valuation,
                residue: 0,
            };
        }
        let mut r = self.unit(n);
        for &b in parts {
            r = mul_mod(r, inv_mod(self.unit(b), p).unwrap(), p);
        }
        MultinomialResidue {
            valuation,
            residue: r,
        }
    }
}

/// Precomputed factorial data for `0..=n_max` modulo a fixed prime.
#[derive(Clone, Debug)]
pub struct DenseFactorials {
    pub val: Vec<u64>,
    pub unit: Vec<u64>,
    pub inv_unit: Vec<u64>,
}

/// `n! / (k_1! ⋯ k_r!)` modulo `p` together with its p-adic valuation.
pub fn multinomial_mod_p(n: u64, parts: &[u64], p: u64) -> Result<MultinomialResidue, PolyError> {
    if !is_prime(p) {
        return Err(PolyError::NotPrime(p));
    }
    let sum: u64 = parts.iter().sum();
    if sum != n {
        return Err(PolyError::PartsSum { n, sum });
    }
    Ok(FactorialTable::new(p).multinomial_unchecked(n, parts))
}

/// Exact multinomial coefficient.
pub fn multinomial_exact(n: u64, parts: &[u64]) -> Result<BigInt, PolyError> {
    let sum: u64 = parts.iter().sum();
    if sum != n {
        return Err(PolyError::PartsSum { n, sum });
    }
    let fact = |k: u64| (1..=k).fold(BigInt::one(), |acc, i| acc * i);
    let den = parts.iter().fold(BigInt::one(), |acc, &b| acc * fact(b));
    Ok(fact(n) / den)
}
