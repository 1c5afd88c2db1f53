//! Truncated one-variable power series over `Q` and over `F_p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::SeriesError;
use crate::arith::reduce_ratio;

/// `c_0 + c_1 τ + ... + c_D τ^D` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries1 {
    coeffs: Vec<BigRational>,
}

impl PowerSeries1 {
    /// Series with the given coefficients `c_0, ..., c_D`.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least c_0");
        PowerSeries1 { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        PowerSeries1::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero(trunc: usize) -> Self {
        PowerSeries1 {
            coeffs: vec![BigRational::zero(); trunc + 1],
        }
    }

    /// `τ`, the logarithm of the additive law.
    pub fn identity(trunc: usize) -> Self {
        let mut s = PowerSeries1::zero(trunc);
        if trunc >= 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    /// `log(1+τ) = Σ (−1)^{n+1} τ^n / n`, the logarithm of the multiplicative law.
    pub fn log_one_plus(trunc: usize) -> Self {
        let mut s = PowerSeries1::zero(trunc);
        for n in 1..=trunc {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            s.coeffs[n] = BigRational::new(BigInt::from(sign), BigInt::from(n));
        }
        s
    }

    /// `Σ_k τ^{p^{hk}} / p^k`, a logarithm of height `h` at `p`.
    pub fn honda(p: u64, h: u32, trunc: usize) -> Self {
        let mut s = PowerSeries1::zero(trunc);
        let mut k = 0u32;
        while let Some(deg) = p.checked_pow(h * k).filter(|&deg| deg as usize <= trunc) {
            s.coeffs[deg as usize] = BigRational::new(BigInt::one(), BigInt::from(p).pow(k));
            k += 1;
        }
        s
    }

    /// `l(τ) = Σ_{m≥1} (b_{m−1}/m) τ^m` from `b = [b_0, b_1, ...]`, truncated at `trunc`.
    pub fn from_log_coefficients(b: &[BigInt], trunc: usize) -> Self {
        let mut s = PowerSeries1::zero(trunc);
        for (k, bk) in b.iter().enumerate().take(trunc) {
            let m = k + 1;
            s.coeffs[m] = BigRational::new(bk.clone(), BigInt::from(m));
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        PowerSeries1::new((0..=trunc).map(|k| self.coeff(k)).collect())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        PowerSeries1::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.trunc().min(other.trunc());
        PowerSeries1::new(
            (0..=d)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        )
    }

    /// Cauchy product truncated at the smaller precision.
    pub fn mul(&self, other: &Self) -> Self {
        let d = self.trunc().min(other.trunc());
        let mut out = vec![BigRational::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(d + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(d + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        PowerSeries1::new(out)
    }

    /// `self(inner(τ))`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Self {
        assert!(inner.coeffs[0].is_zero(), "inner series must vanish at 0");
        let d = self.trunc().min(inner.trunc());
        let inner = inner.truncate(d);
        let mut acc = PowerSeries1::zero(d);
        for k in (0..=d).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += &self.coeffs[k];
        }
        acc
    }

    /// Compositional inverse modulo `τ^{D+1}`.
    ///
    /// Writing `g = l^{-1}`, `g_1 = 1/c_1` and for `n ≥ 2`
    /// `g_n = −(1/c_1) Σ_{k=2}^{n} c_k [τ^n] g^k`, where `[τ^n] g^k` only
    /// involves `g_1, ..., g_{n−1}`.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let d = self.trunc();
        if d == 0 {
            return Ok(PowerSeries1::zero(0));
        }
        let c1 = &self.coeffs[1];
        if c1.is_zero() {
            return Err(SeriesError::NonUnitLinear);
        }
        let inv_c1 = BigRational::one() / c1;
        // pw[k][n] = [τ^n] g^k
        let mut pw = vec![vec![BigRational::zero(); d + 1]; d + 1];
        let mut g = vec![BigRational::zero(); d + 1];
        g[1] = inv_c1.clone();
        pw[1][1] = g[1].clone();
        for n in 2..=d {
            let mut acc = BigRational::zero();
            for k in 2..=n {
                let mut v = BigRational::zero();
                for i in 1..=(n - k + 1) {
                    if !g[i].is_zero() && !pw[k - 1][n - i].is_zero() {
                        v += &g[i] * &pw[k - 1][n - i];
                    }
                }
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &v;
                }
                pw[k][n] = v;
            }
            g[n] = -(&inv_c1 * acc);
            pw[1][n] = g[n].clone();
        }
        Ok(PowerSeries1::new(g))
    }

    /// Reduction modulo `p`; every denominator must be prime to `p`.
    pub fn reduce_mod(&self, p: u64) -> Result<ReducedSeries, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                reduce_ratio(c.numer(), c.denom(), p)
                    .ok_or(SeriesError::NotPIntegral { p, degree: k })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ReducedSeries { p, coeffs })
    }
}

/// A truncated series with coefficients in `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSeries {
    p: u64,
    coeffs: Vec<u64>,
}

impl ReducedSeries {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        ReducedSeries {
            p,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Index and value of the lowest nonzero coefficient.
    pub fn lowest_term(&self) -> Option<(usize, u64)> {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(_, &c)| c != 0)
            .map(|(k, &c)| (k, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn reversion_of_identity() {
        let l = PowerSeries1::identity(6);
        assert_eq!(l.reversion().unwrap(), l);
    }

    #[test]
    fn reversion_catalan_pattern() {
        let l = PowerSeries1::from_integers(&[0, 1, 1, 0, 0]);
        assert_eq!(
            l.reversion().unwrap(),
            PowerSeries1::from_integers(&[0, 1, -1, 2, -5])
        );
    }

    #[test]
    fn reversion_of_log_is_exp_minus_one() {
        let inv = PowerSeries1::log_one_plus(8).reversion().unwrap();
        let mut fact = BigInt::one();
        for n in 1..=8i64 {
            fact *= n;
            assert_eq!(
                inv.coeff(n as usize),
                BigRational::new(BigInt::one(), fact.clone())
            );
        }
    }

    #[test]
    fn reversion_errors() {
        assert_eq!(
            PowerSeries1::from_integers(&[0, 0, 1]).reversion(),
            Err(SeriesError::NonUnitLinear)
        );
        assert_eq!(
            PowerSeries1::from_integers(&[1, 1]).reversion(),
            Err(SeriesError::NonzeroConstant)
        );
        let l = PowerSeries1::new(vec![q(0, 1), q(2, 1), q(1, 1)]);
        // (τ/2) − (1/8)τ^2
        assert_eq!(
            l.reversion().unwrap(),
            PowerSeries1::new(vec![q(0, 1), q(1, 2), q(-1, 8)])
        );
    }

    #[test]
    fn honda_log_terms() {
        let l = PowerSeries1::honda(2, 2, 20);
        assert_eq!(l.coeff(1), q(1, 1));
        assert_eq!(l.coeff(4), q(1, 2));
        assert_eq!(l.coeff(16), q(1, 4));
        assert_eq!(l.coeff(2), q(0, 1));
    }

    #[test]
    fn reduction_checks_integrality() {
        let l = PowerSeries1::log_one_plus(4);
        assert_eq!(l.reduce_mod(5).unwrap().coeffs(), &[0, 1, 2, 2, 1]);
        assert_eq!(
            l.reduce_mod(3),
            Err(SeriesError::NotPIntegral { p: 3, degree: 3 })
        );
    }
}
