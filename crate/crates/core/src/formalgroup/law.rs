//! Multivariate truncated series and two-variable group laws.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{PowerSeries1, SeriesError};

/// A series in `n` variables modulo all monomials of total degree `> trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    n_vars: usize,
    trunc: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MultiSeries {
    pub fn zero(n_vars: usize, trunc: usize) -> Self {
        MultiSeries {
            n_vars,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, trunc: usize, c: BigRational) -> Self {
        let mut s = MultiSeries::zero(n_vars, trunc);
        s.add_term(vec![0; n_vars], c);
        s
    }

    /// The coordinate series `x_i`.
    pub fn variable(n_vars: usize, trunc: usize, i: usize) -> Self {
        assert!(i < n_vars);
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut s = MultiSeries::zero(n_vars, trunc);
        s.add_term(e, BigRational::one());
        s
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        debug_assert_eq!(exps.len(), self.n_vars);
        if c.is_zero() || exps.iter().map(|&e| e as usize).sum::<usize>() > self.trunc {
            return;
        }
        let sum = match self.terms.remove(&exps) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(exps, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = MultiSeries::zero(self.n_vars, self.trunc.min(other.trunc));
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = MultiSeries::zero(self.n_vars, self.trunc);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = MultiSeries::zero(self.n_vars, self.trunc.min(other.trunc));
        for (ea, a) in &self.terms {
            let da: usize = ea.iter().map(|&e| e as usize).sum();
            for (eb, b) in &other.terms {
                let db: usize = eb.iter().map(|&e| e as usize).sum();
                if da + db > out.trunc {
                    continue;
                }
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, a * b);
            }
        }
        out
    }

    /// `l(s)` for a one-variable series `l`; `s` must have no constant term.
    pub fn substitute_into(l: &PowerSeries1, s: &Self) -> Self {
        assert!(
            s.coeff(&vec![0; s.n_vars]).is_zero(),
            "substituted series must vanish at 0"
        );
        let d = l.trunc().min(s.trunc);
        let mut acc = MultiSeries::zero(s.n_vars, d);
        for k in (0..=d).rev() {
            acc = acc.mul(s);
            acc.add_term(vec![0; s.n_vars], l.coeff(k));
        }
        acc
    }
}

/// A two-variable formal group law `F(x, y)` truncated at total degree `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLaw2 {
    series: MultiSeries,
}

impl GroupLaw2 {
    pub fn trunc(&self) -> usize {
        self.series.trunc
    }

    pub fn series(&self) -> &MultiSeries {
        &self.series
    }

    /// Coefficient of `x^i y^j`.
    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.series.coeff(&[i, j])
    }

    /// `F(u, v)` for series `u, v` in a common ring without constant terms.
    pub fn eval(&self, u: &MultiSeries, v: &MultiSeries) -> MultiSeries {
        assert_eq!(u.n_vars, v.n_vars);
        let n = u.n_vars;
        let trunc = self.trunc().min(u.trunc).min(v.trunc);
        let max = self.trunc();
        let mut u_pows = vec![MultiSeries::constant(n, trunc, BigRational::one())];
        let mut v_pows = vec![MultiSeries::constant(n, trunc, BigRational::one())];
        for k in 1..=max {
            u_pows.push(u_pows[k - 1].mul(u));
            v_pows.push(v_pows[k - 1].mul(v));
        }
        let mut out = MultiSeries::zero(n, trunc);
        for (e, c) in &self.series.terms {
            let term = u_pows[e[0] as usize].mul(&v_pows[e[1] as usize]).scale(c);
            out = out.add(&term);
        }
        out
    }
}

/// `F(x, y) = l^{-1}(l(x) + l(y))` truncated at total degree `trunc`.
pub fn group_law_from_log(l: &PowerSeries1, trunc: usize) -> Result<GroupLaw2, SeriesError> {
    let l = l.truncate(trunc);
    if l.coeff(1) != BigRational::from_integer(BigInt::one()) {
        return Err(SeriesError::NotNormalized);
    }
    let inv = l.reversion()?;
    let x = MultiSeries::variable(2, trunc, 0);
    let y = MultiSeries::variable(2, trunc, 1);
    let sum = MultiSeries::substitute_into(&l, &x).add(&MultiSeries::substitute_into(&l, &y));
    Ok(GroupLaw2 {
        series: MultiSeries::substitute_into(&inv, &sum),
    })
}
