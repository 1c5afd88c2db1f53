//! Sparse multivariate polynomials over the integers.
//!
//! Terms live in a `BTreeMap` keyed by exponent vector, ordered graded
//! lexicographically (total degree first, then lex with `x_0 > x_1 > ...`).
//! Iteration via [`SparsePoly::terms`] yields the canonical order, largest
//! monomial first. Zero coefficients are never stored.

mod multinomial;
mod parse;
mod power;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use multinomial::{
    multinomial_exact, multinomial_mod_p, DenseFactorials, FactorialTable, MultinomialResidue,
};
pub use parse::parse_poly;
pub use power::{
    coeff_in_power, coeff_in_power_exact, coeff_in_power_in, CoeffRing, Integers, ModPrime,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("empty polynomial text")]
    EmptyInput,
    #[error("polynomial is not quasi-homogeneous: `{first}` has weighted degree {first_degree} but `{second}` has {second_degree}")]
    NotQuasiHomogeneous {
        first: String,
        first_degree: u64,
        second: String,
        second_degree: u64,
    },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weights must be positive integers")]
    NonPositiveWeight,
    #[error("weighted degree must be positive")]
    NonPositiveDegree,
    #[error("multinomial parts sum to {sum}, expected {n}")]
    PartsSum { n: u64, sum: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
}

/// Exponent vector `(i_0, ..., i_N)` of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpVec(Vec<u32>);

impl ExpVec {
    pub fn new(exps: Vec<u32>) -> Self {
        ExpVec(exps)
    }

    pub fn zeros(n: usize) -> Self {
        ExpVec(vec![0; n])
    }

    /// The monomial `(x_0 ⋯ x_N)^k`.
    pub fn diagonal(n: usize, k: u32) -> Self {
        ExpVec(vec![k; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn weighted_degree(&self, alpha: &[u64]) -> u64 {
        self.0.iter().zip(alpha).map(|(&e, &a)| e as u64 * a).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Componentwise `self - other`, or `None` if some coordinate would go negative.
    pub fn checked_sub(&self, other: &ExpVec) -> Option<ExpVec> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(ExpVec)
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, k: u32) -> ExpVec {
        ExpVec(self.0.iter().map(|&e| e * k).collect())
    }
}

impl From<Vec<u32>> for ExpVec {
    fn from(v: Vec<u32>) -> Self {
        ExpVec(v)
    }
}

impl std::ops::Index<usize> for ExpVec {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl Ord for ExpVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExpVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    vars: Vec<String>,
    terms: BTreeMap<ExpVec, BigInt>,
}

impl SparsePoly {
    pub fn zero(vars: Vec<String>) -> Self {
        SparsePoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial, combining repeated monomials and dropping zeros.
    pub fn from_terms(
        vars: Vec<String>,
        terms: impl IntoIterator<Item = (ExpVec, BigInt)>,
    ) -> Self {
        let mut p = SparsePoly::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Default variable names `x0, x1, ...`.
    pub fn default_vars(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    /// `x_0^d + ... + x_N^d` in `n_vars` variables.
    pub fn fermat(n_vars: usize, d: u32) -> Self {
        let terms = (0..n_vars).map(|i| {
            let mut e = vec![0; n_vars];
            e[i] = d;
            (ExpVec(e), BigInt::one())
        });
        SparsePoly::from_terms(Self::default_vars(n_vars), terms)
    }

    pub fn add_term(&mut self, e: ExpVec, c: BigInt) {
        assert_eq!(e.len(), self.vars.len(), "exponent vector length mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order, largest monomial first.
    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, e: &ExpVec) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn has_constant_term(&self) -> bool {
        self.terms.keys().any(ExpVec::is_zero)
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        out
    }

    /// Multiplies by the monomial `x^e` with coefficient `c`.
    pub fn mul_monomial(&self, e: &ExpVec, c: &BigInt) -> SparsePoly {
        SparsePoly::from_terms(
            self.vars.clone(),
            self.terms.iter().map(|(t, k)| (t.add(e), k * c)),
        )
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> SparsePoly {
        let terms = self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
            let mut v = e.0.clone();
            let k = v[i];
            v[i] -= 1;
            (ExpVec(v), c * BigInt::from(k))
        });
        SparsePoly::from_terms(self.vars.clone(), terms)
    }

    /// Coefficients reduced into `[0, p)`; vanishing terms dropped.
    pub fn reduce_mod(&self, p: u64) -> SparsePoly {
        let m = BigInt::from(p);
        let terms = self.terms.iter().map(|(e, c)| {
            let r = ((c % &m) + &m) % &m;
            (e.clone(), r)
        });
        SparsePoly::from_terms(self.vars.clone(), terms)
    }

    /// `Some(d)` when this is exactly `x_0^d + ... + x_N^d` with `d ≥ 1`.
    pub fn fermat_degree(&self) -> Option<u32> {
        let n = self.n_vars();
        if self.num_terms() != n || n == 0 {
            return None;
        }
        let d = self.terms.keys().next()?.total_degree() as u32;
        if d == 0 {
            return None;
        }
        let mut seen = vec![false; n];
        for (e, c) in &self.terms {
            if !c.is_one() {
                return None;
            }
            let nz: Vec<usize> = (0..n).filter(|&i| e[i] != 0).collect();
            if nz.len() != 1 || e[nz[0]] != d || seen[nz[0]] {
                return None;
            }
            seen[nz[0]] = true;
        }
        Some(d)
    }

    fn render_monomial(&self, e: &ExpVec) -> String {
        let parts: Vec<String> = self
            .vars
            .iter()
            .zip(e.as_slice())
            .filter(|(_, &k)| k > 0)
            .map(|(v, &k)| {
                if k == 1 {
                    v.clone()
                } else {
                    format!("{v}^{k}")
                }
            })
            .collect();
        parts.join("*")
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms().enumerate() {
            let mono = self.render_monomial(e);
            let abs = c.abs();
            if idx == 0 {
                if mono.is_empty() {
                    write!(f, "{c}")?;
                } else if c.is_one() {
                    write!(f, "{mono}")?;
                } else {
                    write!(f, "{c}*{mono}")?;
                }
                continue;
            }
            write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

/// Weights `α_i = deg(x_i)`, their sum `w`, and a weighted degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    alpha: Vec<u64>,
    w: u64,
    d: u64,
}

impl WeightSystem {
    pub fn new(alpha: Vec<u64>, d: u64) -> Result<Self, PolyError> {
        if alpha.is_empty() || alpha.contains(&0) {
            return Err(PolyError::NonPositiveWeight);
        }
        if d == 0 {
            return Err(PolyError::NonPositiveDegree);
        }
        let w = alpha.iter().sum();
        Ok(WeightSystem { alpha, w, d })
    }

    /// Weight system whose degree is the common weighted degree of `f`.
    pub fn for_poly(f: &SparsePoly, alpha: Vec<u64>) -> Result<Self, PolyError> {
        let d = weighted_degree_check(f, &alpha)?;
        WeightSystem::new(alpha, d)
    }

    /// Unit weights in `n` variables.
    pub fn standard(n: usize, d: u64) -> Result<Self, PolyError> {
        WeightSystem::new(vec![1; n], d)
    }

    pub fn alpha(&self) -> &[u64] {
        &self.alpha
    }

    pub fn w(&self) -> u64 {
        self.w
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n_vars(&self) -> usize {
        self.alpha.len()
    }

    /// `N` in `x_0, ..., x_N`.
    pub fn top_index(&self) -> usize {
        self.alpha.len() - 1
    }

    /// Smallest prime size `w(N−2)+1` above which fpt has the form `1 − a/p`.
    pub fn theorem_prime_bound(&self) -> u64 {
        let n = self.top_index() as i64;
        let bound = self.w as i64 * (n - 2) + 1;
        bound.max(0) as u64
    }
}

/// Common weighted degree of every term of `f`.
pub fn weighted_degree_check(f: &SparsePoly, alpha: &[u64]) -> Result<u64, PolyError> {
    if alpha.len() != f.n_vars() {
        return Err(PolyError::WeightCount {
            expected: f.n_vars(),
            got: alpha.len(),
        });
    }
    if alpha.contains(&0) {
        return Err(PolyError::NonPositiveWeight);
    }
    let mut terms = f.terms();
    let (first, _) = terms.next().ok_or(PolyError::ZeroPolynomial)?;
    let deg = first.weighted_degree(alpha);
    for (e, _) in terms {
        let other = e.weighted_degree(alpha);
        if other != deg {
            return Err(PolyError::NotQuasiHomogeneous {
                first: f.render_monomial(first),
                first_degree: deg,
                second: f.render_monomial(e),
                second_degree: other,
            });
        }
    }
    Ok(deg)
}

/// gcd of all coefficients, positive.
pub fn content(f: &SparsePoly) -> Result<BigInt, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(crate::arith::gcd_all(f.terms.values()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SparsePoly {
        parse_poly(s, None).unwrap()
    }

    #[test]
    fn weighted_degrees_of_examples() {
        assert_eq!(
            weighted_degree_check(&p("x^2+y^5+z^5+w^10"), &[5, 2, 2, 1]),
            Ok(10)
        );
        assert_eq!(
            weighted_degree_check(&p("x^8*y + y^6*z + z^3 + x*w^2"), &[1, 1, 3, 4]),
            Ok(9)
        );
        let err = weighted_degree_check(&p("x+y^2"), &[1, 1]).unwrap_err();
        assert!(matches!(
            err,
            PolyError::NotQuasiHomogeneous {
                first_degree: 2,
                second_degree: 1,
                ..
            }
        ));
    }

    #[test]
    fn weight_count_mismatch() {
        assert!(matches!(
            weighted_degree_check(&p("x+y"), &[1]),
            Err(PolyError::WeightCount {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn contents() {
        assert_eq!(content(&p("x^2+y^5")).unwrap(), BigInt::from(1));
        assert_eq!(content(&p("2x^2+4y")).unwrap(), BigInt::from(2));
        assert_eq!(content(&p("6x-9y+15z")).unwrap(), BigInt::from(3));
        assert_eq!(content(&p("x-x")), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn canonical_rendering() {
        assert_eq!(p("x^2+y^5+z^5+w^10").to_string(), "w^10 + y^5 + z^5 + x^2");
        assert_eq!(
            p("x^8*y + y^6*z + z^3 + x*w^2").to_string(),
            "x^8*y + y^6*z + x*w^2 + z^3"
        );
        assert_eq!(p("-1*x + 3").to_string(), "-1*x + 3");
        assert_eq!(p("x - x").to_string(), "0");
    }

    #[test]
    fn derivatives() {
        let f = p("x^2+y^5");
        assert_eq!(
            f.derivative(0),
            parse_poly("2x", Some(&["x".into(), "y".into()])).unwrap()
        );
        assert_eq!(
            f.derivative(1),
            parse_poly("5y^4", Some(&["x".into(), "y".into()])).unwrap()
        );
        let g = parse_poly("x^8*y+x*w^2", Some(&["x", "y", "z", "w"].map(String::from))).unwrap();
        let gx = parse_poly("8x^7*y+w^2", Some(&["x", "y", "z", "w"].map(String::from))).unwrap();
        assert_eq!(g.derivative(0), gx);
        let c = parse_poly("7", Some(&["x".into()])).unwrap();
        assert!(c.derivative(0).is_zero());
    }

    #[test]
    fn fermat_detection() {
        assert_eq!(p("x^4+y^4+z^4").fermat_degree(), Some(4));
        assert_eq!(SparsePoly::fermat(5, 7).fermat_degree(), Some(7));
        assert_eq!(p("x^4+y^4+2z^4").fermat_degree(), None);
        assert_eq!(p("x^4+y^3*z").fermat_degree(), None);
    }

    #[test]
    fn theorem_bounds() {
        let ws = WeightSystem::new(vec![5, 2, 2, 1], 10).unwrap();
        assert_eq!(ws.theorem_prime_bound(), 11);
        let ws = WeightSystem::new(vec![1, 1, 3, 4], 9).unwrap();
        assert_eq!(ws.theorem_prime_bound(), 10);
        assert!(WeightSystem::new(vec![1, 0], 2).is_err());
    }
}
