//! Logarithm coefficients of the Artin–Mazur formal group of a hypersurface.
//!
//! For `f` of weighted degree `d`, `J` is the set of exponent vectors with
//! all entries `≥ 1` and weighted degree `d`. The logarithm has coefficients
//! `b_{m−1,i,j}` = coefficient of `x^{m·j − i}` in `f^{m−1}`, for `i, j ∈ J`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{is_prime, reduce_big};
use crate::formalgroup::PowerSeries1;
use crate::poly::{
    coeff_in_power, coeff_in_power_exact, content, multinomial_mod_p, ExpVec, MultinomialResidue,
    PolyError, SparsePoly, WeightSystem,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StienstraError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("J is empty: no exponent vector with entries ≥ 1 has weighted degree {d}")]
    EmptyJ { d: u64 },
    #[error("the height-one test needs d = w (got d = {d}, w = {w})")]
    NotCalabiYau { d: u64, w: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("p = {0} divides the content of f")]
    ContentDivisible(u64),
    #[error("f has weighted degree {found}, but the weight system declares {declared}")]
    DegreeMismatch { found: u64, declared: u64 },
    #[error("m must be at least 1")]
    ZeroM,
    #[error(
        "Fermat diagonality needs d = N + k with k ≥ 2 and N ≥ 2(k − 1) (got N = {n}, d = {d})"
    )]
    FermatRange { n: u64, d: u64 },
    #[error("exponent vector {i:?} does not sum to d = {d}")]
    IndexSum { i: Vec<u32>, d: u64 },
}

/// An element of `J`: entries `≥ 1`, weighted degree `d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JIndex(ExpVec);

impl JIndex {
    pub fn exps(&self) -> &ExpVec {
        &self.0
    }

    pub fn as_slice(&self) -> &[u32] {
        self.0.as_slice()
    }
}

/// `J` in graded-lex order, largest first.
pub fn j_set(ws: &WeightSystem) -> Result<Vec<JIndex>, StienstraError> {
    let alpha = ws.alpha();
    let d = ws.d();
    let mut out = Vec::new();
    let mut cur = vec![0u32; alpha.len()];
    fill_j(alpha, 0, d, &mut cur, &mut out);
    if out.is_empty() {
        return Err(StienstraError::EmptyJ { d });
    }
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

fn fill_j(alpha: &[u64], k: usize, remaining: u64, cur: &mut Vec<u32>, out: &mut Vec<JIndex>) {
    // every later entry is at least 1
    let tail: u64 = alpha[k + 1..].iter().sum();
    if k + 1 == alpha.len() {
        if remaining >= alpha[k] && remaining.is_multiple_of(alpha[k]) {
            cur[k] = (remaining / alpha[k]) as u32;
            out.push(JIndex(ExpVec::new(cur.clone())));
        }
        return;
    }
    let mut i = 1u64;
    while alpha[k] * i + tail <= remaining {
        cur[k] = i as u32;
        fill_j(alpha, k + 1, remaining - alpha[k] * i, cur, out);
        i += 1;
    }
}

/// A logarithm coefficient, exact or reduced modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogCoeff {
    Exact(BigInt),
    Residue { p: u64, value: u64 },
}

impl LogCoeff {
    pub fn is_zero(&self) -> bool {
        match self {
            LogCoeff::Exact(x) => x.is_zero(),
            LogCoeff::Residue { value, .. } => *value == 0,
        }
    }
}

impl std::fmt::Display for LogCoeff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LogCoeff::Exact(x) => write!(f, "{x}"),
            LogCoeff::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Target exponent `m·j − i`, or `None` if some coordinate is negative.
fn log_target(m: u64, i: &JIndex, j: &JIndex) -> Option<ExpVec> {
    let v = i
        .as_slice()
        .iter()
        .zip(j.as_slice())
        .map(|(&a, &b)| {
            let t = m * b as u64;
            (t >= a as u64).then(|| (t - a as u64) as u32)
        })
        .collect::<Option<Vec<_>>>()?;
    Some(ExpVec::new(v))
}

/// `b_{m−1,i,j}`; zero when `m·j − i` has a negative coordinate.
pub fn log_coeff(
    f: &SparsePoly,
    m: u64,
    i: &JIndex,
    j: &JIndex,
    p: Option<u64>,
) -> Result<LogCoeff, StienstraError> {
    if m == 0 {
        return Err(StienstraError::ZeroM);
    }
    if let Some(p) = p {
        if !is_prime(p) {
            return Err(StienstraError::NotPrime(p));
        }
    }
    let target = log_target(m, i, j);
    Ok(match (target, p) {
        (None, None) => LogCoeff::Exact(BigInt::zero()),
        (None, Some(p)) => LogCoeff::Residue { p, value: 0 },
        (Some(t), None) => LogCoeff::Exact(coeff_in_power_exact(f, m - 1, &t)),
        (Some(t), Some(p)) => LogCoeff::Residue {
            p,
            value: coeff_in_power(f, m - 1, &t, p),
        },
    })
}

/// Coefficients `b_{m−1,i,j}` for `1 ≤ m ≤ m_max` and `i, j ∈ J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogCoeffTable {
    pub modulus: Option<u64>,
    pub entries: BTreeMap<(u64, JIndex, JIndex), LogCoeff>,
}

impl LogCoeffTable {
    pub fn get(&self, m: u64, i: &JIndex, j: &JIndex) -> Option<&LogCoeff> {
        self.entries.get(&(m, i.clone(), j.clone()))
    }
}

/// Builds the table in parallel over `(m, i, j)`; the result is independent of scheduling.
pub fn log_table(
    f: &SparsePoly,
    ws: &WeightSystem,
    m_max: u64,
    p: Option<u64>,
) -> Result<LogCoeffTable, StienstraError> {
    weighted_degree_matches(f, ws)?;
    let js = j_set(ws)?;
    let mut triples = Vec::new();
    for m in 1..=m_max {
        for i in &js {
            for j in &js {
                triples.push((m, i.clone(), j.clone()));
            }
        }
    }
    let values = triples
        .par_iter()
        .map(|(m, i, j)| log_coeff(f, *m, i, j, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LogCoeffTable {
        modulus: p,
        entries: triples.into_iter().zip(values).collect(),
    })
}

fn weighted_degree_matches(f: &SparsePoly, ws: &WeightSystem) -> Result<(), StienstraError> {
    let d = crate::poly::weighted_degree_check(f, ws.alpha())?;
    if d != ws.d() {
        return Err(StienstraError::DegreeMismatch {
            found: d,
            declared: ws.d(),
        });
    }
    Ok(())
}

fn check_calabi_yau(ws: &WeightSystem) -> Result<(), StienstraError> {
    if ws.d() != ws.w() {
        return Err(StienstraError::NotCalabiYau {
            d: ws.d(),
            w: ws.w(),
        });
    }
    Ok(())
}

fn check_prime_content(f: &SparsePoly, p: u64) -> Result<(), StienstraError> {
    if !is_prime(p) {
        return Err(StienstraError::NotPrime(p));
    }
    if reduce_big(&content(f)?, p) == 0 {
        return Err(StienstraError::ContentDivisible(p));
    }
    Ok(())
}

/// `b_{m−1}` = coefficient of `(x_0⋯x_N)^{m−1}` in `f^{m−1}`, for `m = 1..=m_max` (`d = w`).
pub fn b_sequence(
    f: &SparsePoly,
    ws: &WeightSystem,
    m_max: u64,
) -> Result<Vec<BigInt>, StienstraError> {
    check_calabi_yau(ws)?;
    weighted_degree_matches(f, ws)?;
    let n = f.n_vars();
    Ok((1..=m_max)
        .into_par_iter()
        .map(|m| coeff_in_power_exact(f, m - 1, &ExpVec::diagonal(n, (m - 1) as u32)))
        .collect())
}

/// The logarithm `τ + Σ_{m≥2} (b_{m−1}/m) τ^m` truncated at `trunc` (`d = w`).
pub fn logarithm(
    f: &SparsePoly,
    ws: &WeightSystem,
    trunc: usize,
) -> Result<PowerSeries1, StienstraError> {
    let b = b_sequence(f, ws, trunc as u64)?;
    Ok(PowerSeries1::from_log_coefficients(&b, trunc))
}

/// Height one iff `(x_0⋯x_N)^{p−1}` has a nonzero coefficient in `f^{p−1}` mod `p` (`d = w`).
pub fn height_one_test(f: &SparsePoly, ws: &WeightSystem, p: u64) -> Result<bool, StienstraError> {
    check_calabi_yau(ws)?;
    weighted_degree_matches(f, ws)?;
    check_prime_content(f, p)?;
    let target = ExpVec::diagonal(f.n_vars(), (p - 1) as u32);
    Ok(coeff_in_power(f, p - 1, &target, p) != 0)
}

/// Whether every diagonal coefficient `b_{p−1,i,i}`, `i ∈ J`, is nonzero mod `p`.
///
/// For a diagonal logarithm this says every one-dimensional factor has height one.
pub fn diagonal_height_one(
    f: &SparsePoly,
    ws: &WeightSystem,
    p: u64,
) -> Result<bool, StienstraError> {
    weighted_degree_matches(f, ws)?;
    check_prime_content(f, p)?;
    let js = j_set(ws)?;
    Ok(js.par_iter().all(|i| {
        let target = i.exps().scaled((p - 1) as u32);
        coeff_in_power(f, p - 1, &target, p) != 0
    }))
}

fn fermat_range(top_index: u64, d: u64) -> Result<(), StienstraError> {
    let err = StienstraError::FermatRange { n: top_index, d };
    let k = d.checked_sub(top_index).ok_or(err.clone())?;
    if k < 2 || top_index < 2 * (k - 1) {
        return Err(err);
    }
    Ok(())
}

/// Whether `b_{m−1,i,j} = 0` for all `i ≠ j` in `J` and `m ≤ m_max`, for `x_0^d + ... + x_N^d`.
pub fn diagonality_check(top_index: u64, d: u64, m_max: u64) -> Result<bool, StienstraError> {
    fermat_range(top_index, d)?;
    let n = top_index as usize + 1;
    let f = SparsePoly::fermat(n, d as u32);
    let ws = WeightSystem::standard(n, d)?;
    let js = j_set(&ws)?;
    let mut pairs = Vec::new();
    for m in 1..=m_max {
        for i in &js {
            for j in js.iter().filter(|j| *j != i) {
                pairs.push((m, i, j));
            }
        }
    }
    pairs
        .par_iter()
        .map(|&(m, i, j)| log_coeff(&f, m, i, j, None).map(|c| c.is_zero()))
        .try_reduce(|| true, |a, b| Ok(a && b))
}

/// Valuation and unit residue of `(ad)! / ∏ (a·i_r)!`, the Fermat diagonal coefficient at `m = 1 + ad`.
pub fn fermat_log_coeff(
    a: u64,
    d: u64,
    i: &[u32],
    p: u64,
) -> Result<MultinomialResidue, StienstraError> {
    if i.iter().map(|&x| x as u64).sum::<u64>() != d {
        return Err(StienstraError::IndexSum { i: i.to_vec(), d });
    }
    let parts: Vec<u64> = i.iter().map(|&x| a * x as u64).collect();
    Ok(multinomial_mod_p(a * d, &parts, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{multinomial_exact, parse_poly};

    fn jx(v: &[u32]) -> JIndex {
        JIndex(ExpVec::new(v.to_vec()))
    }

    fn ex43() -> (SparsePoly, WeightSystem) {
        (
            parse_poly("x^2+y^5+z^5+w^10", None).unwrap(),
            WeightSystem::new(vec![5, 2, 2, 1], 10).unwrap(),
        )
    }

    #[test]
    fn j_sets() {
        let ws = WeightSystem::standard(3, 4).unwrap();
        assert_eq!(
            j_set(&ws).unwrap(),
            vec![jx(&[2, 1, 1]), jx(&[1, 2, 1]), jx(&[1, 1, 2])]
        );
        assert_eq!(j_set(&ex43().1).unwrap(), vec![jx(&[1, 1, 1, 1])]);
        let ws = WeightSystem::new(vec![1, 1, 3, 4], 9).unwrap();
        assert_eq!(j_set(&ws).unwrap(), vec![jx(&[1, 1, 1, 1])]);
        let ws = WeightSystem::standard(3, 2).unwrap();
        assert_eq!(j_set(&ws), Err(StienstraError::EmptyJ { d: 2 }));
    }

    #[test]
    fn fermat_quartic_coefficients() {
        let f = SparsePoly::fermat(3, 4);
        let i = jx(&[2, 1, 1]);
        assert_eq!(
            log_coeff(&f, 5, &i, &i, None).unwrap(),
            LogCoeff::Exact(12.into())
        );
        assert_eq!(
            log_coeff(&f, 1, &i, &i, None).unwrap(),
            LogCoeff::Exact(1.into())
        );
        assert!(log_coeff(&f, 5, &i, &jx(&[1, 2, 1]), None)
            .unwrap()
            .is_zero());
        assert_eq!(
            log_coeff(&f, 5, &i, &i, Some(7)).unwrap(),
            LogCoeff::Residue { p: 7, value: 5 }
        );
        // m·j − i negative in the first coordinate
        assert!(log_coeff(&f, 1, &i, &jx(&[1, 2, 1]), None)
            .unwrap()
            .is_zero());
        assert_eq!(log_coeff(&f, 0, &i, &i, None), Err(StienstraError::ZeroM));
    }

    #[test]
    fn height_one_on_weighted_quartic_k3() {
        let (f, ws) = ex43();
        assert!(height_one_test(&f, &ws, 11).unwrap());
        assert!(!height_one_test(&f, &ws, 13).unwrap());
        assert!(!height_one_test(&f, &ws, 19).unwrap());
        let fermat = SparsePoly::fermat(3, 4);
        let err = height_one_test(&fermat, &WeightSystem::standard(3, 4).unwrap(), 5).unwrap_err();
        assert_eq!(err, StienstraError::NotCalabiYau { d: 4, w: 3 });
        let g = parse_poly("3*x^2+3*y^5+3*z^5+3*w^10", None).unwrap();
        assert_eq!(
            height_one_test(&g, &ws, 3),
            Err(StienstraError::ContentDivisible(3))
        );
    }

    #[test]
    fn b_sequence_of_weighted_k3() {
        let (f, ws) = ex43();
        let b = b_sequence(&f, &ws, 12).unwrap();
        assert_eq!(b[0], BigInt::from(1));
        assert!(b[1..10].iter().all(|x| x.is_zero()));
        // 10!/(5!2!2!1!)
        assert_eq!(b[10], BigInt::from(7560));
        assert!(b[11].is_zero());
    }

    #[test]
    fn fermat_diagonality() {
        assert!(diagonality_check(4, 7, 8).unwrap());
        assert!(diagonality_check(2, 4, 9).unwrap());
        assert!(diagonality_check(2, 4, 1).unwrap());
        assert_eq!(
            diagonality_check(2, 5, 3),
            Err(StienstraError::FermatRange { n: 2, d: 5 })
        );
        assert_eq!(
            diagonality_check(3, 4, 3),
            Err(StienstraError::FermatRange { n: 3, d: 4 })
        );
    }

    #[test]
    fn fermat_closed_form() {
        assert_eq!(
            fermat_log_coeff(1, 4, &[2, 1, 1], 7).unwrap(),
            MultinomialResidue {
                valuation: 0,
                residue: 5
            }
        );
        assert_eq!(
            fermat_log_coeff(0, 4, &[2, 1, 1], 7).unwrap(),
            MultinomialResidue {
                valuation: 0,
                residue: 1
            }
        );
        for p in [5u64, 13] {
            let a = (p - 1) / 4;
            assert_eq!(fermat_log_coeff(a, 4, &[2, 1, 1], p).unwrap().valuation, 0);
        }
        assert!(fermat_log_coeff(1, 4, &[2, 1], 7).is_err());
        let f = SparsePoly::fermat(5, 7);
        for a in 0..=2u64 {
            let i = [3u32, 1, 1, 1, 1];
            let ji = jx(&i);
            let expected =
                multinomial_exact(7 * a, &i.iter().map(|&x| a * x as u64).collect::<Vec<_>>())
                    .unwrap();
            assert_eq!(
                log_coeff(&f, 1 + 7 * a, &ji, &ji, None).unwrap(),
                LogCoeff::Exact(expected)
            );
        }
    }

    #[test]
    fn fermat_height_one_iff_one_mod_d() {
        let f = SparsePoly::fermat(3, 4);
        let ws = WeightSystem::standard(3, 4).unwrap();
        for p in [5u64, 13] {
            assert!(diagonal_height_one(&f, &ws, p).unwrap());
        }
        for p in [3u64, 7, 11] {
            assert!(!diagonal_height_one(&f, &ws, p).unwrap());
        }
    }

    #[test]
    fn table_is_deterministic() {
        let f = SparsePoly::fermat(3, 4);
        let ws = WeightSystem::standard(3, 4).unwrap();
        let t = log_table(&f, &ws, 5, None).unwrap();
        assert_eq!(t.entries.len(), 5 * 9);
        let i = jx(&[2, 1, 1]);
        assert_eq!(t.get(5, &i, &i), Some(&LogCoeff::Exact(12.into())));
        assert_eq!(t, log_table(&f, &ws, 5, None).unwrap());
    }
}
