//! Exponent matrices of weighted Delsarte surfaces and Goto's invariant `e_A`.
//!
//! A sum of `N+1` monomials `Σ_i ∏_j x_j^{a_ij}` is encoded by the square
//! matrix `A = (a_ij)`. With `g` the gcd of the column sums of `adj(A)` and
//! of `|det A|`, `e_A = |det A| / g`. For a K3 surface the height at `p` is
//! infinite iff `p^μ ≡ −1 mod e_A` for some `μ`, and the order of `p` mod
//! `e_A` otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{is_prime, multiplicative_order, pow_mod};
use crate::formalgroup::HeightResult;
use crate::poly::{weighted_degree_check, PolyError, SparsePoly, WeightSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DelsarteError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("a Delsarte polynomial in {vars} variables needs exactly {vars} terms, got {terms}")]
    TermCount { vars: usize, terms: usize },
    #[error("coefficient {coeff} of `{monomial}` is not 1")]
    NonUnitCoefficient { monomial: String, coeff: BigInt },
    #[error(
        "matrix must be square with one row per weight ({expected}×{expected}), got {rows}×{cols}"
    )]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix entry a[{i}][{j}] = {value} is negative")]
    NegativeEntry { i: usize, j: usize, value: i64 },
    #[error("matrix is singular")]
    Singular,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("p = {p} divides e_A = {e_a}")]
    PrimeDividesEA { p: u64, e_a: u64 },
    #[error("e_A = {0} does not fit in 64 bits")]
    EATooLarge(BigInt),
    #[error("cannot parse matrix: {0}")]
    Parse(String),
}

/// A square exponent matrix with its weights; `m` is the weighted degree of row 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelsarteMatrix {
    a: Vec<Vec<i64>>,
    alpha: Vec<u64>,
    m: u64,
}

impl DelsarteMatrix {
    /// Checks shape and non-negativity; conditions (2)–(4) are left to [`validate`].
    pub fn new(a: Vec<Vec<i64>>, alpha: Vec<u64>) -> Result<Self, DelsarteError> {
        let n = alpha.len();
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            let cols = a.first().map_or(0, |r| r.len());
            return Err(DelsarteError::Shape {
                expected: n,
                rows: a.len(),
                cols,
            });
        }
        if alpha.contains(&0) {
            return Err(PolyError::NonPositiveWeight.into());
        }
        for (i, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < 0 {
                    return Err(DelsarteError::NegativeEntry { i, j, value: v });
                }
            }
        }
        let m = row_weight(&a[0], &alpha);
        Ok(DelsarteMatrix { a, alpha, m })
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn alpha(&self) -> &[u64] {
        &self.alpha
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn size(&self) -> usize {
        self.a.len()
    }

    pub fn big(&self) -> Vec<Vec<BigInt>> {
        self.a
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// `N = 3` and `m = Σ α`: the K3 case where heights are read off `e_A`.
    pub fn is_k3(&self) -> bool {
        self.size() == 4 && self.m == self.alpha.iter().sum::<u64>()
    }
}

fn row_weight(row: &[i64], alpha: &[u64]) -> u64 {
    row.iter().zip(alpha).map(|(&x, &a)| x as u64 * a).sum()
}

/// Rows are the exponent vectors of the terms of `f`.
///
/// Rows follow the first permutation of the canonical term order that makes
/// the diagonal nonzero, and the canonical order itself if none does.
pub fn matrix_from_poly(
    f: &SparsePoly,
    ws: &WeightSystem,
) -> Result<DelsarteMatrix, DelsarteError> {
    let n = f.n_vars();
    if ws.n_vars() != n {
        return Err(PolyError::WeightCount {
            expected: n,
            got: ws.n_vars(),
        }
        .into());
    }
    weighted_degree_check(f, ws.alpha())?;
    if f.num_terms() != n {
        return Err(DelsarteError::TermCount {
            vars: n,
            terms: f.num_terms(),
        });
    }
    let mut rows = Vec::with_capacity(n);
    for (e, c) in f.terms() {
        if !c.is_one() {
            let single = SparsePoly::from_terms(f.vars().to_vec(), [(e.clone(), BigInt::one())]);
            return Err(DelsarteError::NonUnitCoefficient {
                monomial: single.to_string(),
                coeff: c.clone(),
            });
        }
        rows.push(e.as_slice().iter().map(|&x| x as i64).collect::<Vec<i64>>());
    }
    let order = diagonal_order(&rows).unwrap_or_else(|| (0..n).collect());
    let a = order.into_iter().map(|k| rows[k].clone()).collect();
    DelsarteMatrix::new(a, ws.alpha().to_vec())
}

/// Lexicographically first permutation `σ` with `rows[σ(i)][i] ≠ 0` for all `i`.
fn diagonal_order(rows: &[Vec<i64>]) -> Option<Vec<usize>> {
    fn search(rows: &[Vec<i64>], col: usize, used: &mut [bool], acc: &mut Vec<usize>) -> bool {
        if col == rows.len() {
            return true;
        }
        for k in 0..rows.len() {
            if !used[k] && rows[k][col] != 0 {
                used[k] = true;
                acc.push(k);
                if search(rows, col + 1, used, acc) {
                    return true;
                }
                acc.pop();
                used[k] = false;
            }
        }
        false
    }
    let mut used = vec![false; rows.len()];
    let mut acc = Vec::new();
    search(rows, 0, &mut used, &mut acc).then_some(acc)
}

/// One of the four admissibility conditions at a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionCheck {
    pub condition: u8,
    pub description: &'static str,
    pub passed: bool,
    pub offenders: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub p: u64,
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<u8> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.condition)
            .collect()
    }
}

/// Conditions (1) `a_ij ≥ 0, p ∤ a_ij`, (2) every column has a zero,
/// (3) `p ∤ det A`, (4) every row has weighted degree `m`.
///
/// Condition (1) ignores zero entries unless `strict`.
pub fn validate(mat: &DelsarteMatrix, p: u64, strict: bool) -> ValidationReport {
    let a = mat.rows();
    let n = mat.size();

    let mut c1 = Vec::new();
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < 0 || ((v != 0 || strict) && (v as u64).is_multiple_of(p)) {
                c1.push(format!("a[{i}][{j}]={v}"));
            }
        }
    }
    let c2: Vec<String> = (0..n)
        .filter(|&j| a.iter().all(|r| r[j] != 0))
        .map(|j| format!("column {j}"))
        .collect();
    let (_, det) = adjugate_det(&mat.big());
    let c3 = if (&det % BigInt::from(p)).is_zero() {
        vec![format!("det={det}")]
    } else {
        Vec::new()
    };
    let c4: Vec<String> = a
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            let wt = row_weight(r, mat.alpha());
            (wt != mat.m()).then(|| format!("row {i} weighs {wt}"))
        })
        .collect();

    let check = |condition, description, offenders: Vec<String>| ConditionCheck {
        condition,
        description,
        passed: offenders.is_empty(),
        offenders,
    };
    ValidationReport {
        p,
        checks: vec![
            check(1, "entries non-negative and prime to p", c1),
            check(2, "every column has a zero entry", c2),
            check(3, "p does not divide det(A)", c3),
            check(4, "all rows have the same weighted degree", c4),
        ],
    }
}

/// Determinant by fraction-free elimination.
fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Exact adjugate and determinant; `adj(A)·A = det(A)·I` is asserted.
#[allow(clippy::needless_range_loop)]
pub fn adjugate_det(a: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let n = a.len();
    assert!(
        a.iter().all(|r| r.len() == n),
        "adjugate of a non-square matrix"
    );
    let det = bareiss_det(a);
    let mut adj = vec![vec![BigInt::zero(); n]; n];
    if n == 1 {
        adj[0][0] = BigInt::one();
    } else {
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<BigInt>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| a[r][c].clone())
                            .collect()
                    })
                    .collect();
                let cof = bareiss_det(&minor);
                // adj is the transposed cofactor matrix
                adj[j][i] = if (i + j) % 2 == 0 { cof } else { -cof };
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let s: BigInt = (0..n).map(|k| &adj[i][k] * &a[k][j]).sum();
            let expected = if i == j { det.clone() } else { BigInt::zero() };
            assert_eq!(s, expected, "adj(A)·A ≠ det(A)·I");
        }
    }
    (adj, det)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EAResult {
    pub det: BigInt,
    pub adj_col_sums: Vec<BigInt>,
    pub g: BigInt,
    pub e_a: BigInt,
}

impl EAResult {
    pub fn e_a_u64(&self) -> Result<u64, DelsarteError> {
        u64::try_from(&self.e_a).map_err(|_| DelsarteError::EATooLarge(self.e_a.clone()))
    }
}

/// `e_A = |det A| / gcd(column sums of adj(A), |det A|)`.
pub fn e_a(mat: &DelsarteMatrix) -> Result<EAResult, DelsarteError> {
    let (adj, det) = adjugate_det(&mat.big());
    if det.is_zero() {
        return Err(DelsarteError::Singular);
    }
    let n = mat.size();
    let adj_col_sums: Vec<BigInt> = (0..n).map(|j| adj.iter().map(|r| &r[j]).sum()).collect();
    let abs_det = det.abs();
    let g = adj_col_sums.iter().fold(abs_det.clone(), |g, s| g.gcd(s));
    let e_a = &abs_det / &g;
    Ok(EAResult {
        det,
        adj_col_sums,
        g,
        e_a,
    })
}

/// Smallest `μ ≥ 1` with `p^μ ≡ −1 mod e_A`, if any.
pub fn supersingular_witness(e_a: u64, p: u64) -> Option<u64> {
    let ord = multiplicative_order(p, e_a)?;
    if e_a <= 2 {
        // −1 ≡ 1 here
        return Some(ord);
    }
    (1..=ord).find(|&mu| pow_mod(p, mu, e_a) == e_a - 1)
}

/// Height `∞` if some power of `p` is `−1` mod `e_A`, else the order of `p` mod `e_A`.
pub fn goto_height(e_a: u64, p: u64) -> Result<HeightResult, DelsarteError> {
    if !is_prime(p) {
        return Err(DelsarteError::NotPrime(p));
    }
    if e_a == 0 || e_a.is_multiple_of(p) {
        return Err(DelsarteError::PrimeDividesEA { p, e_a });
    }
    if supersingular_witness(e_a, p).is_some() {
        return Ok(HeightResult::Infinite);
    }
    let ord = multiplicative_order(p, e_a).expect("p is prime to e_A");
    Ok(HeightResult::Finite(ord as u32))
}

/// Parses `[[a,b],[c,d]]` (JSON) or `a,b;c,d`.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<i64>>, DelsarteError> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| DelsarteError::Parse(e.to_string()));
    }
    t.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| DelsarteError::Parse(format!("bad entry `{}`", x.trim())))
                })
                .collect()
        })
        .collect()
}
