//! Frobenius powers of the maximal ideal and F-pure thresholds.
//!
//! `μ_f(q) = min{n : f^n ∈ m^[q]}` where `m^[q] = (x_0^q, ..., x_N^q)` over
//! `F_p`. Membership of `f^n` is decided by enumerating the monomials of
//! `f^n` whose exponents all stay below `q` and checking that their
//! coefficients vanish modulo `p`. Membership is monotone in `n`, so `μ` is
//! located by binary search between 1 and a cap.
//!
//! The threshold satisfies `(μ(q) − 1)/q ≤ fpt(f_p) ≤ μ(q)/q`; the lower
//! endpoint uses that `ν(p^e)/p^e` is nondecreasing in `e`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{ceil_div, is_prime, mul_mod, reduce_big};
use crate::linalg::rational_rank;
use crate::poly::{
    weighted_degree_check, DenseFactorials, FactorialTable, PolyError, SparsePoly, WeightSystem,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrobeniusError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("f reduces to zero modulo {0} (content divisible by p)")]
    ZeroModP(u64),
    #[error("f has a nonzero constant term, so f is not in the maximal ideal")]
    ConstantTerm,
    #[error("q = {p}^{e} overflows")]
    Overflow { p: u64, e: u32 },
    #[error("1 − a/p inference needs d = w (got d = {d}, w = {w})")]
    NotCalabiYau { d: u64, w: u64 },
    #[error("p = {p} is below the bound p ≥ w(N−2)+1 = {bound} where fpt = 1 − a/p is known; pass the theorem-range override to assume the form")]
    BelowTheoremRange { p: u64, bound: u64 },
    #[error("inference level e = {0} is too coarse; need e ≥ 2")]
    InferenceLevel(u32),
    #[error("no value 1 − a/p with 0 ≤ a ≤ N−1 lies in the bracket [{lo}, {hi}]")]
    NoCandidate {
        lo: Box<BigRational>,
        hi: Box<BigRational>,
    },
    #[error("p = {0} divides the Fermat degree d")]
    PrimeDividesDegree(u64),
    #[error("Fermat degree d = N + k needs k ≥ 2 and N > k − 2 (got N = {n}, d = {d})")]
    FermatRange { n: u64, d: u64 },
    #[error("internal error: f^{cap} is not in m^[{q}] although {cap} is a proven cap")]
    CapViolated { cap: u64, q: u64 },
}

/// One evaluation of the membership predicate `f^n ∈ m^[q]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probe {
    pub n: u64,
    pub in_ideal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuRecord {
    pub p: u64,
    pub e: u32,
    pub q: u64,
    pub mu: u64,
    pub cap: u64,
    pub probes: Vec<Probe>,
}

impl MuRecord {
    /// `ν(q) = μ(q) − 1`, the largest `n` with `f^n ∉ m^[q]`.
    pub fn nu(&self) -> u64 {
        self.mu - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FptKind {
    Exact,
    Bracket,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FptResult {
    pub kind: FptKind,
    pub value: Option<BigRational>,
    /// `[(μ−1)/q, μ/q]` from the underlying `μ` computation.
    pub bracket: (BigRational, BigRational),
    /// `a` in `fpt = 1 − a/p`, for inferred values.
    pub a: Option<u64>,
    /// Set when `p` lies below the proven range and the `1 − a/p` form was assumed.
    pub assumed_form: bool,
    pub mu: MuRecord,
}

impl FptResult {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.bracket.0 <= x && x <= &self.bracket.1
    }
}

/// `f` reduced modulo `p`, prepared for repeated `f^n ∈ m^[q]` queries.
///
/// Answers are cached per `(q, n)`.
pub struct FrobeniusOracle {
    p: u64,
    n_vars: usize,
    exps: Vec<Vec<u64>>,
    coeffs: Vec<u64>,
    injective: bool,
    table: FactorialTable,
    cache: Mutex<HashMap<(u64, u64), bool>>,
}

impl FrobeniusOracle {
    pub fn new(f: &SparsePoly, p: u64) -> Result<Self, FrobeniusError> {
        if !is_prime(p) {
            return Err(FrobeniusError::NotPrime(p));
        }
        if f.is_zero() {
            return Err(PolyError::ZeroPolynomial.into());
        }
        if f.has_constant_term() {
            return Err(FrobeniusError::ConstantTerm);
        }
        let fp = f.reduce_mod(p);
        if fp.is_zero() {
            return Err(FrobeniusError::ZeroModP(p));
        }
        let mut exps = Vec::new();
        let mut coeffs = Vec::new();
        for (e, c) in fp.terms() {
            exps.push(e.as_slice().iter().map(|&x| x as u64).collect::<Vec<_>>());
            coeffs.push(reduce_big(c, p));
        }
        // distinct compositions of the same n give distinct monomials iff the
        // vectors (E_t, 1) are linearly independent
        let augmented: Vec<Vec<BigInt>> = exps
            .iter()
            .map(|e| {
                e.iter()
                    .map(|&x| BigInt::from(x))
                    .chain([BigInt::one()])
                    .collect()
            })
            .collect();
        let injective = rational_rank(&augmented) == exps.len();
        Ok(FrobeniusOracle {
            p,
            n_vars: f.n_vars(),
            exps,
            coeffs,
            injective,
            table: FactorialTable::new(p),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Whether distinct compositions always give distinct monomials.
    pub fn is_collision_free(&self) -> bool {
        self.injective
    }

    /// `f^n ∈ m^[q]` over `F_p`.
    pub fn contains(&self, n: u64, q: u64) -> bool {
        if let Some(&hit) = self.cache.lock().unwrap().get(&(q, n)) {
            return hit;
        }
        let result = self.compute(n, q);
        self.cache.lock().unwrap().entry((q, n)).or_insert(result);
        result
    }

    fn compute(&self, n: u64, q: u64) -> bool {
        if q <= 1 {
            return n >= 1;
        }
        let fact = self.table.dense(n);
        let powers: Vec<Vec<u64>> = self
            .coeffs
            .iter()
            .map(|&c| {
                let mut v = Vec::with_capacity(n as usize + 1);
                let mut acc = 1u64;
                for _ in 0..=n {
                    v.push(acc);
                    acc = mul_mod(acc, c, self.p);
                }
                v
            })
            .collect();
        let ctx = Enumeration {
            oracle: self,
            n,
            q,
            fact: &fact,
            powers: &powers,
        };

        let first = &self.exps[0];
        let first_max = (0..=n)
            .take_while(|&b| first.iter().all(|&x| x * b < q))
            .last()
            .unwrap_or(0);
        let start = |b: u64| Partial {
            exps: first.iter().map(|&x| x * b).collect(),
            remaining: n - b,
            taken: b,
            val_sum: fact.val[b as usize],
            weight: mul_mod(fact.inv_unit[b as usize], powers[0][b as usize], self.p),
        };

        if self.injective {
            let found = (0..=first_max)
                .into_par_iter()
                .any(|b| ctx.any_unit(1, start(b)));
            !found
        } else {
            let merged = (0..=first_max)
                .into_par_iter()
                .map(|b| {
                    let mut acc = HashMap::new();
                    ctx.accumulate(1, start(b), &mut acc);
                    acc
                })
                .reduce(HashMap::new, |mut a, b| {
                    for (k, v) in b {
                        let slot = a.entry(k).or_insert(0u64);
                        *slot = (*slot + v) % self.p;
                    }
                    a
                });
            merged.values().all(|&v| v == 0)
        }
    }
}

struct Partial {
    exps: Vec<u64>,
    remaining: u64,
    taken: u64,
    val_sum: u64,
    weight: u64,
}

struct Enumeration<'a> {
    oracle: &'a FrobeniusOracle,
    n: u64,
    q: u64,
    fact: &'a DenseFactorials,
    powers: &'a [Vec<u64>],
}

impl Enumeration<'_> {
    /// Children of `part` obtained by choosing the exponent of term `t`.
    /// Branches whose running multinomial already vanishes mod p are cut
    /// (a carry in base p persists), as are branches leaving the box `< q`.
    fn children(&self, t: usize, part: &Partial) -> Vec<Partial> {
        let e = &self.oracle.exps[t];
        let last = t + 1 == self.oracle.exps.len();
        let p = self.oracle.p;
        let range: Box<dyn Iterator<Item = u64>> = if last {
            Box::new(std::iter::once(part.remaining))
        } else {
            Box::new(0..=part.remaining)
        };
        let mut out = Vec::new();
        for b in range {
            let exps: Vec<u64> = part.exps.iter().zip(e).map(|(&x, &y)| x + y * b).collect();
            if exps.iter().any(|&x| x >= self.q) {
                if e.iter().any(|&y| y > 0) {
                    break;
                }
                continue;
            }
            let taken = part.taken + b;
            let val_sum = part.val_sum + self.fact.val[b as usize];
            if self.fact.val[taken as usize] != val_sum {
                continue;
            }
            let weight = mul_mod(
                part.weight,
                mul_mod(
                    self.fact.inv_unit[b as usize],
                    self.powers[t][b as usize],
                    p,
                ),
                p,
            );
            out.push(Partial {
                exps,
                remaining: part.remaining - b,
                taken,
                val_sum,
                weight,
            });
        }
        out
    }

    fn leaf_weight(&self, part: &Partial) -> u64 {
        mul_mod(part.weight, self.fact.unit[self.n as usize], self.oracle.p)
    }

    fn any_unit(&self, t: usize, part: Partial) -> bool {
        if t == self.oracle.exps.len() {
            return part.remaining == 0 && self.leaf_weight(&part) != 0;
        }
        self.children(t, &part)
            .into_iter()
            .any(|c| self.any_unit(t + 1, c))
    }

    fn accumulate(&self, t: usize, part: Partial, acc: &mut HashMap<Vec<u64>, u64>) {
        if t == self.oracle.exps.len() {
            if part.remaining == 0 {
                let w = self.leaf_weight(&part);
                if w != 0 {
                    let slot = acc.entry(part.exps).or_insert(0);
                    *slot = (*slot + w) % self.oracle.p;
                }
            }
            return;
        }
        for c in self.children(t, &part) {
            self.accumulate(t + 1, c, acc);
        }
    }
}

/// `⌈(wq − w + 1)/d⌉`, an upper bound for `μ_f(q)` when `f` is
/// quasi-homogeneous of weighted degree `d`.
pub fn mu_upper_bound(w: u64, d: u64, q: u64) -> u64 {
    ceil_div(w * q - w + 1, d)
}

/// Smallest `q = p^e`, `1 ≤ e ≤ e_max`, with `wq mod d ∈ [1, w−1]`; such a
/// `q` forces `fpt < w/d`.
pub fn fpt_below_lct_witness(w: u64, d: u64, p: u64, e_max: u32) -> Option<u64> {
    let mut q = 1u64;
    for _ in 0..e_max {
        q = q.checked_mul(p)?;
        let x = (w as u128 * q as u128 % d as u128) as u64;
        if x >= 1 && x < w {
            return Some(q);
        }
    }
    None
}

fn prime_power(p: u64, e: u32) -> Result<u64, FrobeniusError> {
    p.checked_pow(e).ok_or(FrobeniusError::Overflow { p, e })
}

/// `μ_f(p^e)` with the binary-search witnesses.
///
/// With a weight system for which `f` is quasi-homogeneous of degree `ws.d`
/// the search is capped by [`mu_upper_bound`], otherwise by `(N+1)(q−1)+1`.
pub fn mu(
    f: &SparsePoly,
    ws: Option<&WeightSystem>,
    p: u64,
    e: u32,
) -> Result<MuRecord, FrobeniusError> {
    let oracle = FrobeniusOracle::new(f, p)?;
    mu_with(&oracle, ws.and_then(|ws| homogeneous_cap_data(f, ws)), e)
}

fn homogeneous_cap_data(f: &SparsePoly, ws: &WeightSystem) -> Option<(u64, u64)> {
    match weighted_degree_check(f, ws.alpha()) {
        Ok(d) if d == ws.d() => Some((ws.w(), d)),
        _ => None,
    }
}

/// As [`mu`], reusing a prepared oracle. `grading` is `(w, d)` when `f` is
/// quasi-homogeneous of weighted degree `d` with weight sum `w`.
pub fn mu_with(
    oracle: &FrobeniusOracle,
    grading: Option<(u64, u64)>,
    e: u32,
) -> Result<MuRecord, FrobeniusError> {
    let p = oracle.prime();
    let q = prime_power(p, e)?;
    let generic = (oracle.n_vars as u64) * (q - 1) + 1;
    let cap = match grading {
        Some((w, d)) => generic.min(mu_upper_bound(w, d, q)),
        None => generic,
    };
    let mut probes: Vec<Probe> = Vec::new();
    let probe = |probes: &mut Vec<Probe>, n: u64| {
        let hit = n != 0 && oracle.contains(n, q);
        probes.push(Probe { n, in_ideal: hit });
        hit
    };

    if !probe(&mut probes, cap) {
        return Err(FrobeniusError::CapViolated { cap, q });
    }
    let (mut lo, mut hi) = (1u64, cap);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if probe(&mut probes, mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mu = lo;
    for n in [mu - 1, mu] {
        if !probes.iter().any(|pr| pr.n == n) {
            probe(&mut probes, n);
        }
    }
    Ok(MuRecord {
        p,
        e,
        q,
        mu,
        cap,
        probes,
    })
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Log canonical threshold of a quasi-homogeneous polynomial with an
/// isolated singularity: `w/d` if `d ≥ w`, else 1.
pub fn lct(ws: &WeightSystem) -> BigRational {
    if ws.d() >= ws.w() {
        ratio(ws.w(), ws.d())
    } else {
        BigRational::one()
    }
}

fn bracket_of(rec: &MuRecord) -> (BigRational, BigRational) {
    (ratio(rec.mu - 1, rec.q), ratio(rec.mu, rec.q))
}

/// `[(μ−1)/q, μ/q]` at `q = p^e`.
pub fn fpt_bracket(
    f: &SparsePoly,
    ws: Option<&WeightSystem>,
    p: u64,
    e: u32,
) -> Result<FptResult, FrobeniusError> {
    let rec = mu(f, ws, p, e)?;
    Ok(bracket_from_record(rec))
}

/// Bracket-only result for a record.
pub fn bracket_from_record(rec: MuRecord) -> FptResult {
    FptResult {
        kind: FptKind::Bracket,
        value: None,
        bracket: bracket_of(&rec),
        a: None,
        assumed_form: false,
        mu: rec,
    }
}

/// Options for [`fpt_infer`].
#[derive(Clone, Copy, Debug)]
pub struct InferOptions {
    /// `e` in `q = p^e`; at least 2.
    pub level: u32,
    /// Allow primes below `w(N−2)+1`, labelling the result as an assumed form.
    pub override_range: bool,
}

impl Default for InferOptions {
    fn default() -> Self {
        InferOptions {
            level: 2,
            override_range: false,
        }
    }
}

/// Exact `fpt(f_p) = 1 − a/p` for `d = w`, read off the bracket at `q = p^level`.
///
/// Candidates `1 − a/p`, `0 ≤ a ≤ N−1`, are spaced `1/p` apart while the
/// bracket has width `1/p^level ≤ 1/p²`, so at most one fits.
pub fn fpt_infer(
    f: &SparsePoly,
    ws: &WeightSystem,
    p: u64,
    opts: InferOptions,
) -> Result<FptResult, FrobeniusError> {
    if ws.d() != ws.w() {
        return Err(FrobeniusError::NotCalabiYau {
            d: ws.d(),
            w: ws.w(),
        });
    }
    if opts.level < 2 {
        return Err(FrobeniusError::InferenceLevel(opts.level));
    }
    if !is_prime(p) {
        return Err(FrobeniusError::NotPrime(p));
    }
    let bound = ws.theorem_prime_bound();
    let below = p < bound;
    if below && !opts.override_range {
        return Err(FrobeniusError::BelowTheoremRange { p, bound });
    }
    let rec = mu(f, Some(ws), p, opts.level)?;
    infer_from_record(rec, ws, below)
}

/// The unique `1 − a/p`, `0 ≤ a ≤ N−1`, inside the bracket of a record at `e ≥ 2`.
///
/// `assumed_form` marks primes below the bound where the form is not proven.
pub fn infer_from_record(
    rec: MuRecord,
    ws: &WeightSystem,
    assumed_form: bool,
) -> Result<FptResult, FrobeniusError> {
    if rec.e < 2 {
        return Err(FrobeniusError::InferenceLevel(rec.e));
    }
    let p = rec.p;
    let (lo, hi) = bracket_of(&rec);
    let top = ws.top_index() as u64;
    let hits: Vec<(u64, BigRational)> = (0..top)
        .map(|a| (a, BigRational::one() - ratio(a, p)))
        .filter(|(_, c)| &lo <= c && c <= &hi)
        .collect();
    assert!(
        hits.len() <= 1,
        "candidates 1/p apart cannot share a bracket of width 1/p^2"
    );
    let Some((a, value)) = hits.into_iter().next() else {
        return Err(FrobeniusError::NoCandidate {
            lo: Box::new(lo),
            hi: Box::new(hi),
        });
    };
    Ok(FptResult {
        kind: FptKind::Exact,
        value: Some(value),
        bracket: (lo, hi),
        a: Some(a),
        assumed_form,
        mu: rec,
    })
}

/// Outcome of the Fermat criterion `p ≡ 1 mod d ⟺ fpt = lct = (N+1)/d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FermatVerdict {
    pub top_index: u64,
    pub d: u64,
    pub p: u64,
    /// `p ≡ 1 mod d`.
    pub criterion: bool,
    /// `(N+1)/d`; equal to the fpt when `criterion`, a strict upper bound otherwise.
    pub lct: BigRational,
}

impl FermatVerdict {
    pub fn fpt(&self) -> Option<&BigRational> {
        self.criterion.then_some(&self.lct)
    }
}

/// Fermat criterion for `x_0^d + ... + x_N^d` with `d = N + k`, `k ≥ 2`, `N > k − 2`, `p ∤ d`.
pub fn fermat_fpt(top_index: u64, d: u64, p: u64) -> Result<FermatVerdict, FrobeniusError> {
    if !is_prime(p) {
        return Err(FrobeniusError::NotPrime(p));
    }
    if d.is_multiple_of(p) {
        return Err(FrobeniusError::PrimeDividesDegree(p));
    }
    if d < top_index + 2 || top_index + 2 <= d - top_index {
        return Err(FrobeniusError::FermatRange { n: top_index, d });
    }
    Ok(FermatVerdict {
        top_index,
        d,
        p,
        criterion: p % d == 1,
        lct: ratio(top_index + 1, d),
    })
}

/// `fpt` value rendered as `n/d` in lowest terms, or `n` for integers.
pub fn render_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
