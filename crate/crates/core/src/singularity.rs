//! Jacobian ideals and the isolated-singularity check `√J(f) = (x_0, ..., x_N)`.
//!
//! `J(f)` is weighted homogeneous, so `x_i^k ∈ J(f)` is decided inside the
//! single graded piece of degree `k·α_i`: the target monomial must lie in the
//! span of all `x^u · ∂f/∂x_j` of that degree.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::is_prime;
use crate::linalg::{Echelon, Field, PrimeField, Rationals};
use crate::poly::{weighted_degree_check, ExpVec, PolyError, SparsePoly, WeightSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SingularityError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("the check needs d > max weight so that all partials vanish at the origin (d = {d}, max weight = {max_alpha})")]
    DegreeTooSmall { d: u64, max_alpha: u64 },
}

/// Coefficient field of the linear algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Characteristic {
    Zero,
    Prime(u64),
}

impl Characteristic {
    pub fn from_u64(c: u64) -> Result<Self, SingularityError> {
        match c {
            0 => Ok(Characteristic::Zero),
            p if is_prime(p) => Ok(Characteristic::Prime(p)),
            other => Err(SingularityError::NotPrime(other)),
        }
    }
}

impl std::fmt::Display for Characteristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Characteristic::Zero => f.write_str("0"),
            Characteristic::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// The partial derivatives `∂f/∂x_0, ..., ∂f/∂x_N`.
pub fn jacobian(f: &SparsePoly) -> Vec<SparsePoly> {
    (0..f.n_vars()).map(|i| f.derivative(i)).collect()
}

/// All exponent vectors of weighted degree exactly `deg`.
fn monomials_of_degree(alpha: &[u64], deg: u64) -> Vec<ExpVec> {
    fn go(alpha: &[u64], k: usize, rem: u64, cur: &mut Vec<u32>, out: &mut Vec<ExpVec>) {
        if k == alpha.len() {
            if rem == 0 {
                out.push(ExpVec::new(cur.clone()));
            }
            return;
        }
        let mut e = 0u64;
        while e * alpha[k] <= rem {
            cur[k] = e as u32;
            go(alpha, k + 1, rem - e * alpha[k], cur, out);
            e += 1;
        }
        cur[k] = 0;
    }
    let mut out = Vec::new();
    go(alpha, 0, deg, &mut vec![0; alpha.len()], &mut out);
    out
}

/// Nonzero partials after reduction to the given characteristic, each with its weighted degree.
fn graded_partials(f: &SparsePoly, alpha: &[u64], ch: Characteristic) -> Vec<(SparsePoly, u64)> {
    jacobian(f)
        .into_iter()
        .map(|g| match ch {
            Characteristic::Zero => g,
            Characteristic::Prime(p) => g.reduce_mod(p),
        })
        .filter(|g| !g.is_zero())
        .map(|g| {
            let deg = g
                .terms()
                .next()
                .map(|(e, _)| e.weighted_degree(alpha))
                .unwrap_or(0);
            (g, deg)
        })
        .collect()
}

fn span_contains<F: Field>(
    field: F,
    target: &ExpVec,
    gens: &[(SparsePoly, u64)],
    alpha: &[u64],
) -> bool {
    let deg = target.weighted_degree(alpha);
    let mut columns: HashMap<ExpVec, usize> = HashMap::new();
    let mut column = |e: ExpVec| {
        let next = columns.len();
        *columns.entry(e).or_insert(next)
    };
    let target_col = column(target.clone());
    let mut rows = Vec::new();
    for (g, g_deg) in gens {
        let Some(rest) = deg.checked_sub(*g_deg) else {
            continue;
        };
        for u in monomials_of_degree(alpha, rest) {
            let row: BTreeMap<usize, F::Elem> = g
                .terms()
                .map(|(e, c)| (column(e.add(&u)), field.lift(c)))
                .collect();
            rows.push(row);
        }
    }
    let target_row: BTreeMap<usize, F::Elem> = [(target_col, field.lift(&BigInt::from(1)))].into();
    let mut ech = Echelon::new(field);
    for row in rows {
        ech.insert(row);
    }
    ech.contains(target_row)
}

/// Whether the monomial `target` lies in `J(f)` over `Q` or `F_p`.
pub fn graded_membership(
    target: &ExpVec,
    f: &SparsePoly,
    ws: &WeightSystem,
    ch: Characteristic,
) -> bool {
    let gens = graded_partials(f, ws.alpha(), ch);
    match ch {
        Characteristic::Zero => span_contains(Rationals, target, &gens, ws.alpha()),
        Characteristic::Prime(p) => span_contains(PrimeField(p), target, &gens, ws.alpha()),
    }
}

/// Outcome of the pure-power search for one variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarOutcome {
    /// `x_i^k ∈ J(f)` with `k` minimal.
    Witness(u32),
    /// Every partial vanishes at the coordinate point `e_i`, so no power of `x_i` lies in `J(f)`.
    SingularAtAxis,
    /// No power up to `k_max` lies in `J(f)`.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Isolated,
    NotIsolated,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Isolated => "true",
            Verdict::NotIsolated => "false",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Second-field re-check of the witnesses found over `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub prime: u64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularityReport {
    pub characteristic: Characteristic,
    pub k_max: u32,
    pub outcomes: Vec<VarOutcome>,
    pub verdict: Verdict,
    pub cross_check: Option<CrossCheck>,
}

/// Whether every partial vanishes at `e_i`, i.e. has no pure `x_i`-power term.
fn singular_at_axis(gens: &[(SparsePoly, u64)], i: usize) -> bool {
    gens.iter().all(|(g, _)| {
        g.terms().all(|(e, _)| {
            e.as_slice()
                .iter()
                .enumerate()
                .any(|(j, &x)| j != i && x > 0)
        })
    })
}

fn search_var(
    f: &SparsePoly,
    ws: &WeightSystem,
    ch: Characteristic,
    gens: &[(SparsePoly, u64)],
    i: usize,
    k_max: u32,
) -> VarOutcome {
    if singular_at_axis(gens, i) {
        return VarOutcome::SingularAtAxis;
    }
    let n = f.n_vars();
    for k in 1..=k_max {
        let mut e = vec![0u32; n];
        e[i] = k;
        if graded_membership(&ExpVec::new(e), f, ws, ch) {
            return VarOutcome::Witness(k);
        }
    }
    VarOutcome::Inconclusive
}

/// A random prime in `[2^30, 2^31)` for the second-field re-check.
fn random_large_prime() -> u64 {
    let mut rng = rand::thread_rng();
    loop {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Decides `√J(f) ⊇ (x_0, ..., x_N)` by finding `x_i^k ∈ J(f)` for each `i` with `k ≤ k_max`.
///
/// `k_max` defaults to `(N+1)·d`. Over `Q`, every witness is re-verified modulo
/// a random large prime.
pub fn isolated_singularity_check(
    f: &SparsePoly,
    ws: &WeightSystem,
    ch: Characteristic,
    k_max: Option<u32>,
) -> Result<SingularityReport, SingularityError> {
    let d = weighted_degree_check(f, ws.alpha())?;
    let max_alpha = *ws.alpha().iter().max().expect("weights are nonempty");
    if d <= max_alpha {
        return Err(SingularityError::DegreeTooSmall { d, max_alpha });
    }
    let k_max = k_max.unwrap_or((f.n_vars() as u64 * d) as u32);
    let gens = graded_partials(f, ws.alpha(), ch);
    let outcomes: Vec<VarOutcome> = (0..f.n_vars())
        .into_par_iter()
        .map(|i| search_var(f, ws, ch, &gens, i, k_max))
        .collect();
    let verdict = if outcomes.iter().all(|o| matches!(o, VarOutcome::Witness(_))) {
        Verdict::Isolated
    } else if outcomes.contains(&VarOutcome::SingularAtAxis) {
        Verdict::NotIsolated
    } else {
        Verdict::Inconclusive
    };
    let cross_check = (ch == Characteristic::Zero).then(|| {
        let prime = random_large_prime();
        let agrees = verify_witnesses(f, ws, &outcomes, prime);
        CrossCheck { prime, agrees }
    });
    Ok(SingularityReport {
        characteristic: ch,
        k_max,
        outcomes,
        verdict,
        cross_check,
    })
}

/// Re-checks each witness `x_i^k ∈ J(f)` over `F_p`.
pub fn verify_witnesses(
    f: &SparsePoly,
    ws: &WeightSystem,
    outcomes: &[VarOutcome],
    p: u64,
) -> bool {
    let n = f.n_vars();
    outcomes.par_iter().enumerate().all(|(i, o)| match o {
        VarOutcome::Witness(k) => {
            let mut e = vec![0u32; n];
            e[i] = *k;
            graded_membership(&ExpVec::new(e), f, ws, Characteristic::Prime(p))
        }
        _ => true,
    })
}
