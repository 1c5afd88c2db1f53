//! Property checks shared by the `properties` and `acceptance` targets.
//!
//! Each check runs on a fixed-seed proptest runner and returns the first
//! counterexample as an error message.
#![allow(dead_code)]

use fpt_height::delsarte::{adjugate_det, goto_height};
use fpt_height::formalgroup::{group_law_from_log, HeightResult, MultiSeries, PowerSeries1};
use fpt_height::frobenius::{mu, mu_upper_bound, FrobeniusOracle};
use fpt_height::poly::{
    coeff_in_power, coeff_in_power_exact, multinomial_exact, multinomial_mod_p, parse_poly, ExpVec,
    SparsePoly, WeightSystem,
};
use fpt_height::stienstra::fermat_log_coeff;
use fpt_height::{BigInt, BigRational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub type Check = Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config::with_cases(cases),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Check
where
    S::Value: std::fmt::Debug,
{
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn residue(x: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    u64::try_from(((x % &m) + &m) % &m).expect("residue fits")
}

fn one_poly(f: &SparsePoly) -> SparsePoly {
    SparsePoly::from_terms(
        f.vars().to_vec(),
        [(ExpVec::zeros(f.n_vars()), BigInt::one())],
    )
}

/// Up to four terms in one to four variables with exponents at most 6.
fn small_poly() -> impl Strategy<Value = SparsePoly> {
    (1usize..=4).prop_flat_map(|n_vars| {
        let term = (prop::collection::vec(0u32..=6, n_vars), -3i64..=3);
        prop::collection::vec(term, 1..=4).prop_map(move |terms| {
            SparsePoly::from_terms(
                SparsePoly::default_vars(n_vars),
                terms
                    .into_iter()
                    .map(|(e, c)| (ExpVec::new(e), BigInt::from(c))),
            )
        })
    })
}

/// A polynomial, a power `n ≤ 6`, and a target that is usually a sum of `n`
/// term exponents (so typically a nonzero coefficient) and otherwise arbitrary.
fn power_case() -> impl Strategy<Value = (SparsePoly, u64, ExpVec)> {
    (small_poly(), 0u64..=6).prop_flat_map(|(f, n)| {
        let k = f.n_vars();
        let mut exps: Vec<ExpVec> = f.terms().map(|(e, _)| e.clone()).collect();
        if exps.is_empty() {
            // zero polynomial after cancellation
            exps.push(ExpVec::zeros(k));
        }
        let picks = prop::collection::vec(prop::sample::select(exps.clone()), n as usize);
        let hit = picks.prop_map(move |ps| ps.iter().fold(ExpVec::zeros(k), |acc, e| acc.add(e)));
        let any = prop::collection::vec(0u32..=36, k).prop_map(ExpVec::new);
        let target = prop_oneof![3 => hit, 1 => any];
        (Just(f), Just(n), target)
    })
}

/// Power coefficients, exact and mod `p`, against repeated multiplication.
pub fn coeff_in_power_vs_naive(cases: u32) -> Check {
    let strategy = (power_case(), prop::sample::select(vec![2u64, 3, 5, 7, 11]));
    run(cases, strategy, |((f, n, target), p)| {
        let expected = (0..n)
            .fold(one_poly(&f), |acc, _| acc.mul(&f))
            .coeff(&target);
        prop_assert_eq!(coeff_in_power_exact(&f, n, &target), expected.clone());
        prop_assert_eq!(coeff_in_power(&f, n, &target, p), residue(&expected, p));
        Ok(())
    })
}

/// Partitions of `n` into positive parts, largest first.
fn partitions(n: u64, max: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (1..=n.min(max))
        .rev()
        .flat_map(|first| {
            partitions(n - first, first)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

/// Every part list with `n ≤ 12` against exact factorials. A multinomial is
/// symmetric in its parts and unchanged by zero parts, so the partitions of
/// `n`, each also with a zero appended, cover all part lists.
pub fn multinomial_exhaustive() -> Check {
    for p in [2u64, 3, 5, 7, 11] {
        for n in 0..=12u64 {
            for base in partitions(n, n) {
                let mut padded = base.clone();
                padded.push(0);
                for parts in [base, padded] {
                    let exact = multinomial_exact(n, &parts).map_err(|e| e.to_string())?;
                    let r = multinomial_mod_p(n, &parts, p).map_err(|e| e.to_string())?;
                    let pk = BigInt::from(p).pow(r.valuation as u32);
                    let unit = &exact / &pk;
                    let valuation_ok =
                        (&exact % &pk).is_zero() && !(&unit % BigInt::from(p)).is_zero();
                    let expected = if r.valuation == 0 {
                        residue(&exact, p)
                    } else {
                        0
                    };
                    ensure(valuation_ok && r.residue == expected, || {
                        format!("n={n} parts={parts:?} p={p}: got {r:?} for {exact}")
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn unit_series(trunc: usize) -> impl Strategy<Value = PowerSeries1> {
    let lead = rational().prop_filter("linear coefficient must be invertible", |c| !c.is_zero());
    (lead, prop::collection::vec(rational(), trunc - 1)).prop_map(|(c1, rest)| {
        let mut coeffs = vec![BigRational::zero(), c1];
        coeffs.extend(rest);
        PowerSeries1::new(coeffs)
    })
}

/// `s ∘ s⁻¹ = s⁻¹ ∘ s = τ` modulo `τ^13`.
pub fn series_round_trips(cases: u32) -> Check {
    run(cases, unit_series(12), |s| {
        let inv = s
            .reversion()
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(s.compose(&inv), PowerSeries1::identity(12));
        prop_assert_eq!(inv.compose(&s), PowerSeries1::identity(12));
        Ok(())
    })
}

/// Laws built from random integral logarithms are associative and commutative modulo degree 8.
pub fn group_law_associativity(cases: u32) -> Check {
    let d = 7;
    run(cases, prop::collection::vec(-3i64..=3, 6), |tail| {
        let mut coeffs = vec![0, 1];
        coeffs.extend(tail);
        let f = group_law_from_log(&PowerSeries1::from_integers(&coeffs), d)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let x = MultiSeries::variable(3, d, 0);
        let y = MultiSeries::variable(3, d, 1);
        let z = MultiSeries::variable(3, d, 2);
        prop_assert_eq!(f.eval(&f.eval(&x, &y), &z), f.eval(&x, &f.eval(&y, &z)));
        prop_assert_eq!(f.eval(&x, &y), f.eval(&y, &x));
        Ok(())
    })
}

fn square_matrix() -> impl Strategy<Value = Vec<Vec<BigInt>>> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec(
            prop::collection::vec((-9i64..=9).prop_map(BigInt::from), n),
            n,
        )
    })
}

/// `adj(A)·A = det(A)·I` on random integer matrices up to 5×5.
#[allow(clippy::needless_range_loop)]
pub fn adjugate_identity(cases: u32) -> Check {
    run(cases, square_matrix(), |a| {
        let n = a.len();
        let (adj, det) = adjugate_det(&a);
        for i in 0..n {
            for j in 0..n {
                let v: BigInt = (0..n).map(|k| &adj[i][k] * &a[k][j]).sum();
                let expected = if i == j { det.clone() } else { BigInt::zero() };
                prop_assert_eq!(v, expected, "entry ({}, {})", i, j);
            }
        }
        Ok(())
    })
}

/// The worked inputs with the primes they are tabulated at.
pub fn example_inputs() -> Vec<(SparsePoly, WeightSystem, Vec<u64>)> {
    let cases = [
        (
            "x^2+y^5+z^5+w^10",
            vec![5, 2, 2, 1],
            vec![3, 7, 11, 13, 17, 19],
        ),
        (
            "x^8*y+y^6*z+z^3+x*w^2",
            vec![1, 1, 3, 4],
            vec![3, 5, 7, 11, 13, 17, 19],
        ),
        ("x^4+y^4+z^4", vec![1, 1, 1], vec![3, 5, 7, 11, 13]),
        ("x^2+y^2", vec![1, 1], vec![3, 5, 7]),
    ];
    cases
        .into_iter()
        .map(|(text, alpha, primes)| {
            let f = parse_poly(text, None).expect("example parses");
            let ws = WeightSystem::for_poly(&f, alpha).expect("example is quasi-homogeneous");
            (f, ws, primes)
        })
        .collect()
}

/// `p·ν(p) ≤ ν(p²) < p·μ(p)` on every example input.
pub fn nu_monotonicity() -> Check {
    for (f, ws, primes) in example_inputs() {
        for p in primes {
            let nu1 = mu(&f, Some(&ws), p, 1).map_err(|e| e.to_string())?.nu();
            let nu2 = mu(&f, Some(&ws), p, 2).map_err(|e| e.to_string())?.nu();
            ensure(p * nu1 <= nu2 && nu2 < p * (nu1 + 1), || {
                format!("{f} at p={p}: ν(p)={nu1}, ν(p²)={nu2}")
            })?;
        }
    }
    Ok(())
}

/// Every search cap lies in the ideal and respects the weighted bound, and
/// every recorded probe is on the correct side of `μ`.
pub fn cap_soundness() -> Check {
    for (f, ws, primes) in example_inputs() {
        for p in primes {
            for e in [1, 2] {
                let rec = mu(&f, Some(&ws), p, e).map_err(|e| e.to_string())?;
                ensure(
                    rec.mu <= rec.cap && rec.cap <= mu_upper_bound(ws.w(), ws.d(), rec.q),
                    || format!("{f} p={p} e={e}: μ={} cap={}", rec.mu, rec.cap),
                )?;
                for pr in &rec.probes {
                    ensure(pr.in_ideal == (pr.n >= rec.mu), || {
                        format!("{f} p={p} e={e}: probe {pr:?} vs μ={}", rec.mu)
                    })?;
                }
            }
        }
    }
    Ok(())
}

/// Whether every monomial of `f^n mod p` has an exponent `≥ q`, by full expansion.
fn in_frobenius_power_naive(f: &SparsePoly, n: u64, p: u64, q: u64) -> bool {
    let mut acc = one_poly(f);
    for _ in 0..n {
        // monomials already in the ideal stay there
        let next = acc.mul(f).reduce_mod(p);
        let kept = next
            .terms()
            .filter(|(e, _)| e.as_slice().iter().all(|&x| (x as u64) < q));
        acc = SparsePoly::from_terms(f.vars().to_vec(), kept.map(|(e, c)| (e.clone(), c.clone())));
    }
    acc.is_zero()
}

/// The pruned membership oracle agrees with full expansion around `μ`, for `p ≤ 7`.
pub fn oracle_vs_expansion() -> Check {
    for (f, ws, primes) in example_inputs() {
        for &p in primes.iter().filter(|&&p| p <= 7) {
            let oracle = FrobeniusOracle::new(&f, p).map_err(|e| e.to_string())?;
            for e in [1, 2] {
                let rec = mu(&f, Some(&ws), p, e).map_err(|e| e.to_string())?;
                for n in rec.mu.saturating_sub(2)..=rec.mu + 1 {
                    let (fast, slow) = (
                        oracle.contains(n, rec.q),
                        in_frobenius_power_naive(&f, n, p, rec.q),
                    );
                    ensure(fast == slow, || {
                        format!(
                            "{f} p={p} q={} n={n}: oracle {fast}, expansion {slow}",
                            rec.q
                        )
                    })?;
                }
            }
        }
    }
    Ok(())
}

/// Heights for `e_A = 32` depend only on `p mod 32`; checked for all odd primes below 100.
pub fn goto_residue_classes() -> Check {
    let expected = |r: u64| match r {
        1 => HeightResult::Finite(1),
        15 | 17 => HeightResult::Finite(2),
        7 | 9 | 23 | 25 => HeightResult::Finite(4),
        31 => HeightResult::Infinite,
        _ => HeightResult::Finite(8),
    };
    for p in (3..100u64).filter(|&p| (2..p).take_while(|k| k * k <= p).all(|k| p % k != 0)) {
        let h = goto_height(32, p).map_err(|e| e.to_string())?;
        ensure(h == expected(p % 32), || format!("p={p}: height {h}"))?;
    }
    ensure(goto_height(32, 2).is_err(), || {
        "p = 2 divides e_A and must be rejected".into()
    })
}

/// Fermat diagonal coefficients `b_{ad,i,i} = (ad)!/∏(a·i_r)!`, exactly and mod `p`.
pub fn fermat_diagonal_factorials(cases: u32) -> Check {
    let strategy = (
        1u64..=3,
        prop::collection::vec(1u32..=3, 3),
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
    );
    run(cases, strategy, |(a, i, p)| {
        let d: u64 = i.iter().map(|&x| x as u64).sum();
        let f = SparsePoly::fermat(i.len(), d as u32);
        // b_{ad,i,i} is the coefficient of x^{ad·i} in f^{ad}
        let target = ExpVec::new(i.iter().map(|&x| x * (a * d) as u32).collect());
        let exact = coeff_in_power_exact(&f, a * d, &target);
        let parts: Vec<u64> = i.iter().map(|&x| a * x as u64).collect();
        prop_assert_eq!(exact.clone(), multinomial_exact(a * d, &parts).unwrap());
        prop_assert!(exact.is_positive());
        let r = fermat_log_coeff(a, d, &i, p).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(
            r.residue,
            if r.valuation == 0 {
                residue(&exact, p)
            } else {
                0
            }
        );
        Ok(())
    })
}
