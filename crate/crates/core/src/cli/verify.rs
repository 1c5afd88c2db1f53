//! Side-by-side invariants per prime: `μ(p)`, `μ(p²)`, fpt, and heights from
//! the logarithm and from `e_A`, with a consistency verdict.
//!
//! Two inputs are supported: `d = w`, where fpt = 1 is compared with height
//! one, and Fermat polynomials with `d > N + 1`, where fpt = lct
//! (`p ≡ 1 mod d`) is compared with every diagonal factor having height one.

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::commands::{bracket_text, condition_list, height_value, load_graded, poly_inputs};
use super::{CliError, PolyArgs, Report, RunConfig, Warnings};
use crate::delsarte::{self, DelsarteMatrix, EAResult};
use crate::formalgroup::HeightResult;
use crate::frobenius::{self, mu_with, render_rational, FrobeniusError, FrobeniusOracle};
use crate::poly::{SparsePoly, WeightSystem};
use crate::stienstra;

/// One prime's invariants. `None` marks a value that was not computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyRow {
    pub p: u64,
    pub mu_p: Option<u64>,
    pub mu_p2: Option<u64>,
    /// Exact `n/d`, or a bracket `[lo, hi]`.
    pub fpt: Option<String>,
    pub height_stienstra: Option<bool>,
    pub height_goto: Option<HeightResult>,
    pub consistent: Option<bool>,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    CalabiYau,
    Fermat { d: u64 },
}

struct Setup<'a> {
    f: &'a SparsePoly,
    ws: &'a WeightSystem,
    mode: Mode,
    delsarte: Option<(DelsarteMatrix, u64)>,
    override_range: bool,
}

/// Computes one row per prime, concurrently on the current rayon pool, in prime order.
pub fn verify_rows(
    f: &SparsePoly,
    ws: &WeightSystem,
    primes: &[u64],
    override_range: bool,
) -> Result<(Vec<VerifyRow>, Warnings), CliError> {
    let mut warnings = Warnings::new();
    let mode = if ws.d() == ws.w() {
        Mode::CalabiYau
    } else {
        match f.fermat_degree() {
            Some(d) if ws.alpha().iter().all(|&a| a == 1) && d as usize > f.n_vars() => Mode::Fermat { d: d as u64 },
            _ => {
                return Err(CliError::Domain(format!(
                    "verify needs d = w (got d = {}, w = {}) or a Fermat polynomial of degree d > N + 1",
                    ws.d(),
                    ws.w()
                )))
            }
        }
    };
    let delsarte = match delsarte::matrix_from_poly(f, ws) {
        Ok(mat) if mat.is_k3() => {
            let EAResult { e_a, .. } = delsarte::e_a(&mat)?;
            let e = u64::try_from(&e_a)
                .map_err(|_| CliError::Domain(format!("e_A = {e_a} is too large")))?;
            Some((mat, e))
        }
        Ok(_) => {
            warnings.push("not a K3 Delsarte surface (four variables, m = sum of weights); height_goto not computed".into());
            None
        }
        Err(e) => {
            warnings.push(format!(
                "no Delsarte matrix ({e}); height_goto not computed"
            ));
            None
        }
    };
    let setup = Setup {
        f,
        ws,
        mode,
        delsarte,
        override_range,
    };
    let rows = primes.par_iter().map(|&p| row(&setup, p)).collect();
    Ok((rows, warnings))
}

fn row(s: &Setup, p: u64) -> VerifyRow {
    let mut out = VerifyRow {
        p,
        mu_p: None,
        mu_p2: None,
        fpt: None,
        height_stienstra: None,
        height_goto: None,
        consistent: None,
        note: String::new(),
    };
    let mut notes: Vec<String> = Vec::new();
    if let Err(e) = fill(s, p, &mut out, &mut notes) {
        notes.push(format!("error: {e}"));
    }
    out.note = notes.join("; ");
    out
}

fn fill(s: &Setup, p: u64, out: &mut VerifyRow, notes: &mut Vec<String>) -> Result<(), CliError> {
    let oracle = FrobeniusOracle::new(s.f, p)?;
    let grading = Some((s.ws.w(), s.ws.d()));
    let rec1 = mu_with(&oracle, grading, 1)?;
    let rec2 = mu_with(&oracle, grading, 2)?;
    out.mu_p = Some(rec1.mu);
    out.mu_p2 = Some(rec2.mu);
    let bracket = bracket_text(&frobenius::bracket_from_record(rec2.clone()));

    // Whether fpt equals lct, when known; and whether p is in the proven range.
    let (fpt_is_lct, in_range) = match s.mode {
        Mode::CalabiYau => {
            let bound = s.ws.theorem_prime_bound();
            let below = p < bound;
            if below {
                notes.push(format!("outside theorem range p ≥ {bound}"));
            }
            if below && !s.override_range {
                out.fpt = Some(bracket);
                (None, false)
            } else {
                if below {
                    notes.push("assumed form 1 − a/p".into());
                }
                match frobenius::infer_from_record(rec2, s.ws, below) {
                    Ok(r) => {
                        let v = r.value.expect("inferred results carry a value");
                        out.fpt = Some(render_rational(&v));
                        (Some(v == BigRational::one()), !below)
                    }
                    Err(e @ FrobeniusError::NoCandidate { .. }) => {
                        notes.push(e.to_string());
                        out.fpt = Some(bracket);
                        (None, !below)
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Mode::Fermat { d } => match frobenius::fermat_fpt(s.f.n_vars() as u64 - 1, d, p) {
            Ok(v) => {
                out.fpt = Some(match v.fpt() {
                    Some(x) => render_rational(x),
                    None => bracket,
                });
                (Some(v.criterion), true)
            }
            Err(e) => {
                notes.push(e.to_string());
                out.fpt = Some(bracket);
                (None, false)
            }
        },
    };

    out.height_stienstra = Some(match s.mode {
        Mode::CalabiYau => stienstra::height_one_test(s.f, s.ws, p)?,
        Mode::Fermat { .. } => stienstra::diagonal_height_one(s.f, s.ws, p)?,
    });

    if let Some((mat, e)) = &s.delsarte {
        let failed = delsarte::validate(mat, p, false).failed();
        if e % p == 0 {
            notes.push(format!("p divides e_A = {e}"));
        } else if !failed.is_empty() && !s.override_range {
            notes.push(format!(
                "Delsarte condition(s) {} fail",
                condition_list(&failed)
            ));
        } else {
            if !failed.is_empty() {
                notes.push(format!(
                    "Delsarte condition(s) {} fail; height computed under override",
                    condition_list(&failed)
                ));
            }
            out.height_goto = Some(delsarte::goto_height(*e, p)?);
        }
    }

    if in_range || s.override_range {
        let flags: Vec<bool> = [
            fpt_is_lct,
            out.height_stienstra,
            out.height_goto.map(|h| h == HeightResult::Finite(1)),
        ]
        .into_iter()
        .flatten()
        .collect();
        if flags.len() >= 2 {
            out.consistent = Some(flags.iter().all(|&b| b == flags[0]));
        }
    }
    Ok(())
}

pub(crate) fn verify(
    args: &PolyArgs,
    primes: &[u64],
    cfg: &RunConfig,
    warnings: &mut Warnings,
) -> Result<Report, CliError> {
    let (f, ws) = load_graded(args)?;
    let (rows, mut w) = verify_rows(&f, &ws, primes, cfg.override_range)?;
    warnings.append(&mut w);
    let mut report = Report::new(
        "verify",
        [
            "p",
            "mu_p",
            "mu_p2",
            "fpt",
            "height_stienstra",
            "height_goto",
            "consistent",
            "note",
        ],
        1,
    );
    poly_inputs(&mut report, &f, Some(&ws));
    report.input("override_theorem_range", cfg.override_range);
    let opt = |v: Option<Value>| v.unwrap_or(Value::Null);
    for r in rows {
        report.push(vec![
            json!(r.p),
            opt(r.mu_p.map(|x| json!(x))),
            opt(r.mu_p2.map(|x| json!(x))),
            opt(r.fpt.map(|x| json!(x))),
            opt(r.height_stienstra.map(|x| json!(x))),
            opt(r.height_goto.map(height_value)),
            opt(r.consistent.map(|x| json!(x))),
            json!(r.note),
        ]);
    }
    Ok(report)
}
