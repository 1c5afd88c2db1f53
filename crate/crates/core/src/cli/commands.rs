//! Handlers for the single-purpose subcommands.

use std::path::PathBuf;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{Builtin, CliError, PolyArgs, Report, RunConfig, Warnings};
use crate::delsarte::{self, DelsarteMatrix};
use crate::formalgroup::{height_of_log, parse_log_coefficients, HeightResult, PowerSeries1};
use crate::frobenius::{self, render_rational, FptKind, FptResult, InferOptions};
use crate::poly::{coeff_in_power, parse_poly, ExpVec, SparsePoly, WeightSystem};
use crate::singularity::{self, Characteristic, VarOutcome};
use crate::stienstra;

pub(crate) fn load_poly(args: &PolyArgs) -> Result<(SparsePoly, Option<WeightSystem>), CliError> {
    let f = parse_poly(&args.poly, args.vars.as_deref())?;
    let ws = match &args.weights {
        Some(alpha) => Some(WeightSystem::for_poly(&f, alpha.clone())?),
        None => None,
    };
    Ok((f, ws))
}

/// The polynomial with its weights, defaulting to unit weights.
pub(crate) fn load_graded(args: &PolyArgs) -> Result<(SparsePoly, WeightSystem), CliError> {
    let (f, ws) = load_poly(args)?;
    let ws = match ws {
        Some(ws) => ws,
        None => WeightSystem::for_poly(&f, vec![1; f.n_vars()])?,
    };
    Ok((f, ws))
}

pub(crate) fn poly_inputs(report: &mut Report, f: &SparsePoly, ws: Option<&WeightSystem>) {
    report.input("poly", f.to_string());
    report.input("vars", f.vars().to_vec());
    if let Some(ws) = ws {
        report.input("weights", ws.alpha().to_vec());
        report.input("degree", ws.d());
    }
}

pub(crate) fn per_prime<T, F>(primes: &[u64], task: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(u64) -> Result<T, CliError> + Sync,
{
    primes.par_iter().map(|&p| task(p)).collect()
}

pub(crate) fn bracket_text(r: &FptResult) -> String {
    format!(
        "[{}, {}]",
        render_rational(&r.bracket.0),
        render_rational(&r.bracket.1)
    )
}

pub(crate) fn fpt_text(r: &FptResult) -> String {
    match (r.kind, &r.value) {
        (FptKind::Exact, Some(v)) => render_rational(v),
        _ => bracket_text(r),
    }
}

pub(crate) fn height_value(h: HeightResult) -> Value {
    match h {
        HeightResult::Finite(r) => json!(r),
        HeightResult::Infinite => json!("inf"),
    }
}

fn big_value(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn tuple_text(e: &[u32]) -> String {
    let parts: Vec<String> = e.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

pub(crate) fn mu(args: &PolyArgs, primes: &[u64], e: u32) -> Result<Report, CliError> {
    let (f, ws) = load_poly(args)?;
    let records = per_prime(primes, |p| Ok(frobenius::mu(&f, ws.as_ref(), p, e)?))?;
    let mut report = Report::new("mu", ["p", "mu"], 1);
    poly_inputs(&mut report, &f, ws.as_ref());
    report.input("exp", e);
    for r in records {
        report.push(vec![json!(r.p), json!(r.mu)]);
    }
    Ok(report)
}

pub(crate) fn fpt(
    args: &PolyArgs,
    primes: &[u64],
    e: Option<u32>,
    cfg: &RunConfig,
) -> Result<Report, CliError> {
    let (f, ws) = load_poly(args)?;
    // Fermat with d > N + 1, where the criterion p ≡ 1 mod d decides fpt = lct
    let fermat = f.fermat_degree().filter(|&d| {
        d as usize > f.n_vars()
            && ws
                .as_ref()
                .is_none_or(|ws| ws.alpha().iter().all(|&a| a == 1))
    });
    let texts = per_prime(primes, |p| {
        if let Some(e) = e {
            return Ok(bracket_text(&frobenius::fpt_bracket(
                &f,
                ws.as_ref(),
                p,
                e,
            )?));
        }
        match (&ws, fermat) {
            (Some(ws), _) if ws.d() == ws.w() => {
                let opts = InferOptions {
                    override_range: cfg.override_range,
                    ..InferOptions::default()
                };
                Ok(fpt_text(&frobenius::fpt_infer(&f, ws, p, opts)?))
            }
            (_, Some(d)) => {
                let verdict = frobenius::fermat_fpt(f.n_vars() as u64 - 1, d as u64, p)?;
                match verdict.fpt() {
                    Some(v) => Ok(render_rational(v)),
                    None => Ok(bracket_text(&frobenius::fpt_bracket(
                        &f,
                        ws.as_ref(),
                        p,
                        2,
                    )?)),
                }
            }
            _ => Ok(bracket_text(&frobenius::fpt_bracket(
                &f,
                ws.as_ref(),
                p,
                2,
            )?)),
        }
    })?;
    let mut report = Report::new("fpt", ["p", "fpt"], 1);
    poly_inputs(&mut report, &f, ws.as_ref());
    if let Some(e) = e {
        report.input("exp", e);
    }
    for (p, t) in primes.iter().zip(texts) {
        report.push(vec![json!(p), json!(t)]);
    }
    Ok(report)
}

pub(crate) fn lct(
    weights: &[u64],
    degree: Option<u64>,
    poly: Option<&str>,
) -> Result<Report, CliError> {
    let ws = match (degree, poly) {
        (Some(d), _) => WeightSystem::new(weights.to_vec(), d)?,
        (None, Some(text)) => WeightSystem::for_poly(&parse_poly(text, None)?, weights.to_vec())?,
        (None, None) => return Err(CliError::Usage("give --degree or --poly".into())),
    };
    let mut report = Report::new("lct", ["lct"], 0);
    report.input("weights", ws.alpha().to_vec());
    report.input("degree", ws.d());
    report.push(vec![json!(render_rational(&frobenius::lct(&ws)))]);
    Ok(report)
}

pub(crate) fn stienstra_height(args: &PolyArgs, primes: &[u64]) -> Result<Report, CliError> {
    let (f, ws) = load_graded(args)?;
    let rows = per_prime(primes, |p| {
        if ws.d() == ws.w() {
            let hit = stienstra::height_one_test(&f, &ws, p)?;
            let b = coeff_in_power(&f, p - 1, &ExpVec::diagonal(f.n_vars(), (p - 1) as u32), p);
            Ok(vec![json!(p), json!(b), json!(hit)])
        } else {
            Ok(vec![
                json!(p),
                Value::Null,
                json!(stienstra::diagonal_height_one(&f, &ws, p)?),
            ])
        }
    })?;
    let mut report = Report::new("stienstra", ["p", "b_mod_p", "height_one"], 1);
    poly_inputs(&mut report, &f, Some(&ws));
    for r in rows {
        report.push(r);
    }
    Ok(report)
}

pub(crate) fn stienstra_table(
    args: &PolyArgs,
    m_max: Option<u64>,
    modulus: Option<u64>,
) -> Result<Report, CliError> {
    let (f, ws) = load_graded(args)?;
    let m_max = m_max.unwrap_or(1 + 3 * ws.d());
    let table = stienstra::log_table(&f, &ws, m_max, modulus)?;
    let mut report = Report::new("stienstra", ["m", "i", "j", "b"], 3);
    poly_inputs(&mut report, &f, Some(&ws));
    report.input("m_max", m_max);
    if let Some(p) = modulus {
        report.input("modulus", p);
    }
    for ((m, i, j), b) in &table.entries {
        let value = match b {
            stienstra::LogCoeff::Exact(x) => big_value(x),
            stienstra::LogCoeff::Residue { value, .. } => json!(value),
        };
        report.push(vec![
            json!(m),
            json!(tuple_text(i.as_slice())),
            json!(tuple_text(j.as_slice())),
            value,
        ]);
    }
    Ok(report)
}

pub(crate) enum LogSource {
    File(PathBuf),
    Builtin(Builtin),
    Poly(PolyArgs),
}

pub(crate) fn fg_height(
    source: &LogSource,
    primes: &[u64],
    h_max: u32,
) -> Result<Report, CliError> {
    let mut report = Report::new("fg-height", ["p", "height"], 1);
    report.input("h_max", h_max);
    let file_b = match source {
        LogSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            report.input("log_file", path.display().to_string());
            Some(parse_log_coefficients(&text)?)
        }
        _ => None,
    };
    let graded = match source {
        LogSource::Poly(args) => {
            let (f, ws) = load_graded(args)?;
            poly_inputs(&mut report, &f, Some(&ws));
            Some((f, ws))
        }
        _ => None,
    };
    if let LogSource::Builtin(b) = source {
        report.input("builtin", format!("{b:?}").to_lowercase());
    }
    let heights = per_prime(primes, |p| {
        let trunc = p
            .checked_pow(h_max)
            .map(|t| t as usize)
            .ok_or_else(|| CliError::Domain(format!("precision {p}^{h_max} is too large")))?;
        let l = match (source, &file_b, &graded) {
            (LogSource::File(_), Some(b), _) => {
                if b.len() < trunc {
                    return Err(CliError::Domain(format!(
                        "the log file gives coefficients up to m = {}, but height up to {h_max} at p = {p} needs m = {trunc}",
                        b.len()
                    )));
                }
                PowerSeries1::from_log_coefficients(b, trunc)
            }
            (LogSource::Builtin(Builtin::Additive), ..) => PowerSeries1::identity(trunc),
            (LogSource::Builtin(Builtin::Multiplicative), ..) => PowerSeries1::log_one_plus(trunc),
            (LogSource::Builtin(Builtin::Honda), ..) => PowerSeries1::honda(p, 2, trunc),
            (LogSource::Poly(_), _, Some((f, ws))) => stienstra::logarithm(f, ws, trunc)?,
            _ => unreachable!("source data prepared above"),
        };
        Ok(height_of_log(&l, p, h_max)?)
    })?;
    for (p, h) in primes.iter().zip(heights) {
        report.push(vec![json!(p), height_value(h)]);
    }
    Ok(report)
}

pub(crate) enum MatrixSource {
    Poly(String, Option<Vec<String>>),
    Matrix(String),
}

pub(crate) fn delsarte(
    source: &MatrixSource,
    weights: &[u64],
    primes: &[u64],
    strict: bool,
    cfg: &RunConfig,
    warnings: &mut Warnings,
) -> Result<Report, CliError> {
    let mut report = Report::new("delsarte", ["p", "e_A", "height"], 1);
    let mat = match source {
        MatrixSource::Poly(text, vars) => {
            let f = parse_poly(text, vars.as_deref())?;
            let ws = WeightSystem::for_poly(&f, weights.to_vec())?;
            poly_inputs(&mut report, &f, Some(&ws));
            delsarte::matrix_from_poly(&f, &ws)?
        }
        MatrixSource::Matrix(text) => {
            DelsarteMatrix::new(delsarte::parse_matrix(text)?, weights.to_vec())?
        }
    };
    report.input("matrix", json!(mat.rows()));
    report.input("weights", mat.alpha().to_vec());
    let ea = delsarte::e_a(&mat)?;
    let e = ea.e_a_u64()?;
    if !mat.is_k3() {
        warnings.push(
            "heights from e_A are proven for K3 surfaces only (four variables, m = sum of weights)"
                .into(),
        );
    }
    for &p in primes {
        let check = delsarte::validate(&mat, p, strict);
        let failed = check.failed();
        let height = if !failed.is_empty() && !cfg.override_range {
            warnings.push(format!(
                "p = {p}: admissibility condition(s) {} fail; pass --override-theorem-range to compute the height anyway",
                condition_list(&failed)
            ));
            Value::Null
        } else {
            if !failed.is_empty() {
                warnings.push(format!(
                    "p = {p}: condition(s) {} fail; height computed under override",
                    condition_list(&failed)
                ));
            }
            match delsarte::goto_height(e, p) {
                Ok(h) => height_value(h),
                Err(err) => {
                    warnings.push(format!("p = {p}: {err}"));
                    Value::Null
                }
            }
        };
        report.push(vec![json!(p), big_value(&ea.e_a), height]);
    }
    Ok(report)
}

pub(crate) fn condition_list(failed: &[u8]) -> String {
    let parts: Vec<String> = failed.iter().map(|c| format!("({c})")).collect();
    parts.join(",")
}

pub(crate) fn singular_check(
    args: &PolyArgs,
    ch: u64,
    k_max: Option<u32>,
    cfg: &RunConfig,
) -> Result<Report, CliError> {
    let (f, ws) = load_graded(args)?;
    let ch = Characteristic::from_u64(ch)?;
    let r = singularity::isolated_singularity_check(&f, &ws, ch, k_max)?;
    let mut columns = vec!["isolated".to_string()];
    columns.extend(f.vars().iter().cloned());
    columns.extend(["witness_check".to_string(), "general_position".to_string()]);
    let mut report = Report::new("singular-check", columns, 0);
    poly_inputs(&mut report, &f, Some(&ws));
    report.input("char", ch.to_string());
    report.input("k_max", r.k_max);
    let mut row = vec![json!(r.verdict.to_string())];
    row.extend(r.outcomes.iter().map(|o| match o {
        VarOutcome::Witness(k) => json!(k),
        VarOutcome::SingularAtAxis => json!("none"),
        VarOutcome::Inconclusive => json!("inconclusive"),
    }));
    row.push(match r.cross_check {
        Some(c) if c.agrees => json!("agrees"),
        Some(_) => json!("disagrees"),
        None => Value::Null,
    });
    row.push(json!(if cfg.attest_general_position {
        "attested"
    } else {
        "not attested"
    }));
    report.push(row);
    Ok(report)
}
