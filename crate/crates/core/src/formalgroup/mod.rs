//! One-dimensional formal groups given by a logarithm.
//!
//! The `[p]`-series is `l^{-1}(p · l(x))`. When it has `p`-integral
//! coefficients its reduction is either zero to the working precision or
//! starts at `x^{p^h}`, and `h` is the height.

mod law;
mod series;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use law::{group_law_from_log, GroupLaw2, MultiSeries};
pub use series::{PowerSeries1, ReducedSeries};

use crate::arith::is_prime;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series has a nonzero constant term")]
    NonzeroConstant,
    #[error("linear coefficient is zero, series is not invertible")]
    NonUnitLinear,
    #[error("logarithm must start with τ (linear coefficient 1)")]
    NotNormalized,
    #[error("coefficient of degree {degree} is not {p}-integral")]
    NotPIntegral { p: u64, degree: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("lowest nonzero term has degree {0}, which is not a positive power of p")]
    NotPPower(usize),
    #[error("precision {got} is below p^h_max = {needed}")]
    PrecisionTooLow { needed: u64, got: usize },
    #[error("no heights given")]
    EmptyProduct,
    #[error("line {line}: {message}")]
    LogFile { line: usize, message: String },
}

/// Height of a one-dimensional formal group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HeightResult {
    Finite(u32),
    Infinite,
}

impl HeightResult {
    pub fn is_finite(&self) -> bool {
        matches!(self, HeightResult::Finite(_))
    }
}

impl fmt::Display for HeightResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightResult::Finite(h) => write!(f, "{h}"),
            HeightResult::Infinite => f.write_str("inf"),
        }
    }
}

/// Height of a product of formal groups: finite heights add, `inf` absorbs.
pub fn product_height(heights: &[HeightResult]) -> Result<HeightResult, SeriesError> {
    if heights.is_empty() {
        return Err(SeriesError::EmptyProduct);
    }
    let mut total = 0u32;
    for h in heights {
        match h {
            HeightResult::Finite(k) => total += k,
            HeightResult::Infinite => return Ok(HeightResult::Infinite),
        }
    }
    Ok(HeightResult::Finite(total))
}

/// `[p](x) = l^{-1}(p · l(x))` modulo `(p, x^{D+1})`, with `D = trunc`.
pub fn p_series(l: &PowerSeries1, p: u64, trunc: usize) -> Result<ReducedSeries, SeriesError> {
    if !is_prime(p) {
        return Err(SeriesError::NotPrime(p));
    }
    let l = l.truncate(trunc);
    if l.coeff(1) != BigRational::from_integer(BigInt::from(1)) {
        return Err(SeriesError::NotNormalized);
    }
    let inv = l.reversion()?;
    let scaled = l.scale(&BigRational::from_integer(BigInt::from(p)));
    inv.compose(&scaled).reduce_mod(p)
}

/// Height read off a reduced `[p]`-series.
///
/// A series that vanishes up to degree `p^{h_max}` reports `Infinite`; that
/// requires precision at least `p^{h_max}`.
pub fn height_from_p_series(s: &ReducedSeries, h_max: u32) -> Result<HeightResult, SeriesError> {
    let p = s.prime();
    match s.lowest_term() {
        Some((k, _)) => {
            let mut pk = p as usize;
            let mut h = 1u32;
            while pk < k {
                pk = pk.saturating_mul(p as usize);
                h += 1;
            }
            if pk == k {
                Ok(HeightResult::Finite(h))
            } else {
                Err(SeriesError::NotPPower(k))
            }
        }
        None => {
            let needed = p.saturating_pow(h_max);
            if (s.trunc() as u64) < needed {
                Err(SeriesError::PrecisionTooLow {
                    needed,
                    got: s.trunc(),
                })
            } else {
                Ok(HeightResult::Infinite)
            }
        }
    }
}

/// Height of the formal group with logarithm `l` at `p`, truncating at `p^{h_max}`.
pub fn height_of_log(l: &PowerSeries1, p: u64, h_max: u32) -> Result<HeightResult, SeriesError> {
    let trunc = p
        .checked_pow(h_max)
        .map(|t| t as usize)
        .ok_or(SeriesError::PrecisionTooLow {
            needed: u64::MAX,
            got: l.trunc(),
        })?;
    if l.trunc() < trunc {
        return Err(SeriesError::PrecisionTooLow {
            needed: trunc as u64,
            got: l.trunc(),
        });
    }
    height_from_p_series(&p_series(l, p, trunc)?, h_max)
}

/// Parses logarithm coefficients, one `m b_{m−1}` pair per line.
///
/// Indices must be positive and strictly increasing. Missing indices mean
/// `b = 0`. Blank lines and lines starting with `#` are skipped. Returns
/// `b_0, ..., b_{M−1}` where `M` is the last index.
pub fn parse_log_coefficients(text: &str) -> Result<Vec<BigInt>, SeriesError> {
    let mut out: Vec<BigInt> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| SeriesError::LogFile {
            line: idx + 1,
            message,
        };
        let mut parts = line.split_whitespace();
        let (Some(m), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected two fields `m b`".into()));
        };
        let m: usize = m.parse().map_err(|_| err(format!("bad index `{m}`")))?;
        let b: BigInt = b
            .parse()
            .map_err(|_| err(format!("bad coefficient `{b}`")))?;
        if m == 0 {
            return Err(err("index must be at least 1".into()));
        }
        if m <= out.len() {
            return Err(err(format!("index {m} is not increasing")));
        }
        out.resize(m - 1, BigInt::from(0));
        out.push(b);
    }
    Ok(out)
}
