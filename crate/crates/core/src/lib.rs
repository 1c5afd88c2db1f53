//! Exact computations around quasi-homogeneous polynomials over the integers
//! and their reductions modulo primes:
//!
//! * [`frobenius`]: `μ_f(p^e)`, F-pure threshold brackets and `1 − a/p`
//!   inference, log canonical thresholds, Fermat criteria.
//! * [`stienstra`]: logarithm coefficients `b_{m−1,i,j}` of the Artin–Mazur
//!   formal group of a hypersurface and the height-one test.
//! * [`formalgroup`]: truncated power series, group laws from logarithms,
//!   `[p]`-series and heights.
//! * [`delsarte`]: exponent matrices of weighted Delsarte surfaces, the
//!   invariant `e_A` and the resulting heights.
//! * [`singularity`]: Jacobian ideals and the isolated-singularity check.
//! * [`cli`]: the `fpt-height` command line.
//!
//! All arithmetic is exact.

pub mod arith;
pub mod cli;
pub mod delsarte;
pub mod formalgroup;
pub mod frobenius;
mod linalg;
pub mod poly;
pub mod singularity;
pub mod stienstra;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
