//! Small-integer modular helpers shared by the polynomial, Frobenius and
//! Delsarte code. Moduli are `u64`; products go through `u128`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let eg = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if eg.gcd != 1 {
        return None;
    }
    Some(eg.x.rem_euclid(m as i128) as u64)
}

/// Reduces an arbitrary-precision integer into `[0, m)`.
pub fn reduce_big(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

/// Residue of `num/den` modulo `m`, or `None` when `den` is not invertible.
pub fn reduce_ratio(num: &BigInt, den: &BigInt, m: u64) -> Option<u64> {
    let d = reduce_big(den, m);
    let inv = inv_mod(d, m)?;
    Some(mul_mod(reduce_big(num, m), inv, m))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in the closed interval `[lo, hi]`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Multiplicative order of `a` modulo `m`; `None` unless `gcd(a, m) = 1`.
pub fn multiplicative_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if a.gcd(&m) != 1 {
        return None;
    }
    let a = a % m;
    let mut x = a;
    let mut k = 1u64;
    while x != 1 {
        x = mul_mod(x, a, m);
        k += 1;
    }
    Some(k)
}

/// Exact ceiling of `num/den` for non-negative `num` and positive `den`.
#[inline]
pub fn ceil_div(num: u64, den: u64) -> u64 {
    num.div_ceil(den)
}

/// gcd of a list of big integers, always non-negative.
pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::from(0), |g, x| g.gcd(x)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_between(1, 20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(!is_prime(1));
        assert!(is_prime(2_147_483_647));
    }

    #[test]
    fn orders() {
        assert_eq!(multiplicative_order(3, 32), Some(8));
        assert_eq!(multiplicative_order(17, 32), Some(2));
        assert_eq!(multiplicative_order(11, 10), Some(1));
        assert_eq!(multiplicative_order(2, 10), None);
    }

    #[test]
    fn inverses_and_ratios() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(0, 7), None);
        assert_eq!(
            reduce_ratio(&BigInt::from(7560), &BigInt::from(1), 11),
            Some(3)
        );
        assert_eq!(
            reduce_ratio(&BigInt::from(-1), &BigInt::from(2), 5),
            Some(2)
        );
        assert_eq!(reduce_ratio(&BigInt::from(1), &BigInt::from(11), 11), None);
    }

    #[test]
    fn ceilings() {
        assert_eq!(ceil_div(101, 10), 11);
        assert_eq!(ceil_div(19, 4), 5);
        assert_eq!(ceil_div(1, 7), 1);
    }
}
