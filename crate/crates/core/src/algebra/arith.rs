//! Small integer utilities shared across modules.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `p`-adic valuation of a nonzero integer, and the unit part `n / p^v`.
pub fn split_valuation(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    assert!(!n.is_zero(), "valuation of zero");
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return (v, m);
        }
        m = q;
        v += 1;
    }
}

/// Prime factorization of `|n|` by trial division, as `(prime, exponent)` pairs.
///
/// Intended for the modest sizes that occur here (discriminants of small
/// cubics, entries of sampled matrices).
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            let mut e = 0;
            while (&n % &d).is_zero() {
                n /= &d;
                e += 1;
            }
            out.push((d.clone(), e));
        }
        d += if d == BigInt::from(2) { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Integer square root of a nonnegative integer, if it is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Legendre symbol `(a / p)` for an odd prime `p`: -1, 0 or 1.
pub fn legendre(a: &BigInt, p: &BigInt) -> i32 {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - BigInt::one()) / 2;
    let r = a.modpow(&e, p);
    if r.is_one() {
        1
    } else {
        -1
    }
}

pub fn sign_of(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// `n mod m` as a `u64` in `[0, m)`.
pub fn mod_u64(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits in u64")
}

/// Ceiling of a rational `num/den` with `den > 0`.
pub fn ceil_div(num: &BigInt, den: &BigInt) -> BigInt {
    num.div_ceil(den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization() {
        let f = factorize(&BigInt::from(-108));
        assert_eq!(f, vec![(BigInt::from(2), 2), (BigInt::from(3), 3)]);
        assert_eq!(factorize(&BigInt::from(1)), vec![]);
        assert_eq!(factorize(&BigInt::from(49)), vec![(BigInt::from(7), 2)]);
    }

    #[test]
    fn legendre_symbols() {
        let p = BigInt::from(7);
        let squares: Vec<i32> = (0..7).map(|a| legendre(&BigInt::from(a), &p)).collect();
        assert_eq!(squares, vec![0, 1, 1, -1, 1, -1, -1]);
    }

    #[test]
    fn valuations() {
        let (v, u) = split_valuation(&BigInt::from(-24), &BigInt::from(2));
        assert_eq!((v, u), (3, BigInt::from(-3)));
    }

    #[test]
    fn square_roots() {
        assert_eq!(exact_sqrt(&BigInt::from(49)), Some(BigInt::from(7)));
        assert_eq!(exact_sqrt(&BigInt::from(50)), None);
        assert_eq!(exact_sqrt(&BigInt::from(-4)), None);
    }
}
