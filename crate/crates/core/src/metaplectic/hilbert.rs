//! Quadratic Hilbert symbols over `Q`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::arith::{factorize, is_prime, legendre, mod_u64, split_valuation};
use crate::error::{Error, Result};

/// A place of `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    Real,
}

impl Place {
    pub fn prime(q: u64) -> Result<Self> {
        if is_prime(q) {
            Ok(Place::Prime(q))
        } else {
            Err(Error::InvalidInput(format!("{q} is not prime")))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(q) => write!(f, "{q}"),
            Place::Real => f.write_str("inf"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "oo" | "real" | "\u{221e}" => Ok(Place::Real),
            t => {
                let q: u64 = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad place '{s}'")))?;
                Place::prime(q)
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `v_p(a)` and `num * den` of the unit part, for nonzero rational `a`.
/// The unit part of `num/den` and `num * den` agree up to squares of units.
fn split(a: &BigRational, p: &BigInt) -> (i64, BigInt) {
    let (vn, un) = split_valuation(a.numer(), p);
    let (vd, ud) = split_valuation(a.denom(), p);
    (i64::from(vn) - i64::from(vd), un * ud)
}

fn sign(odd: bool) -> i8 {
    if odd {
        -1
    } else {
        1
    }
}

/// `(a, b)_v` for nonzero rationals.
pub fn hilbert(a: &BigRational, b: &BigRational, v: Place) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    match v {
        Place::Real => sign(a.is_negative() && b.is_negative()),
        Place::Prime(2) => {
            let two = BigInt::from(2);
            let (al, u) = split(a, &two);
            let (be, w) = split(b, &two);
            let (u, w) = (mod_u64(&u, 8), mod_u64(&w, 8));
            let eps = |x: u64| (x - 1) / 2 % 2;
            let omega = |x: u64| (x * x - 1) / 8 % 2;
            let e = eps(u) * eps(w)
                + (al.rem_euclid(2) as u64) * omega(w)
                + (be.rem_euclid(2) as u64) * omega(u);
            sign(e % 2 == 1)
        }
        Place::Prime(q) => {
            let p = BigInt::from(q);
            let (al, u) = split(a, &p);
            let (be, w) = split(b, &p);
            let mut s = if al.is_odd() && be.is_odd() && (q - 1) / 2 % 2 == 1 {
                -1
            } else {
                1
            };
            if be.is_odd() {
                s *= legendre(&u, &p) as i8;
            }
            if al.is_odd() {
                s *= legendre(&w, &p) as i8;
            }
            s
        }
    }
}

/// Places where `(a, b)_v` can be nontrivial: `inf`, `2` and primes
/// dividing `a` or `b`.
pub fn relevant_places(a: &BigRational, b: &BigRational) -> Vec<Place> {
    let mut primes: Vec<u64> = vec![2];
    for n in [a.numer(), a.denom(), b.numer(), b.denom()] {
        for (q, _) in factorize(n) {
            primes.push(q.to_u64().expect("prime factor fits in u64"));
        }
    }
    primes.sort_unstable();
    primes.dedup();
    let mut out: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
    out.push(Place::Real);
    out
}

/// Product of `(a, b)_v` over all places; always 1.
pub fn hilbert_product(a: &BigRational, b: &BigRational) -> i8 {
    relevant_places(a, b)
        .into_iter()
        .map(|v| hilbert(a, b, v))
        .product()
}

#[cfg(test)]
pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub(crate) fn is_unit_sign(z: i8) -> bool {
    z == 1 || z == -1
}
