use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::parse::parse_int_poly;
use super::poly::{sturm_count, QPoly};
use super::roots::{all_roots_real, isolate_with_multiplicity, real_roots, IsolatedRoot};
use crate::error::{Error, Result};

/// `p(t) = t^3 + a2 t^2 + a1 t + a0` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonicCubic {
    pub a2: BigInt,
    pub a1: BigInt,
    pub a0: BigInt,
}

impl MonicCubic {
    pub fn new(a2: impl Into<BigInt>, a1: impl Into<BigInt>, a0: impl Into<BigInt>) -> Self {
        Self {
            a2: a2.into(),
            a1: a1.into(),
            a0: a0.into(),
        }
    }

    /// Ascending coefficients `[a0, a1, a2, 1]`.
    pub fn coeffs(&self) -> [BigInt; 4] {
        [self.a0.clone(), self.a1.clone(), self.a2.clone(), BigInt::one()]
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::from_ints(self.coeffs())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        ((x + &self.a2) * x + &self.a1) * x + &self.a0
    }

    /// `18 a2 a1 a0 - 4 a2^3 a0 + a2^2 a1^2 - 4 a1^3 - 27 a0^2`.
    pub fn discriminant(&self) -> BigInt {
        let (b, c, d) = (&self.a2, &self.a1, &self.a0);
        BigInt::from(18) * b * c * d - BigInt::from(4) * b * b * b * d + b * b * c * c
            - BigInt::from(4) * c * c * c
            - BigInt::from(27) * d * d
    }

    /// One disjoint interval of width `< eps` per distinct real root.
    pub fn isolate_real_roots(&self, eps: &BigRational) -> Result<Vec<IsolatedRoot>> {
        if !eps.is_positive() {
            return Err(Error::InvalidInput("eps must be positive".into()));
        }
        Ok(isolate_with_multiplicity(&self.to_qpoly(), eps))
    }

    /// Three real roots counted with multiplicity.
    pub fn is_totally_real(&self) -> bool {
        all_roots_real(&self.to_qpoly())
    }

    /// The least `B >= 0` with `|r| <= B` for every real root `r`.
    pub fn max_abs_root_bound(&self) -> BigInt {
        let f = self.to_qpoly().squarefree_part();
        let roots = real_roots(&f, &BigRational::one());
        let upper = roots
            .iter()
            .map(|r| r.interval().abs_max().ceil().to_integer())
            .max()
            .unwrap_or_else(BigInt::zero);
        let seq = f.sturm_sequence();
        let c = f
            .coeffs()
            .iter()
            .map(|x| x.abs())
            .fold(BigRational::one(), |a, x| a + x);
        let outside = |k: &BigInt| -> usize {
            let k = BigRational::from_integer(k.clone());
            let right = sturm_count(&seq, &k, &c);
            let nk = -k;
            let mut left = sturm_count(&seq, &-c.clone(), &nk);
            if f.eval(&nk).is_zero() {
                left -= 1;
            }
            right + left
        };
        let mut b = upper;
        while b.is_positive() && outside(&(&b - 1)) == 0 {
            b -= 1;
        }
        b
    }

    /// Number of distinct roots (3 for étale cubics).
    pub fn is_squarefree(&self) -> bool {
        !self.discriminant().is_zero()
    }
}

impl fmt::Display for MonicCubic {
    /// Canonical form, e.g. `t^3 - t^2 - 2*t + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^3")?;
        for (c, mono) in [(&self.a2, "t^2"), (&self.a1, "t"), (&self.a0, "")] {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { '-' } else { '+' };
            let m = c.abs();
            match (m.is_one(), mono.is_empty()) {
                (_, true) => write!(f, " {sign} {m}")?,
                (true, false) => write!(f, " {sign} {mono}")?,
                (false, false) => write!(f, " {sign} {m}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for MonicCubic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let c = parse_int_poly(s)?;
        if c.len() != 4 || !c[3].is_one() {
            return Err(Error::Parse(format!("'{s}' is not a monic cubic")));
        }
        Ok(Self::new(c[2].clone(), c[1].clone(), c[0].clone()))
    }
}

impl Serialize for MonicCubic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MonicCubic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
