//! Binary cubic forms `f(u, v) = a u^3 + b u^2 v + c u v^2 + d v^3`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{all_roots_real, MonicCubic, QPoly};
use crate::error::{Error, Result};
use crate::jordan::WVector;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryCubic {
    #[serde(with = "crate::serde_util::bigint")]
    pub a: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub b: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub c: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub d: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Psd {
    Psd,
    NotPsd,
}

impl fmt::Display for Psd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Psd::Psd => "PSD",
            Psd::NotPsd => "NOT_PSD",
        })
    }
}

impl BinaryCubic {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// `f(z, 1) = a z^3 + b z^2 + c z + d`.
    pub fn dehomogenize(&self) -> QPoly {
        QPoly::from_ints([self.d.clone(), self.c.clone(), self.b.clone(), self.a.clone()])
    }

    /// The form with `u` and `v` exchanged.
    pub fn reversed(&self) -> Self {
        Self::new(self.d.clone(), self.c.clone(), self.b.clone(), self.a.clone())
    }

    /// `18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2`.
    pub fn discriminant(&self) -> BigInt {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        BigInt::from(18) * a * b * c * d - BigInt::from(4) * b * b * b * d + b * b * c * c
            - BigInt::from(4) * a * c * c * c
            - BigInt::from(27) * a * a * d * d
    }

    /// `f(1, t) = t^3 + c t^2 + b t + a`, defined when `d = 1`.
    pub fn companion(&self) -> Result<MonicCubic> {
        if !self.d.is_one() {
            return Err(Error::Unsupported(format!(
                "companion cubic needs d = 1, got d = {}",
                self.d
            )));
        }
        Ok(MonicCubic::new(self.c.clone(), self.b.clone(), self.a.clone()))
    }

    /// PSD iff `f(z, 1)` has no zero in the open upper half plane, i.e. all
    /// roots of the projective form are real. A root at infinity (`a = 0`)
    /// counts as real.
    pub fn psd_classify(&self) -> Result<Psd> {
        if self.is_zero() {
            return Err(Error::InvalidInput("the zero form has no PSD class".into()));
        }
        Ok(if all_roots_real(&self.dehomogenize()) {
            Psd::Psd
        } else {
            Psd::NotPsd
        })
    }
}

pub fn form_discriminant(f: &BinaryCubic) -> BigInt {
    f.discriminant()
}

pub fn psd_classify(f: &BinaryCubic) -> Result<Psd> {
    f.psd_classify()
}

/// `(a, tr b, tr c, d)` read as `a u^3 + tr(b) u^2 v + tr(c) u v^2 + d v^3`.
///
/// The entries of `b` and `c` may be half-integral off the diagonal; the
/// trace only sees the integral diagonal.
pub fn trace_map(w: &WVector) -> BinaryCubic {
    BinaryCubic::new(
        w.a.clone(),
        w.b.trace().to_integer(),
        w.c.trace().to_integer(),
        w.d.clone(),
    )
}

impl fmt::Display for BinaryCubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

/// Text form `"a,b,c,d"`.
impl FromStr for BinaryCubic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "expected four comma-separated integers, got '{s}'"
            )));
        }
        let mut v = Vec::with_capacity(4);
        for p in parts {
            v.push(
                p.parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad integer '{p}'")))?,
            );
        }
        let [a, b, c, d]: [BigInt; 4] = v.try_into().expect("four entries");
        Ok(Self { a, b, c, d })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{HalfSymMat3, SymMat3};

    fn form(a: i64, b: i64, c: i64, d: i64) -> BinaryCubic {
        BinaryCubic::new(a, b, c, d)
    }

    #[test]
    fn trace_map_examples() {
        let v3 = WVector {
            a: BigInt::zero(),
            b: HalfSymMat3::default(),
            c: HalfSymMat3::default(),
            d: BigInt::one(),
        };
        assert_eq!(trace_map(&v3), form(0, 0, 0, 1));
        let w = WVector::rank_one_from(&SymMat3::diag(1, 2, 3));
        assert_eq!(trace_map(&w), form(6, 11, 6, 1));
        let i = SymMat3::identity().to_half();
        let w = WVector { a: BigInt::one(), b: i.clone(), c: i, d: BigInt::one() };
        assert_eq!(trace_map(&w), form(1, 3, 3, 1));
    }

    #[test]
    fn companion_examples() {
        assert_eq!(form(1, -2, -1, 1).companion().unwrap().to_string(), "t^3 - t^2 - 2*t + 1");
        assert_eq!(form(0, 0, 0, 1).companion().unwrap().to_string(), "t^3");
        assert_eq!(form(6, 11, 6, 1).companion().unwrap().to_string(), "t^3 + 6*t^2 + 11*t + 6");
        assert!(form(1, 0, 0, 2).companion().is_err());
    }

    #[test]
    fn psd_examples() {
        assert_eq!(form(0, 0, 0, 1).psd_classify().unwrap(), Psd::Psd);
        assert_eq!(form(1, 0, 1, 0).psd_classify().unwrap(), Psd::NotPsd);
        assert_eq!(form(1, -1, -2, 1).psd_classify().unwrap(), Psd::Psd);
        // degree drop: u v^2 has roots 0 and infinity (twice)
        assert_eq!(form(0, 0, 1, 0).psd_classify().unwrap(), Psd::Psd);
        // u (u^2 + v^2) after dropping the root at infinity
        assert_eq!(form(0, 1, 0, 1).psd_classify().unwrap(), Psd::NotPsd);
        assert!(form(0, 0, 0, 0).psd_classify().is_err());
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(form(1, 0, 0, 1).discriminant(), BigInt::from(-27));
        assert_eq!(form(0, 1, 1, 0).discriminant(), BigInt::one());
        assert_eq!(form(0, 0, 0, 1).discriminant(), BigInt::zero());
        assert_eq!(form(1, -1, -2, 1).discriminant(), BigInt::from(49));
    }

    #[test]
    fn parses_text_form() {
        assert_eq!("1,-2,-1,1".parse::<BinaryCubic>().unwrap(), form(1, -2, -1, 1));
        assert_eq!(" 10, -9 ,-1,1".parse::<BinaryCubic>().unwrap(), form(10, -9, -1, 1));
        assert!("1,2,3".parse::<BinaryCubic>().is_err());
        assert!("1,2,x,1".parse::<BinaryCubic>().is_err());
    }
}
