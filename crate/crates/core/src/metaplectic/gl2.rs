//! Two double covers of `GL_2(Q_v)` built on the cocycle model of the
//! metaplectic `SL_2`.
//!
//! An element `(s, zeta, y)` lies over `s diag(1, y)`. `Cover0` is the
//! semidirect product of the metaplectic `SL_2` with `Q_v^x` acting by
//! `(s, zeta)^y = (s^y, v(y, s) zeta)`; `Cover1` multiplies the `Cover0`
//! product by `(y1, y2)_v`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::hilbert::{hilbert, Place};
use super::sl2::{mat2_identity, mat2_inv_sl, msl2_mul, Mat2, MetaSL2Elem};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cover {
    #[serde(rename = "COVER0")]
    Cover0,
    #[serde(rename = "COVER1")]
    Cover1,
}

/// `v(y, s) = 1` if `c != 0`, else `(y, d)_v`.
pub fn v_factor(y: &BigRational, s: &Mat2, place: Place) -> i8 {
    if s[1][0].is_zero() {
        hilbert(y, &s[1][1], place)
    } else {
        1
    }
}

/// `(s, zeta)^y = (diag(1, y)^{-1} s diag(1, y), v(y, s) zeta)`.
pub fn conj_action(y: &BigRational, x: &MetaSL2Elem) -> Result<MetaSL2Elem> {
    if y.is_zero() {
        return Err(Error::InvalidInput("y must be nonzero".into()));
    }
    let s = &x.g;
    let g = [
        [s[0][0].clone(), &s[0][1] * y],
        [&s[1][0] / y, s[1][1].clone()],
    ];
    Ok(MetaSL2Elem {
        g,
        zeta: v_factor(y, s, x.place) * x.zeta,
        place: x.place,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetaGL2Elem {
    pub s: MetaSL2Elem,
    #[serde(serialize_with = "ser_rat")]
    pub y: BigRational,
    pub variant: Cover,
}

fn ser_rat<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

impl MetaGL2Elem {
    pub fn new(s: MetaSL2Elem, y: BigRational, variant: Cover) -> Result<Self> {
        if y.is_zero() {
            return Err(Error::InvalidInput("y must be nonzero".into()));
        }
        Ok(MetaGL2Elem { s, y, variant })
    }

    pub fn identity(place: Place, variant: Cover) -> Self {
        MetaGL2Elem {
            s: MetaSL2Elem::identity(place),
            y: BigRational::one(),
            variant,
        }
    }

    pub fn from_sl2(s: MetaSL2Elem, variant: Cover) -> Self {
        MetaGL2Elem {
            s,
            y: BigRational::one(),
            variant,
        }
    }

    pub fn place(&self) -> Place {
        self.s.place
    }

    pub fn zeta(&self) -> i8 {
        self.s.zeta
    }

    /// Underlying matrix `s diag(1, y)`.
    pub fn matrix(&self) -> Mat2 {
        let s = &self.s.g;
        [
            [s[0][0].clone(), &s[0][1] * &self.y],
            [s[1][0].clone(), &s[1][1] * &self.y],
        ]
    }

    pub fn det(&self) -> BigRational {
        self.y.clone()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        mgl2_mul(self, other)
    }

    pub fn inv(&self) -> Result<Self> {
        mgl2_inv(self)
    }

    pub fn with_sign(mut self, z: i8) -> Self {
        self.s.zeta *= z;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.y.is_one() && self.s.is_identity()
    }
}

/// `(s1, z1, y1)(s2, z2, y2) = ((s1, z1) (s2, z2)^{1/y1}, y1 y2)`, times
/// `(y1, y2)_v` for `Cover1`.
pub fn mgl2_mul(x: &MetaGL2Elem, y: &MetaGL2Elem) -> Result<MetaGL2Elem> {
    if x.variant != y.variant {
        return Err(Error::InvalidInput(format!(
            "cover mismatch: {:?} vs {:?}",
            x.variant, y.variant
        )));
    }
    let sigma = conj_action(&x.y.recip(), &y.s)?;
    let mut s = msl2_mul(&x.s, &sigma)?;
    if x.variant == Cover::Cover1 {
        s.zeta *= hilbert(&x.y, &y.y, x.place());
    }
    Ok(MetaGL2Elem {
        s,
        y: &x.y * &y.y,
        variant: x.variant,
    })
}

pub fn mgl2_inv(x: &MetaGL2Elem) -> Result<MetaGL2Elem> {
    // the matrix part is (s^{-1})^y; the sign is forced by x x^{-1} = 1
    let base = MetaSL2Elem {
        g: mat2_inv_sl(&x.s.g),
        zeta: 1,
        place: x.place(),
    };
    let mut cand = MetaGL2Elem {
        s: conj_action(&x.y, &base)?,
        y: x.y.recip(),
        variant: x.variant,
    };
    cand.s.zeta = 1;
    let p = mgl2_mul(x, &cand)?;
    debug_assert!(p.y.is_one() && p.s.g == mat2_identity());
    cand.s.zeta = p.s.zeta;
    Ok(cand)
}

pub fn mgl2_product(word: &[MetaGL2Elem]) -> Result<MetaGL2Elem> {
    let (first, rest) = word
        .split_first()
        .ok_or_else(|| Error::InvalidInput("empty word".into()))?;
    rest.iter().try_fold(first.clone(), |acc, x| mgl2_mul(&acc, x))
}

/// `x y x^{-1} y^{-1}`.
pub fn commutator(x: &MetaGL2Elem, y: &MetaGL2Elem) -> Result<MetaGL2Elem> {
    mgl2_product(&[x.clone(), y.clone(), x.inv()?, y.inv()?])
}

/// `h~_{a2}(t) = (e, 1, t)`.
pub fn h_alpha2(t: &BigRational, place: Place, variant: Cover) -> MetaGL2Elem {
    MetaGL2Elem {
        s: MetaSL2Elem::identity(place),
        y: t.clone(),
        variant,
    }
}

/// `h~_{a1}(t)` from the `SL_2` factor.
pub fn h_alpha1(t: &BigRational, place: Place, variant: Cover) -> MetaGL2Elem {
    MetaGL2Elem::from_sl2(super::sl2::h_tilde(t, place), variant)
}

/// `w~_{a1}(t)` from the `SL_2` factor.
pub fn w_alpha1(t: &BigRational, place: Place, variant: Cover) -> MetaGL2Elem {
    MetaGL2Elem::from_sl2(super::sl2::w_tilde(t, place), variant)
}
