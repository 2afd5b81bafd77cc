//! Gelbart's cocycle model of the metaplectic double cover of `SL_2(Q_v)`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::hilbert::{hilbert, is_unit_sign, Place};
use crate::error::{Error, Result};

pub type Mat2 = [[BigRational; 2]; 2];

pub fn mat2(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
    let r = |n: i64| BigRational::from_integer(n.into());
    [[r(a), r(b)], [r(c), r(d)]]
}

pub fn mat2_identity() -> Mat2 {
    mat2(1, 0, 0, 1)
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j]))
}

pub fn mat2_det(x: &Mat2) -> BigRational {
    &x[0][0] * &x[1][1] - &x[0][1] * &x[1][0]
}

/// Inverse of a determinant-one matrix.
pub fn mat2_inv_sl(x: &Mat2) -> Mat2 {
    [
        [x[1][1].clone(), -&x[0][1]],
        [-&x[1][0], x[0][0].clone()],
    ]
}

/// `x(s) = c` if `c != 0`, else `d`.
pub fn x_of(s: &Mat2) -> BigRational {
    if s[1][0].is_zero() {
        s[1][1].clone()
    } else {
        s[1][0].clone()
    }
}

/// `alpha(g1, g2) = (x(g1), x(g2))_v (-x(g1) x(g2), x(g1 g2))_v`.
pub fn alpha_cocycle(g1: &Mat2, g2: &Mat2, v: Place) -> i8 {
    let (x1, x2) = (x_of(g1), x_of(g2));
    let x12 = x_of(&mat2_mul(g1, g2));
    hilbert(&x1, &x2, v) * hilbert(&-(&x1 * &x2), &x12, v)
}

fn ser_mat2<S: serde::Serializer>(m: &Mat2, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.clone().map(|r| r.map(|x| x.to_string())).serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetaSL2Elem {
    #[serde(serialize_with = "ser_mat2")]
    pub g: Mat2,
    pub zeta: i8,
    pub place: Place,
}

impl MetaSL2Elem {
    pub fn new(g: Mat2, zeta: i8, place: Place) -> Result<Self> {
        if !mat2_det(&g).is_one() {
            return Err(Error::InvalidInput("matrix must have determinant 1".into()));
        }
        if !is_unit_sign(zeta) {
            return Err(Error::InvalidInput(format!("zeta must be +-1, got {zeta}")));
        }
        Ok(MetaSL2Elem { g, zeta, place })
    }

    pub fn identity(place: Place) -> Self {
        MetaSL2Elem {
            g: mat2_identity(),
            zeta: 1,
            place,
        }
    }

    /// The central element `(e, -1)`.
    pub fn minus_one(place: Place) -> Self {
        MetaSL2Elem {
            zeta: -1,
            ..Self::identity(place)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        msl2_mul(self, other)
    }

    pub fn inv(&self) -> Self {
        msl2_inv(self)
    }

    pub fn with_sign(mut self, s: i8) -> Self {
        self.zeta *= s;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.zeta == 1 && self.g == mat2_identity()
    }
}

fn check_place(a: Place, b: Place) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::PlaceMismatch(a.to_string(), b.to_string()))
    }
}

/// `(g1, z1)(g2, z2) = (g1 g2, alpha(g1, g2) z1 z2)`.
pub fn msl2_mul(x: &MetaSL2Elem, y: &MetaSL2Elem) -> Result<MetaSL2Elem> {
    check_place(x.place, y.place)?;
    Ok(MetaSL2Elem {
        g: mat2_mul(&x.g, &y.g),
        zeta: alpha_cocycle(&x.g, &y.g, x.place) * x.zeta * y.zeta,
        place: x.place,
    })
}

pub fn msl2_inv(x: &MetaSL2Elem) -> MetaSL2Elem {
    let gi = mat2_inv_sl(&x.g);
    let zeta = x.zeta * alpha_cocycle(&x.g, &gi, x.place);
    MetaSL2Elem {
        g: gi,
        zeta,
        place: x.place,
    }
}

/// Product of a nonempty word.
pub fn msl2_product(word: &[MetaSL2Elem]) -> Result<MetaSL2Elem> {
    let (first, rest) = word
        .split_first()
        .ok_or_else(|| Error::InvalidInput("empty word".into()))?;
    rest.iter().try_fold(first.clone(), |acc, x| msl2_mul(&acc, x))
}

/// Upper unipotent `x_a(t) = ((1, t; 0, 1), 1)`.
pub fn x_pos(t: &BigRational, place: Place) -> MetaSL2Elem {
    let mut g = mat2_identity();
    g[0][1] = t.clone();
    MetaSL2Elem { g, zeta: 1, place }
}

/// Lower unipotent `x_{-a}(c) = ((1, 0; c, 1), 1)`.
pub fn x_neg(c: &BigRational, place: Place) -> MetaSL2Elem {
    let mut g = mat2_identity();
    g[1][0] = c.clone();
    MetaSL2Elem { g, zeta: 1, place }
}

/// Pinned image `w~(t) = ((0, t; -1/t, 0), 1)`.
pub fn w_tilde(t: &BigRational, place: Place) -> MetaSL2Elem {
    let z = BigRational::zero();
    MetaSL2Elem {
        g: [[z.clone(), t.clone()], [-t.recip(), z]],
        zeta: 1,
        place,
    }
}

/// Pinned image `h~(t) = (diag(t, 1/t), (t, t)_v)`.
pub fn h_tilde(t: &BigRational, place: Place) -> MetaSL2Elem {
    let z = BigRational::zero();
    MetaSL2Elem {
        g: [[t.clone(), z.clone()], [z, t.recip()]],
        zeta: hilbert(t, t, place),
        place,
    }
}

/// Abstract generators of the metaplectic `SL_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sl2Generator {
    XPos(BigRational),
    XNeg(BigRational),
    W(BigRational),
    H(BigRational),
}

/// Image of a generator in the cocycle model. The images of `w~(t)` and
/// `h~(t)` are computed from the words `x(t) x_-(-1/t) x(t)` and
/// `w~(t) w~(-1)` and checked against the pinned images.
pub fn embed_sl2_gelbart(gen: &Sl2Generator, place: Place) -> Result<MetaSL2Elem> {
    let nonzero = |t: &BigRational| {
        if t.is_zero() {
            Err(Error::InvalidInput("parameter must be nonzero".into()))
        } else {
            Ok(())
        }
    };
    let w_word = |t: &BigRational| -> Result<MetaSL2Elem> {
        msl2_product(&[x_pos(t, place), x_neg(&-t.recip(), place), x_pos(t, place)])
    };
    let out = match gen {
        Sl2Generator::XPos(t) => return Ok(x_pos(t, place)),
        Sl2Generator::XNeg(c) => return Ok(x_neg(c, place)),
        Sl2Generator::W(t) => {
            nonzero(t)?;
            (w_word(t)?, w_tilde(t, place))
        }
        Sl2Generator::H(t) => {
            nonzero(t)?;
            let h = msl2_mul(&w_word(t)?, &w_word(&-BigRational::one())?)?;
            (h, h_tilde(t, place))
        }
    };
    if out.0 != out.1 {
        return Err(Error::Invariant(format!("{gen:?} does not match its pinned image")));
    }
    Ok(out.0)
}

/// `x_a(t) x_{-a}(s) = (1+st, t/(1+st))_v^{-1} x_{-a}(s/(1+st)) h~(1+st) x_a(t/(1+st))`
/// in the model (long-root exponent).
pub fn steinberg_opposite_identity(t: &BigRational, s: &BigRational, place: Place) -> Result<bool> {
    let u = BigRational::one() + s * t;
    if u.is_zero() {
        return Err(Error::InvalidInput("1 + st must be nonzero".into()));
    }
    let lhs = msl2_mul(&x_pos(t, place), &x_neg(s, place))?;
    let rhs = msl2_product(&[
        x_neg(&(s / &u), place),
        h_tilde(&u, place),
        x_pos(&(t / &u), place),
    ])?;
    // the prefactor is trivial when t = 0
    let sign = if t.is_zero() { 1 } else { hilbert(&u, &(t / &u), place) };
    let rhs = rhs.with_sign(sign);
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metaplectic::hilbert::rat;

    const PLACES: [Place; 5] = [
        Place::Prime(2),
        Place::Prime(3),
        Place::Prime(5),
        Place::Prime(7),
        Place::Real,
    ];

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn identity_and_inverse() {
        let g = mat2(0, 1, -1, 0);
        // x(g) = -1, x(g^{-1}) = 1, x(e) = 1: (-1, 1)_2 (1, 1)_2 = 1
        assert_eq!(alpha_cocycle(&g, &mat2_inv_sl(&g), Place::Prime(2)), 1);
        // -I: x = -1 twice, x(I) = 1, so (-1, -1)_2 (-1, 1)_2 = -1
        let m = mat2(-1, 0, 0, -1);
        assert_eq!(alpha_cocycle(&m, &m, Place::Prime(2)), -1);
        assert_eq!(alpha_cocycle(&m, &m, Place::Prime(3)), 1);
        for v in PLACES {
            let e = mat2_identity();
            assert_eq!(alpha_cocycle(&e, &g, v), 1);
            let x = MetaSL2Elem::new(mat2(2, 3, 1, 2), -1, v).unwrap();
            assert!(x.mul(&x.inv()).unwrap().is_identity());
            assert!(x.inv().mul(&x).unwrap().is_identity());
        }
    }

    #[test]
    fn lower_unipotents_split() {
        for v in PLACES {
            for (c1, c2) in [(q(1, 2), q(3, 1)), (q(-2, 3), q(2, 3)), (q(5, 1), q(-7, 4))] {
                let p = x_neg(&c1, v).mul(&x_neg(&c2, v)).unwrap();
                assert_eq!(p, x_neg(&(&c1 + &c2), v));
            }
        }
    }

    #[test]
    fn torus_relation() {
        for v in PLACES {
            for (s, t) in [(rat(-1), rat(-1)), (rat(2), rat(3)), (q(3, 5), q(-7, 2))] {
                let lhs = h_tilde(&s, v).mul(&h_tilde(&t, v)).unwrap();
                let rhs = h_tilde(&(&s * &t), v).with_sign(hilbert(&s, &t, v));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn pinned_images() {
        for v in PLACES {
            for t in [rat(1), rat(-1), rat(2), q(-3, 7)] {
                embed_sl2_gelbart(&Sl2Generator::W(t.clone()), v).unwrap();
                embed_sl2_gelbart(&Sl2Generator::H(t), v).unwrap();
            }
        }
        let h = embed_sl2_gelbart(&Sl2Generator::H(rat(-1)), Place::Prime(2)).unwrap();
        assert_eq!(h.zeta, -1);
        let h = embed_sl2_gelbart(&Sl2Generator::H(rat(2)), Place::Prime(2)).unwrap();
        assert_eq!(h.zeta, 1);
    }

    #[test]
    fn steinberg_examples() {
        for v in PLACES {
            assert!(steinberg_opposite_identity(&rat(0), &rat(5), v).unwrap());
            assert!(steinberg_opposite_identity(&rat(1), &rat(1), v).unwrap());
            assert!(steinberg_opposite_identity(&q(3, 4), &q(-2, 9), v).unwrap());
        }
        assert!(steinberg_opposite_identity(&rat(1), &rat(-1), Place::Real).is_err());
    }

    #[test]
    fn place_mismatch() {
        let a = MetaSL2Elem::identity(Place::Prime(2));
        let b = MetaSL2Elem::identity(Place::Real);
        assert!(matches!(a.mul(&b), Err(Error::PlaceMismatch(_, _))));
    }
}
