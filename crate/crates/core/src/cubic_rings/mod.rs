//! Monogenic cubic rings `R = Z[theta]/(p)` inside the étale algebra
//! `E = Q[theta]/(p)`, their fractional ideals, and balanced pairs.

mod ideal;
mod maximal;
mod pairs;
mod sqrt;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::{self, Mat3Q};
use crate::algebra::{real_roots, MonicCubic, QPoly, RationalInterval, RealRoot};
use crate::error::{Error, Result};

pub use ideal::FracIdeal;
pub use maximal::{is_maximal, quadratic_monogenic_witness, MonogenicWitness, WitnessCase};
pub use pairs::{
    classes_qr, classes_qr_from, gram_orthonormalize, matrix_to_pair, pair_to_matrix, pairs_equivalent,
    BalancedPair, QrClasses,
};
pub use sqrt::{SqrtOutcome, SQRT_INITIAL_BITS, SQRT_MAX_BITS};

/// `x0 + x1 theta + x2 theta^2`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FieldElem(pub [BigRational; 3]);

impl FieldElem {
    pub fn from_ints(c: [i64; 3]) -> Self {
        FieldElem(c.map(|x| BigRational::from_integer(x.into())))
    }

    pub fn from_rational(x: BigRational) -> Self {
        FieldElem([x, BigRational::zero(), BigRational::zero()])
    }

    pub fn integer(n: i64) -> Self {
        Self::from_ints([n, 0, 0])
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn theta() -> Self {
        Self::from_ints([0, 1, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coords(&self) -> &[BigRational; 3] {
        &self.0
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        FieldElem(self.0.clone().map(|x| x * s))
    }

    /// As a polynomial in `theta` of degree at most 2.
    pub fn to_poly(&self) -> QPoly {
        QPoly::new(self.0.to_vec())
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        FieldElem(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        FieldElem(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem(self.0.clone().map(|x| -x))
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})θ + ({})θ²", self.0[0], self.0[1], self.0[2])
    }
}

/// Coordinates as exact fraction strings.
impl Serialize for FieldElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.clone().map(|x| x.to_string()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s: [String; 3] = Deserialize::deserialize(d)?;
        let mut out = FieldElem::default();
        for (i, x) in s.iter().enumerate() {
            out.0[i] = x.parse().map_err(serde::de::Error::custom)?;
        }
        Ok(out)
    }
}

/// `Z[theta]/(p)` together with its multiplication data.
#[derive(Clone, Debug)]
pub struct CubicRing {
    p: MonicCubic,
    disc: BigInt,
    /// Coordinates of `theta^k` for `k = 0..=4`.
    powers: [[BigRational; 3]; 5],
    /// `G_ij = tr(theta^(i+j))`.
    trace_gram: Mat3Q,
    /// Real embeddings refined so far; shared between clones.
    embeddings: Arc<Mutex<Option<Vec<RealRoot>>>>,
}

impl CubicRing {
    pub fn new(p: MonicCubic) -> Self {
        let q = |x: &BigInt| BigRational::from_integer(x.clone());
        let (a2, a1, a0) = (q(&p.a2), q(&p.a1), q(&p.a0));
        let z = BigRational::zero;
        let mut powers: [[BigRational; 3]; 5] = std::array::from_fn(|_| [z(), z(), z()]);
        for (k, row) in powers.iter_mut().enumerate().take(3) {
            row[k] = BigRational::one();
        }
        // theta^3 = -a0 - a1 theta - a2 theta^2; theta^4 = theta * theta^3
        powers[3] = [-a0.clone(), -a1.clone(), -a2.clone()];
        let t3 = powers[3].clone();
        powers[4] = [&t3[2] * -&a0, &t3[0] + &t3[2] * -&a1, &t3[1] + &t3[2] * -&a2];
        let disc = p.discriminant();
        let mut ring = CubicRing {
            p,
            disc,
            powers,
            trace_gram: linalg::zero(),
            embeddings: Arc::default(),
        };
        let traces: Vec<BigRational> = (0..5)
            .map(|k| ring.trace(&FieldElem(ring.powers[k].clone())))
            .collect();
        ring.trace_gram = std::array::from_fn(|i| std::array::from_fn(|j| traces[i + j].clone()));
        ring
    }

    pub fn polynomial(&self) -> &MonicCubic {
        &self.p
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn is_etale(&self) -> bool {
        !self.disc.is_zero()
    }

    pub fn is_totally_real(&self) -> bool {
        self.p.is_totally_real()
    }

    pub fn theta_power(&self, k: usize) -> FieldElem {
        FieldElem(self.powers[k].clone())
    }

    pub fn trace_gram(&self) -> &Mat3Q {
        &self.trace_gram
    }

    pub fn mul(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        let mut out: [BigRational; 3] = Default::default();
        for i in 0..3 {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                if y.0[j].is_zero() {
                    continue;
                }
                let c = &x.0[i] * &y.0[j];
                for (k, o) in out.iter_mut().enumerate() {
                    *o += &c * &self.powers[i + j][k];
                }
            }
        }
        FieldElem(out)
    }

    /// Regular representation: row `i` holds the coordinates of
    /// `x theta^i`, so `coords(x y) = coords(y) * M`.
    pub fn mul_matrix(&self, x: &FieldElem) -> Mat3Q {
        std::array::from_fn(|i| self.mul(x, &self.theta_power(i)).0)
    }

    pub fn norm(&self, x: &FieldElem) -> BigRational {
        linalg::det(&self.mul_matrix(x))
    }

    pub fn trace(&self, x: &FieldElem) -> BigRational {
        let m = self.mul_matrix(x);
        &m[0][0] + &m[1][1] + &m[2][2]
    }

    pub fn inv(&self, x: &FieldElem) -> Result<FieldElem> {
        let m = self.mul_matrix(x);
        let inv = linalg::inverse(&m).ok_or(Error::ZeroDivisor)?;
        // coords(y) * M = (1, 0, 0)
        Ok(FieldElem(inv[0].clone()))
    }

    pub fn div(&self, x: &FieldElem, y: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &FieldElem, mut e: u32) -> FieldElem {
        let mut base = x.clone();
        let mut acc = FieldElem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `p'(theta)`.
    pub fn derivative_at_theta(&self) -> FieldElem {
        let q = |x: &BigInt| BigRational::from_integer(x.clone());
        FieldElem([
            q(&self.p.a1),
            BigRational::from_integer(BigInt::from(2)) * q(&self.p.a2),
            BigRational::from_integer(BigInt::from(3)),
        ])
    }

    /// Isolated real roots of `p`, i.e. the real embeddings of `E`.
    pub fn real_embeddings(&self) -> Vec<RealRoot> {
        real_roots(&self.p.to_qpoly(), &BigRational::one())
    }

    /// Isolating intervals of the real embeddings, at least `bits` bits
    /// narrow. Refinements are kept for later calls.
    pub(crate) fn embedding_intervals(&self, bits: u32) -> Vec<RationalInterval> {
        let mut guard = self.embeddings.lock().unwrap_or_else(|e| e.into_inner());
        let roots = guard.get_or_insert_with(|| self.real_embeddings());
        for r in roots.iter_mut() {
            r.refine_bits(bits);
        }
        roots.iter().map(|r| r.interval().clone()).collect()
    }

    fn require_totally_real(&self) -> Result<()> {
        if !self.is_etale() {
            return Err(Error::InvalidInput(format!("{} is not squarefree", self.p)));
        }
        if !self.is_totally_real() {
            return Err(Error::Unsupported(format!(
                "{} has complex embeddings; only totally real algebras are supported",
                self.p
            )));
        }
        Ok(())
    }

    /// Positive at every real embedding; requires `p` totally real.
    pub fn is_totally_positive(&self, x: &FieldElem) -> Result<bool> {
        self.require_totally_real()?;
        let q = x.to_poly();
        if q.is_zero() {
            return Ok(false);
        }
        Ok(self
            .real_embeddings()
            .iter_mut()
            .all(|r| r.sign_of(&q) == Ordering::Greater))
    }

    /// The trace dual of `R`, built from the inverse of the trace Gram
    /// matrix and checked against `(1/p'(theta)) R`.
    pub fn inverse_different(&self) -> Result<FracIdeal> {
        let ginv = linalg::inverse(&self.trace_gram).ok_or_else(|| {
            Error::InvalidInput(format!("{} is not squarefree", self.p))
        })?;
        let dual = FracIdeal::from_basis(&ginv).expect("Gram inverse is nonsingular");
        let scale = self.inv(&self.derivative_at_theta())?;
        let other = FracIdeal::unit(self).scale(self, &scale);
        if dual != other {
            return Err(Error::Invariant(
                "trace dual differs from (1/p'(theta)) R".into(),
            ));
        }
        Ok(dual)
    }
}
