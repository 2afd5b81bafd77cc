//! Square roots in a totally real étale cubic algebra.
//!
//! A square root `beta` of `lambda` is determined by a choice of sign at each
//! real embedding. For each sign pattern the coordinates of `beta` are
//! enclosed in rational intervals (Lagrange interpolation through the
//! embeddings, evaluated in interval arithmetic). `D |disc| beta` is
//! integral, where `D` is the common denominator of `lambda`, so once every
//! scaled coordinate interval holds at most one integer the candidate is
//! either ruled out or checked exactly.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{CubicRing, FieldElem};
use crate::algebra::RationalInterval;
use crate::error::{Error, Result};

pub const SQRT_INITIAL_BITS: u32 = 64;
pub const SQRT_MAX_BITS: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SqrtOutcome {
    /// Every square root, one representative per `+-` pair.
    Roots(Vec<FieldElem>),
    NoRoot,
    /// Some sign pattern could not be decided within the precision cap.
    UndecidedAtCap(u32),
}

/// Enclosure of `sqrt(x)` for `x` inside a strictly positive interval.
fn sqrt_interval(x: &RationalInterval, bits: u32) -> RationalInterval {
    let scale = BigInt::one() << (2 * bits);
    let lo = (&x.lo * BigRational::from_integer(scale.clone())).floor().to_integer();
    let hi = (&x.hi * BigRational::from_integer(scale)).ceil().to_integer();
    let den = BigInt::one() << bits;
    RationalInterval::new(
        BigRational::new(lo.sqrt(), den.clone()),
        BigRational::new(hi.sqrt() + 1, den),
    )
}

/// Integers inside `[lo, hi]`, or `None` if there are two or more.
enum Lattice {
    Empty,
    One(BigInt),
    Many,
}

fn integers_in(x: &RationalInterval) -> Lattice {
    let lo = x.lo.ceil().to_integer();
    let hi = x.hi.floor().to_integer();
    match lo.cmp(&hi) {
        Ordering::Greater => Lattice::Empty,
        Ordering::Equal => Lattice::One(lo),
        Ordering::Less => Lattice::Many,
    }
}

impl CubicRing {
    pub fn sqrt_outcome(&self, lambda: &FieldElem) -> Result<SqrtOutcome> {
        self.require_totally_real()?;
        if self.norm(lambda).is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let denom = lambda
            .0
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let n = BigRational::from_integer(denom * self.disc().abs());
        let lam = lambda.to_poly();

        let mut pending: Vec<[i8; 3]> = vec![[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]];
        let mut found = Vec::new();
        let mut bits = SQRT_INITIAL_BITS;
        while bits <= SQRT_MAX_BITS {
            let x = self.embedding_intervals(bits);
            debug_assert_eq!(x.len(), 3);
            let vals: Vec<RationalInterval> = x.iter().map(|xi| xi.eval_poly(&lam)).collect();
            if vals.iter().any(|v| v.hi.is_negative()) {
                return Ok(SqrtOutcome::NoRoot);
            }
            if vals.iter().all(|v| v.lo.is_positive()) {
                let s: Vec<RationalInterval> = vals.iter().map(|v| sqrt_interval(v, bits)).collect();
                // Lagrange basis: L_i(t) = (t - x_j)(t - x_k) / ((x_i - x_j)(x_i - x_k))
                let mut basis = Vec::with_capacity(3);
                let mut ok = true;
                for i in 0..3 {
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    let den = x[i].sub(&x[j]).mul(&x[i].sub(&x[k]));
                    let Some(inv) = den.recip() else {
                        ok = false;
                        break;
                    };
                    let c2 = inv.clone();
                    let c1 = x[j].add(&x[k]).mul(&inv).scale(&-BigRational::one());
                    let c0 = x[j].mul(&x[k]).mul(&inv);
                    basis.push([c0, c1, c2]);
                }
                if ok {
                    let mut next = Vec::new();
                    for pat in pending {
                        let mut coords = Vec::with_capacity(3);
                        let mut decided = true;
                        let mut impossible = false;
                        for c in 0..3 {
                            let mut acc = RationalInterval::point(BigRational::zero());
                            for i in 0..3 {
                                let term = s[i].mul(&basis[i][c]);
                                acc = if pat[i] > 0 { acc.add(&term) } else { acc.sub(&term) };
                            }
                            match integers_in(&acc.scale(&n)) {
                                Lattice::Empty => impossible = true,
                                Lattice::One(m) => coords.push(BigRational::new(m, n.to_integer())),
                                Lattice::Many => decided = false,
                            }
                        }
                        if impossible {
                            continue;
                        }
                        if !decided {
                            next.push(pat);
                            continue;
                        }
                        let beta = FieldElem([coords[0].clone(), coords[1].clone(), coords[2].clone()]);
                        if &self.mul(&beta, &beta) == lambda {
                            found.push(beta);
                        }
                    }
                    pending = next;
                    if pending.is_empty() {
                        break;
                    }
                }
            }
            bits *= 2;
        }
        if !pending.is_empty() {
            return Ok(SqrtOutcome::UndecidedAtCap(SQRT_MAX_BITS));
        }
        Ok(if found.is_empty() {
            SqrtOutcome::NoRoot
        } else {
            SqrtOutcome::Roots(found)
        })
    }

    /// All square roots of `lambda` up to sign (empty if none).
    pub fn square_roots(&self, lambda: &FieldElem) -> Result<Vec<FieldElem>> {
        match self.sqrt_outcome(lambda)? {
            SqrtOutcome::Roots(r) => Ok(r),
            SqrtOutcome::NoRoot => Ok(Vec::new()),
            SqrtOutcome::UndecidedAtCap(b) => Err(Error::UndecidedAtCap(b)),
        }
    }

    /// Some `beta` with `beta^2 = lambda`.
    pub fn sqrt_in_e(&self, lambda: &FieldElem) -> Result<Option<FieldElem>> {
        Ok(self.square_roots(lambda)?.into_iter().next())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> CubicRing {
        CubicRing::new(s.parse().unwrap())
    }

    #[test]
    fn sqrt_examples() {
        let r = ring("t^3 - t^2 - 2t + 1");
        let b = r.sqrt_in_e(&FieldElem::integer(4)).unwrap().unwrap();
        assert!(b == FieldElem::integer(2) || b == FieldElem::integer(-2));

        let th = FieldElem::theta();
        let th2 = r.mul(&th, &th);
        let b = r.sqrt_in_e(&th2).unwrap().unwrap();
        assert!(b == th || b == -&th);

        assert_eq!(r.sqrt_in_e(&FieldElem::integer(-1)).unwrap(), None);
        assert_eq!(r.sqrt_in_e(&FieldElem::integer(2)).unwrap(), None);
    }

    #[test]
    fn fractional_square_roots() {
        let r = ring("t^3 - 3t - 1");
        let beta = FieldElem([
            BigRational::new(3.into(), 7.into()),
            BigRational::new((-5).into(), 2.into()),
            BigRational::new(1.into(), 3.into()),
        ]);
        let lam = r.mul(&beta, &beta);
        let roots = r.square_roots(&lam).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0] == beta || roots[0] == -&beta);
    }

    #[test]
    fn split_algebras_have_several_roots() {
        // Q x Q x Q: 1 has four square roots up to sign
        let r = ring("t^3 - t");
        assert_eq!(r.square_roots(&FieldElem::one()).unwrap().len(), 4);
        // Q x Q(sqrt 2)
        let r = ring("(t-1)(t^2-2)");
        assert_eq!(r.square_roots(&FieldElem::one()).unwrap().len(), 2);
    }

    #[test]
    fn rejects_zero_divisors_and_complex_cases() {
        let r = ring("t^3 - t");
        assert_eq!(r.sqrt_in_e(&FieldElem::theta()), Err(Error::ZeroDivisor));
        assert!(matches!(ring("t^3 - 2").sqrt_in_e(&FieldElem::one()), Err(Error::Unsupported(_))));
    }
}
