//! Maximality of `Z[theta]/(p)` by Dedekind's criterion, and monogenic
//! generators of `Z x O_K` for real quadratic `K`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::CubicRing;
use crate::algebra::arith::factorize;
use crate::algebra::MonicCubic;
use crate::error::{Error, Result};

/// Ascending coefficients over `Z`.
type ZPoly = Vec<BigInt>;

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn eval_mod(p: &[u64], x: u64, q: u64) -> u64 {
    let (x, q) = (u128::from(x), u128::from(q));
    p.iter()
        .rev()
        .fold(0u128, |acc, &c| (acc * x + u128::from(c)) % q) as u64
}

/// Divide a monic polynomial by `t - r` modulo `q`.
fn deflate(p: &[u64], r: u64, q: u64) -> Vec<u64> {
    let n = p.len() - 1;
    let mut out = vec![0u64; n];
    let mut carry = 0u128;
    for k in (0..n).rev() {
        carry = (u128::from(p[k + 1]) + carry * u128::from(r)) % u128::from(q);
        out[k] = carry as u64;
    }
    out
}

fn maximal_at(p: &MonicCubic, q: &BigInt) -> Result<bool> {
    let qu = q
        .to_u64()
        .filter(|q| *q < 1 << 32)
        .ok_or_else(|| Error::Unsupported(format!("prime {q} too large for the root search")))?;
    let mut rest: Vec<u64> = p
        .coeffs()
        .iter()
        .map(|c| c.mod_floor(q).to_u64().expect("residue"))
        .collect();
    let mut roots: Vec<(u64, u32)> = Vec::new();
    let mut r = 0;
    while r < qu && rest.len() > 1 {
        let mut e = 0;
        while rest.len() > 1 && eval_mod(&rest, r, qu) == 0 {
            rest = deflate(&rest, r, qu);
            e += 1;
        }
        if e > 0 {
            roots.push((r, e));
        }
        r += 1;
    }
    if roots.iter().all(|(_, e)| *e == 1) {
        return Ok(true);
    }
    // g = product of distinct irreducible factors, h = p / g (mod q), both lifted
    let lin = |r: u64| vec![-BigInt::from(r), BigInt::one()];
    let mut g: ZPoly = rest.iter().map(|c| BigInt::from(*c)).collect();
    let mut h: ZPoly = vec![BigInt::one()];
    for &(r, e) in &roots {
        g = zmul(&g, &lin(r));
        for _ in 1..e {
            h = zmul(&h, &lin(r));
        }
    }
    let gh = zmul(&g, &h);
    let mut f = Vec::with_capacity(3);
    for (c, d) in p.coeffs().iter().zip(&gh) {
        let diff = c - d;
        if !(&diff % q).is_zero() {
            return Err(Error::Invariant("lifted factorization is not congruent to p".into()));
        }
        f.push(diff / q);
    }
    let fu: Vec<u64> = f.iter().map(|c| c.mod_floor(q).to_u64().expect("residue")).collect();
    // gcd(f, g, h) = 1 iff no repeated factor (t - r) divides f mod q
    Ok(roots
        .iter()
        .filter(|(_, e)| *e >= 2)
        .all(|&(r, _)| eval_mod(&fu, r, qu) != 0))
}

/// Dedekind's criterion at every prime whose square divides the
/// discriminant.
pub fn is_maximal(ring: &CubicRing) -> Result<bool> {
    if !ring.is_etale() {
        return Err(Error::InvalidInput(format!(
            "{} is not squarefree",
            ring.polynomial()
        )));
    }
    for (q, e) in factorize(ring.disc()) {
        if e >= 2 && !maximal_at(ring.polynomial(), &q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessCase {
    /// `O_K = Z[sqrt(l)]`.
    Sqrt,
    /// `O_K = Z[w]`, `w = (1 + sqrt(4l + 1)) / 2`.
    Half,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonogenicWitness {
    #[serde(serialize_with = "ser_big")]
    pub r: BigInt,
    pub generator: String,
    pub charpoly: MonicCubic,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// The smallest `r >= 0` with `l = r^2 +- 1` (sqrt case) or
/// `r (r - 1) = l +- 1` (half case), with the generator `(r, sqrt l)` or
/// `(r, w)` of `Z x O_K` and its characteristic polynomial.
pub fn quadratic_monogenic_witness(l: &BigInt, case: WitnessCase) -> Option<MonogenicWitness> {
    if !l.is_positive() {
        return None;
    }
    let top = l.sqrt() + 2;
    let mut r = BigInt::zero();
    while r <= top {
        let v = match case {
            WitnessCase::Sqrt => &r * &r,
            WitnessCase::Half => &r * (&r - 1),
        };
        let d = (&v - l).abs();
        if d.is_one() {
            let charpoly = match case {
                // (t - r)(t^2 - l)
                WitnessCase::Sqrt => MonicCubic::new(-&r, -l, &r * l),
                // (t - r)(t^2 - t - l)
                WitnessCase::Half => MonicCubic::new(-(&r + BigInt::one()), &r - l, &r * l),
            };
            let generator = match case {
                WitnessCase::Sqrt => format!("({r}, sqrt({l}))"),
                WitnessCase::Half => format!("({r}, (1 + sqrt({}))/2)", BigInt::from(4) * l + 1),
            };
            return Some(MonogenicWitness { r, generator, charpoly });
        }
        r += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> CubicRing {
        CubicRing::new(s.parse().unwrap())
    }

    #[test]
    fn maximality_examples() {
        assert!(is_maximal(&ring("t^3 - 3t - 1")).unwrap());
        assert!(is_maximal(&ring("t^3 - t^2 - 54t + 169")).unwrap());
        // Z[t]/(t^3 - t) has index 2 in Z^3
        assert!(!is_maximal(&ring("t^3 - t")).unwrap());
        // Z[2^(1/3)] is maximal, Z[sqrt(5)]-type orders are not
        assert!(is_maximal(&ring("t^3 - 2")).unwrap());
        assert!(!is_maximal(&ring("(t-1)(t^2-5)")).unwrap());
        // Z[3 * 2^(1/3)] has index 27
        assert!(!is_maximal(&ring("t^3 - 54")).unwrap());
        assert!(is_maximal(&ring("t^3")).is_err());
    }

    #[test]
    fn witness_examples() {
        let w = quadratic_monogenic_witness(&2.into(), WitnessCase::Sqrt).unwrap();
        assert_eq!(w.r, BigInt::one());
        assert_eq!(w.charpoly, "(t-1)(t^2-2)".parse().unwrap());
        let w = quadratic_monogenic_witness(&3.into(), WitnessCase::Sqrt).unwrap();
        assert_eq!(w.r, BigInt::from(2));
        assert_eq!(w.charpoly, "(t-2)(t^2-3)".parse().unwrap());
        assert!(quadratic_monogenic_witness(&7.into(), WitnessCase::Sqrt).is_none());
        let w = quadratic_monogenic_witness(&10.into(), WitnessCase::Sqrt).unwrap();
        assert_eq!(w.charpoly, "(t-3)(t^2-10)".parse().unwrap());
        let w = quadratic_monogenic_witness(&1.into(), WitnessCase::Half).unwrap();
        assert_eq!(w.charpoly, "(t)(t^2-t-1)".parse().unwrap());
    }

    #[test]
    fn witnesses_generate_maximal_orders() {
        for l in [2, 3, 10, 26] {
            let w = quadratic_monogenic_witness(&l.into(), WitnessCase::Sqrt).unwrap();
            assert!(is_maximal(&CubicRing::new(w.charpoly)).unwrap(), "l = {l}");
        }
        for l in [1, 3, 5, 7] {
            let w = quadratic_monogenic_witness(&l.into(), WitnessCase::Half).unwrap();
            assert!(is_maximal(&CubicRing::new(w.charpoly)).unwrap(), "l = {l}");
        }
    }
}
