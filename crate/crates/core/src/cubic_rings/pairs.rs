//! Balanced pairs `(I, mu)` and the correspondence with `SO3(Z)`-orbits of
//! integral symmetric matrices with characteristic polynomial `p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CubicRing, FieldElem, FracIdeal};
use crate::algebra::linalg::{self, Mat3Q, Mat3Z};
use crate::error::{Error, Result};
use crate::jordan::SymMat3;
use crate::qp;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedPair {
    pub ideal: FracIdeal,
    pub mu: FieldElem,
}

impl BalancedPair {
    /// Checks total positivity of `mu` and both balancing conditions.
    pub fn new(ring: &CubicRing, ideal: FracIdeal, mu: FieldElem) -> Result<Self> {
        if !ring.is_totally_positive(&mu)? {
            return Err(Error::NotBalanced("mu is not totally positive".into()));
        }
        if !ring.is_balanced(&ideal, &mu)? {
            return Err(Error::NotBalanced(format!("{ideal:?} with mu = {mu:?}")));
        }
        Ok(BalancedPair { ideal, mu })
    }

    /// `(beta I, beta^-2 mu)`.
    pub fn rescale(&self, ring: &CubicRing, beta: &FieldElem) -> Result<Self> {
        let b2 = ring.mul(beta, beta);
        Ok(BalancedPair {
            ideal: self.ideal.scale(ring, beta),
            mu: ring.div(&self.mu, &b2)?,
        })
    }
}

impl CubicRing {
    /// `mu I^2` inside the inverse different and `N(mu) N(I)^2 disc = 1`,
    /// with `N(I) > 0` and `N(mu)`, `disc` signed.
    pub fn is_balanced(&self, ideal: &FracIdeal, mu: &FieldElem) -> Result<bool> {
        let n_mu = self.norm(mu);
        if n_mu.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let n_i = ideal.norm();
        let disc = BigRational::from_integer(self.disc().clone());
        if n_mu * &n_i * &n_i * disc != BigRational::one() {
            return Ok(false);
        }
        let dinv = self.inverse_different()?;
        let mi2 = ideal.mul(self, ideal).scale(self, mu);
        Ok(mi2.is_subset_of(&dinv))
    }

    /// `tr(mu x y)`.
    fn pairing(&self, mu: &FieldElem, x: &FieldElem, y: &FieldElem) -> BigRational {
        self.trace(&self.mul(mu, &self.mul(x, y)))
    }
}

fn cyclic_candidates(k: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for a in -k..=k {
        for b in -k..=k {
            for c in -k..=k {
                let m = a.abs().max(b.abs()).max(c.abs());
                // only the new shell for k > 2, everything for the first box
                if m == 0 || (k > 2 && m < k) {
                    continue;
                }
                out.push([a, b, c]);
            }
        }
    }
    out.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), *v));
    out
}

/// The pair attached to `t`: `theta` acts on `Z^3` by `-t`, a cyclic vector
/// `e` identifies `Z^3 (x) Q` with `E` via `e -> 1`, the lattice pulls back to
/// `I`, and the standard dot product becomes `tr(mu x y)`.
pub fn matrix_to_pair(t: &SymMat3, ring: &CubicRing) -> Result<BalancedPair> {
    if &qp::charpoly(t) != ring.polynomial() {
        return Err(Error::InvalidInput(format!(
            "{t} does not have characteristic polynomial {}",
            ring.polynomial()
        )));
    }
    ring.require_totally_real()?;
    let a: Mat3Z = t.to_matrix().map(|r| r.map(|x| -x));
    let mut k = 2;
    let kmat = loop {
        let hit = cyclic_candidates(k).into_iter().find_map(|e| {
            let e0 = e.map(BigInt::from);
            let e1 = linalg::mat_vec(&a, &e0);
            let e2 = linalg::mat_vec(&a, &e1);
            let km: Mat3Z = std::array::from_fn(|i| [e0[i].clone(), e1[i].clone(), e2[i].clone()]);
            (!linalg::det(&km).is_zero()).then_some(km)
        });
        if let Some(km) = hit {
            break km;
        }
        k += 1;
        if k > 16 {
            return Err(Error::Invariant(format!("no cyclic vector found for {t}")));
        }
    };
    let kq = linalg::to_q(&kmat);
    let kinv = linalg::inverse(&kq).expect("cyclic vector gives a basis");
    let ideal = FracIdeal::from_basis(&linalg::transpose(&kinv)).expect("nonsingular");

    // Q_ij = e_i . e_j = tr(mu theta^(i+j)); row 0 determines mu.
    let gram: Mat3Q = linalg::mul(&linalg::transpose(&kq), &kq);
    let ginv = linalg::inverse(ring.trace_gram()).expect("étale");
    let mu = FieldElem(linalg::vec_mat(&gram[0], &ginv));
    for i in 0..3 {
        for j in 0..3 {
            let v = ring.pairing(&mu, &ring.theta_power(i), &ring.theta_power(j));
            if v != gram[i][j] {
                return Err(Error::Invariant("trace form does not match dot product".into()));
            }
        }
    }
    BalancedPair::new(ring, ideal, mu)
        .map_err(|e| Error::Invariant(format!("pair built from {t} is not balanced: {e}")))
}

fn leading_minors_positive(g: &Mat3Z) -> bool {
    let m1 = g[0][0].clone();
    let m2 = &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0];
    m1.is_positive() && m2.is_positive() && linalg::det(g).is_positive()
}

/// Unimodular `U` such that the rows of `U` form an LLL-reduced basis
/// (`delta = 3/4`) for the positive definite Gram matrix `g`.
fn lll_gram(g: &Mat3Z) -> Mat3Z {
    let mut u: Mat3Z = linalg::identity();
    let gram = |u: &Mat3Z| linalg::mul(&linalg::mul(u, g), &linalg::transpose(u));
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    // Gram-Schmidt coefficients mu and squared norms b from a Gram matrix
    let gso = |gm: &Mat3Z| {
        let mut mu: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); 3]; 3];
        let mut b: Vec<BigRational> = Vec::with_capacity(3);
        for i in 0..3 {
            for j in 0..i {
                let mut x = q(&gm[i][j]);
                for k in 0..j {
                    x -= &mu[j][k] * &mu[i][k] * &b[k];
                }
                mu[i][j] = x / &b[j];
            }
            let mut bi = q(&gm[i][i]);
            for k in 0..i {
                bi -= &mu[i][k] * &mu[i][k] * &b[k];
            }
            b.push(bi);
        }
        (mu, b)
    };
    let delta = BigRational::new(3.into(), 4.into());
    let mut k = 1;
    while k < 3 {
        for j in (0..k).rev() {
            let (mu, _) = gso(&gram(&u));
            let r = mu[k][j].round().to_integer();
            if !r.is_zero() {
                let row = u[j].clone();
                for c in 0..3 {
                    u[k][c] -= &r * &row[c];
                }
            }
        }
        let (mu, b) = gso(&gram(&u));
        if b[k] >= (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1] {
            k += 1;
        } else {
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    u
}

/// A unimodular `U` with `U G U^t = I`, for `G` symmetric positive definite
/// of determinant 1. Rows of `U` are the norm-1 vectors with first nonzero
/// coordinate positive, sorted in decreasing order, then oriented to
/// `det U = 1`.
pub fn gram_orthonormalize(g: &Mat3Z) -> Result<Mat3Z> {
    if !SymMat3::is_symmetric(g) || !leading_minors_positive(g) || !linalg::det(g).is_one() {
        return Err(Error::InvalidInput(
            "Gram matrix must be symmetric positive definite with determinant 1".into(),
        ));
    }
    // search in an LLL-reduced basis, where the box is small, then map back
    let red = lll_gram(g);
    let gr = linalg::mul(&linalg::mul(&red, g), &linalg::transpose(&red));
    let ginv = linalg::adjugate(&gr);
    let bound: [i64; 3] = std::array::from_fn(|i| {
        i64::try_from(ginv[i][i].sqrt()).expect("reduced Gram entries are small")
    });
    let mut units: Vec<[i64; 3]> = Vec::new();
    for x in -bound[0]..=bound[0] {
        for y in -bound[1]..=bound[1] {
            for z in -bound[2]..=bound[2] {
                let c = [x, y, z].map(BigInt::from);
                let n = linalg::vec_mat(&c, &gr)
                    .iter()
                    .zip(&c)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b);
                if !n.is_one() {
                    continue;
                }
                let v = linalg::vec_mat(&c, &red);
                let Some(v) = v.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>() else {
                    return Err(Error::Invariant("norm-one vector out of range".into()));
                };
                let first = v.iter().find(|c| **c != 0).copied().unwrap_or(0);
                if first > 0 {
                    units.push([v[0], v[1], v[2]]);
                }
            }
        }
    }
    if units.len() != 3 {
        return Err(Error::Invariant(format!(
            "expected 3 norm-one vectors up to sign, found {}",
            units.len()
        )));
    }
    units.sort_by(|a, b| b.cmp(a));
    let mut u = linalg::from_i64([units[0], units[1], units[2]]);
    if linalg::det(&u).is_negative() {
        u[2] = u[2].clone().map(|x| -x);
    }
    let check = linalg::mul(&linalg::mul(&u, g), &linalg::transpose(&u));
    if check != linalg::identity() {
        return Err(Error::Invariant("norm-one vectors are not orthonormal".into()));
    }
    Ok(u)
}

/// Gram matrix `tr(mu v_i v_j)` on the HNF basis of `I`.
pub fn pair_gram(ring: &CubicRing, pair: &BalancedPair) -> Result<Mat3Z> {
    let v = pair.ideal.basis_elems();
    let g: Mat3Q = std::array::from_fn(|i| {
        std::array::from_fn(|j| ring.pairing(&pair.mu, &v[i], &v[j]))
    });
    linalg::to_z(&g).ok_or_else(|| Error::NotBalanced("trace form is not integral on I".into()))
}

/// `T = -(tr(mu e_i theta e_j))` in an orthonormal basis `e` of `I`.
pub fn pair_to_matrix(ring: &CubicRing, pair: &BalancedPair) -> Result<SymMat3> {
    let g = pair_gram(ring, pair)?;
    if !linalg::det(&g).is_one() || !leading_minors_positive(&g) {
        return Err(Error::NotBalanced(
            "trace form on I is not unimodular positive definite".into(),
        ));
    }
    let u = gram_orthonormalize(&g)?;
    let v = pair.ideal.basis_elems();
    let e: Vec<FieldElem> = (0..3)
        .map(|i| {
            (0..3).fold(FieldElem::default(), |acc, j| {
                &acc + &v[j].scale(&BigRational::from_integer(u[i][j].clone()))
            })
        })
        .collect();
    let th = FieldElem::theta();
    let m: Mat3Q = std::array::from_fn(|i| {
        std::array::from_fn(|j| -ring.pairing(&pair.mu, &e[i], &ring.mul(&th, &e[j])))
    });
    let m = linalg::to_z(&m).ok_or_else(|| Error::Invariant("non-integral matrix".into()))?;
    if !SymMat3::is_symmetric(&m) {
        return Err(Error::Invariant("non-symmetric matrix".into()));
    }
    let t = SymMat3::from_matrix(&m);
    if &qp::charpoly(&t) != ring.polynomial() {
        return Err(Error::Invariant(format!("{t} has the wrong characteristic polynomial")));
    }
    Ok(t)
}

/// Whether `p2 = (beta I1, beta^-2 mu1)` for some `beta` in `E^x`.
pub fn pairs_equivalent(ring: &CubicRing, p1: &BalancedPair, p2: &BalancedPair) -> Result<bool> {
    let lambda = ring.div(&p1.mu, &p2.mu)?;
    for beta in ring.square_roots(&lambda)? {
        if p1.ideal.scale(ring, &beta) == p2.ideal {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug)]
pub struct QrClasses {
    /// `|Q_R|`.
    pub count: usize,
    /// One pair per `SO3(Z)`-orbit, in orbit order.
    pub representatives: Vec<BalancedPair>,
    /// 1 iff `Q_p` is nonempty.
    pub delta: u8,
}

/// `|Q_R|` as the number of orbits on `Q_p`, with the orbit representatives'
/// pairs checked to be pairwise inequivalent.
pub fn classes_qr(ring: &CubicRing) -> Result<QrClasses> {
    ring.require_totally_real()?;
    classes_qr_from(ring, &qp::compute(ring.polynomial(), None)?)
}

/// As `classes_qr`, reusing an orbit decomposition of `Q_p`.
pub fn classes_qr_from(ring: &CubicRing, res: &qp::QpResult) -> Result<QrClasses> {
    ring.require_totally_real()?;
    if &res.polynomial != ring.polynomial() {
        return Err(Error::InvalidInput("enumeration is for a different polynomial".into()));
    }
    let representatives: Vec<BalancedPair> = res
        .orbits
        .iter()
        .map(|o| matrix_to_pair(&o.rep, ring))
        .collect::<Result<_>>()?;
    let n = representatives.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let clash = pairs
        .par_iter()
        .map(|&(i, j)| pairs_equivalent(ring, &representatives[i], &representatives[j]))
        .collect::<Result<Vec<bool>>>()?;
    if clash.iter().any(|c| *c) {
        return Err(Error::Invariant("distinct orbits gave equivalent pairs".into()));
    }
    Ok(QrClasses {
        count: n,
        representatives,
        delta: u8::from(n > 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> CubicRing {
        CubicRing::new(s.parse().unwrap())
    }

    #[test]
    fn orthonormalize_identity_and_conjugates() {
        let id: Mat3Z = linalg::identity();
        assert_eq!(gram_orthonormalize(&id).unwrap(), id);
        let a = linalg::from_i64([[1, 2, 0], [0, 1, -1], [1, 3, 0]]);
        assert!(linalg::det(&a).abs().is_one());
        let g = linalg::mul(&linalg::transpose(&a), &a);
        let u = gram_orthonormalize(&g).unwrap();
        assert!(linalg::det(&u).is_one());
        assert_eq!(linalg::mul(&linalg::mul(&u, &g), &linalg::transpose(&u)), id);
        assert!(gram_orthonormalize(&linalg::from_i64([[2, 0, 0], [0, 1, 0], [0, 0, 1]])).is_err());
    }

    #[test]
    fn balance_examples() {
        let r = ring("t^3 - 2");
        assert!(!r.is_balanced(&FracIdeal::unit(&r), &FieldElem::one()).unwrap());

        let r = ring("t^3 - t^2 - 2t + 1");
        let t = qp::enumerate(r.polynomial()).unwrap().matrices[0].clone();
        let pair = matrix_to_pair(&t, &r).unwrap();
        assert!(r.is_balanced(&pair.ideal, &pair.mu).unwrap());
        // maximal ring: balanced iff mu I^2 equals the inverse different
        let mi2 = pair.ideal.mul(&r, &pair.ideal).scale(&r, &pair.mu);
        assert_eq!(mi2, r.inverse_different().unwrap());
        let beta = FieldElem::from_ints([2, -1, 3]);
        let scaled = pair.rescale(&r, &beta).unwrap();
        assert!(r.is_balanced(&scaled.ideal, &scaled.mu).unwrap());
        assert!(pairs_equivalent(&r, &pair, &scaled).unwrap());
        let two = pair.rescale(&r, &FieldElem::integer(2)).unwrap();
        assert!(pairs_equivalent(&r, &pair, &two).unwrap());
    }

    #[test]
    fn round_trip_lands_in_orbit() {
        let r = ring("t^3 - t^2 - 9t + 10");
        let res = qp::compute(r.polynomial(), None).unwrap();
        for t in res.matrices.iter().step_by(7) {
            let pair = matrix_to_pair(t, &r).unwrap();
            assert_eq!(pair_gram(&r, &pair).map(|g| linalg::det(&g)).unwrap(), BigInt::one());
            let back = pair_to_matrix(&r, &pair).unwrap();
            assert_eq!(qp::orbit_rep(&back), qp::orbit_rep(t));
        }
    }

    #[test]
    fn classes_examples() {
        let c = classes_qr(&ring("t^3 - t^2 - 2t + 1")).unwrap();
        assert_eq!((c.count, c.delta), (1, 1));
        let c = classes_qr(&ring("t^3 - t^2 - 9t + 8")).unwrap();
        assert_eq!((c.count, c.delta), (0, 0));
        let c = classes_qr(&ring("t^3 - t^2 - 9t + 10")).unwrap();
        assert_eq!(c.count, 2);
    }

    #[test]
    fn rejects_wrong_polynomial() {
        let r = ring("t^3 - 3t - 1");
        assert!(matrix_to_pair(&SymMat3::identity(), &r).is_err());
    }
}
