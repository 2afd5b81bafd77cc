//! The cubic norm structure `J0 = H3(Z)` of integral symmetric 3x3 matrices,
//! its half-integral dual, and rank-one Fourier-coefficient vectors.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::algebra::linalg::{self, Mat3Z};
use crate::error::{Error, Result};

/// Integral symmetric matrix. Field order gives the canonical lexicographic
/// order `(d1, d2, d3, o23, o13, o12)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SymMat3 {
    pub d1: BigInt,
    pub d2: BigInt,
    pub d3: BigInt,
    pub o23: BigInt,
    pub o13: BigInt,
    pub o12: BigInt,
}

impl SymMat3 {
    pub fn new(d: [i64; 3], o23: i64, o13: i64, o12: i64) -> Self {
        Self {
            d1: d[0].into(),
            d2: d[1].into(),
            d3: d[2].into(),
            o23: o23.into(),
            o13: o13.into(),
            o12: o12.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new([1, 1, 1], 0, 0, 0)
    }

    pub fn diag(a: i64, b: i64, c: i64) -> Self {
        Self::new([a, b, c], 0, 0, 0)
    }

    /// Reads the upper triangle; the caller is responsible for symmetry.
    pub fn from_matrix(m: &Mat3Z) -> Self {
        Self {
            d1: m[0][0].clone(),
            d2: m[1][1].clone(),
            d3: m[2][2].clone(),
            o23: m[1][2].clone(),
            o13: m[0][2].clone(),
            o12: m[0][1].clone(),
        }
    }

    pub fn is_symmetric(m: &Mat3Z) -> bool {
        m[0][1] == m[1][0] && m[0][2] == m[2][0] && m[1][2] == m[2][1]
    }

    pub fn to_matrix(&self) -> Mat3Z {
        [
            [self.d1.clone(), self.o12.clone(), self.o13.clone()],
            [self.o12.clone(), self.d2.clone(), self.o23.clone()],
            [self.o13.clone(), self.o23.clone(), self.d3.clone()],
        ]
    }

    pub fn trace(&self) -> BigInt {
        &self.d1 + &self.d2 + &self.d3
    }

    pub fn det(&self) -> BigInt {
        linalg::det(&self.to_matrix())
    }

    /// The adjugate `X^#`, with `X X^# = det(X) I`.
    pub fn sharp(&self) -> SymMat3 {
        let (a, b, c) = (&self.d1, &self.d2, &self.d3);
        let (d, e, f) = (&self.o23, &self.o13, &self.o12);
        SymMat3 {
            d1: b * c - d * d,
            d2: a * c - e * e,
            d3: a * b - f * f,
            o23: e * f - a * d,
            o13: f * d - b * e,
            o12: d * e - c * f,
        }
    }

    /// Second elementary symmetric function of the eigenvalues, `tr(X^#)`.
    pub fn sigma2(&self) -> BigInt {
        self.sharp().trace()
    }

    /// `tr(XY)`.
    pub fn trace_pair(&self, other: &SymMat3) -> BigInt {
        &self.d1 * &other.d1
            + &self.d2 * &other.d2
            + &self.d3 * &other.d3
            + BigInt::from(2) * (&self.o23 * &other.o23 + &self.o13 * &other.o13 + &self.o12 * &other.o12)
    }

    /// `g X g^t`.
    pub fn conjugate(&self, g: &Mat3Z) -> SymMat3 {
        let m = linalg::mul(&linalg::mul(g, &self.to_matrix()), &linalg::transpose(g));
        SymMat3::from_matrix(&m)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        use num_traits::Signed;
        [&self.d1, &self.d2, &self.d3, &self.o23, &self.o13, &self.o12]
            .into_iter()
            .map(|x| x.abs())
            .max()
            .unwrap()
    }

    pub fn to_half(&self) -> HalfSymMat3 {
        let q = |x: &BigInt| BigRational::from_integer(x.clone());
        HalfSymMat3 {
            d1: q(&self.d1),
            d2: q(&self.d2),
            d3: q(&self.d3),
            o23: q(&self.o23),
            o13: q(&self.o13),
            o12: q(&self.o12),
        }
    }
}

impl fmt::Debug for SymMat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.to_matrix();
        write!(
            f,
            "[[{}, {}, {}], [{}, {}, {}], [{}, {}, {}]]",
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]
        )
    }
}

impl fmt::Display for SymMat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// JSON form: `[[.,.,.],[.,.,.],[.,.,.]]` with integer entries.
impl Serialize for SymMat3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self.to_matrix();
        let mut seq = s.serialize_seq(Some(3))?;
        for row in &m {
            seq.serialize_element(&row.clone().map(Int))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for SymMat3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: [[Int; 3]; 3] = Deserialize::deserialize(d)?;
        let m = rows.map(|r| r.map(|x| x.0));
        if !SymMat3::is_symmetric(&m) {
            return Err(serde::de::Error::custom("matrix is not symmetric"));
        }
        Ok(SymMat3::from_matrix(&m))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct Int(#[serde(with = "crate::serde_util::bigint")] BigInt);

/// Symmetric matrix with rational entries. Elements of the dual lattice
/// `J0^v` have integral diagonal and half-integral off-diagonal entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct HalfSymMat3 {
    pub d1: BigRational,
    pub d2: BigRational,
    pub d3: BigRational,
    pub o23: BigRational,
    pub o13: BigRational,
    pub o12: BigRational,
}

impl HalfSymMat3 {
    fn entries(&self) -> [&BigRational; 6] {
        [&self.d1, &self.d2, &self.d3, &self.o23, &self.o13, &self.o12]
    }

    /// Builds `Y / 2` from an integral symmetric `Y`.
    pub fn from_doubled(y: &SymMat3) -> Self {
        let h = |x: &BigInt| BigRational::new(x.clone(), BigInt::from(2));
        Self {
            d1: h(&y.d1),
            d2: h(&y.d2),
            d3: h(&y.d3),
            o23: h(&y.o23),
            o13: h(&y.o13),
            o12: h(&y.o12),
        }
    }

    pub fn in_dual_lattice(&self) -> bool {
        let two = BigRational::from_integer(BigInt::from(2));
        [&self.d1, &self.d2, &self.d3].iter().all(|x| x.is_integer())
            && [&self.o23, &self.o13, &self.o12]
                .iter()
                .all(|x| (*x * &two).is_integer())
    }

    /// Membership in `J0` itself.
    pub fn is_integral(&self) -> bool {
        self.entries().iter().all(|x| x.is_integer())
    }

    pub fn to_integral(&self) -> Option<SymMat3> {
        self.is_integral().then(|| SymMat3 {
            d1: self.d1.to_integer(),
            d2: self.d2.to_integer(),
            d3: self.d3.to_integer(),
            o23: self.o23.to_integer(),
            o13: self.o13.to_integer(),
            o12: self.o12.to_integer(),
        })
    }

    pub fn trace(&self) -> BigRational {
        &self.d1 + &self.d2 + &self.d3
    }

    pub fn det(&self) -> BigRational {
        let (a, b, c) = (&self.d1, &self.d2, &self.d3);
        let (d, e, f) = (&self.o23, &self.o13, &self.o12);
        let two = BigRational::from_integer(2.into());
        a * b * c + two * d * e * f - a * d * d - b * e * e - c * f * f
    }

    pub fn sharp(&self) -> HalfSymMat3 {
        let (a, b, c) = (&self.d1, &self.d2, &self.d3);
        let (d, e, f) = (&self.o23, &self.o13, &self.o12);
        HalfSymMat3 {
            d1: b * c - d * d,
            d2: a * c - e * e,
            d3: a * b - f * f,
            o23: e * f - a * d,
            o13: f * d - b * e,
            o12: d * e - c * f,
        }
    }

    pub fn trace_pair(&self, other: &HalfSymMat3) -> BigRational {
        let two = BigRational::from_integer(2.into());
        &self.d1 * &other.d1
            + &self.d2 * &other.d2
            + &self.d3 * &other.d3
            + two * (&self.o23 * &other.o23 + &self.o13 * &other.o13 + &self.o12 * &other.o12)
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|x| x.is_zero())
    }
}

impl From<&SymMat3> for HalfSymMat3 {
    fn from(x: &SymMat3) -> Self {
        x.to_half()
    }
}

/// JSON form: 3x3 array of exact fraction strings such as `"1/2"`.
impl Serialize for HalfSymMat3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (a, b, c) = (&self.d1, &self.d2, &self.d3);
        let (d, e, f) = (&self.o23, &self.o13, &self.o12);
        let rows = [[a, f, e], [f, b, d], [e, d, c]].map(|r| r.map(|x| x.to_string()));
        rows.serialize(s)
    }
}

/// `(a, b, c, d)` in `Z + J0^v + J0^v + Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WVector {
    #[serde(with = "crate::serde_util::bigint")]
    pub a: BigInt,
    pub b: HalfSymMat3,
    pub c: HalfSymMat3,
    #[serde(with = "crate::serde_util::bigint")]
    pub d: BigInt,
}

impl WVector {
    /// `(det T, T^#, T, 1)`.
    pub fn rank_one_from(t: &SymMat3) -> Self {
        Self {
            a: t.det(),
            b: t.sharp().to_half(),
            c: t.to_half(),
            d: BigInt::one(),
        }
    }
}

/// Whether `w = (det c, c^#, c, 1)`. Only `d = 1` is supported.
pub fn rank_one_d1(w: &WVector) -> Result<bool> {
    if !w.d.is_one() {
        return Err(Error::Unsupported(
            "rank-one test is implemented for d = 1 only (general rank unsupported)".into(),
        ));
    }
    Ok(w.b == w.c.sharp() && BigRational::from_integer(w.a.clone()) == w.c.det())
}

/// All `X` in `J0^v` with entries bounded by `bound` in absolute value such
/// that `X^#` lies in `J0^v` but `X` is not integral. Expected to be empty.
///
/// Works with `Y = 2X`, so `Y` has even diagonal; `X^#` is in the dual
/// lattice iff `Y^#` has diagonal divisible by 4 and off-diagonal divisible
/// by 2.
pub fn dual_sharp_scan(bound: u32) -> Vec<HalfSymMat3> {
    let b = 2 * i64::from(bound);
    let diag: Vec<i64> = (-b..=b).step_by(2).collect();
    let off: Vec<i64> = (-b..=b).collect();
    let mut hits: Vec<[i64; 6]> = diag
        .par_iter()
        .flat_map_iter(|&y1| {
            let mut out = Vec::new();
            for &y2 in &diag {
                for &y3 in &diag {
                    for &d in &off {
                        for &e in &off {
                            for &f in &off {
                                if d % 2 == 0 && e % 2 == 0 && f % 2 == 0 {
                                    continue;
                                }
                                let s = [
                                    y2 * y3 - d * d,
                                    y1 * y3 - e * e,
                                    y1 * y2 - f * f,
                                    e * f - y1 * d,
                                    f * d - y2 * e,
                                    d * e - y3 * f,
                                ];
                                if s[..3].iter().all(|x| x.rem_euclid(4) == 0)
                                    && s[3..].iter().all(|x| x.rem_euclid(2) == 0)
                                {
                                    out.push([y1, y2, y3, d, e, f]);
                                }
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    hits.sort();
    hits.into_iter()
        .map(|[y1, y2, y3, d, e, f]| {
            HalfSymMat3::from_doubled(&SymMat3::new([y1, y2, y3], d, e, f))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_examples() {
        assert_eq!(SymMat3::identity().sharp(), SymMat3::identity());
        assert_eq!(SymMat3::diag(1, 2, 3).sharp(), SymMat3::diag(6, 3, 2));
        assert_eq!(SymMat3::diag(1, 1, 0).sharp(), SymMat3::diag(0, 0, 1));
    }

    #[test]
    fn sharp_is_the_adjugate() {
        let x = SymMat3::new([2, -1, 3], 4, -2, 5);
        let m = linalg::mul(&x.to_matrix(), &x.sharp().to_matrix());
        let d = x.det();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { d.clone() } else { BigInt::zero() };
                assert_eq!(m[i][j], want);
            }
        }
        assert_eq!(x.to_half().det(), BigRational::from_integer(d));
    }

    #[test]
    fn det_and_trace_pair_examples() {
        assert_eq!(SymMat3::identity().det(), BigInt::one());
        assert_eq!(SymMat3::identity().trace_pair(&SymMat3::identity()), BigInt::from(3));
        assert_eq!(SymMat3::diag(1, 2, 3).det(), BigInt::from(6));
        assert_eq!(SymMat3::diag(1, 2, 3).trace_pair(&SymMat3::identity()), BigInt::from(6));
    }

    #[test]
    fn rank_one_examples() {
        let w = WVector::rank_one_from(&SymMat3::diag(1, 2, 3));
        assert!(rank_one_d1(&w).unwrap());
        let zero = WVector {
            a: BigInt::zero(),
            b: HalfSymMat3::default(),
            c: HalfSymMat3::default(),
            d: BigInt::one(),
        };
        assert!(rank_one_d1(&zero).unwrap());
        let bad = WVector { a: BigInt::one(), ..zero.clone() };
        assert!(!rank_one_d1(&bad).unwrap());
        let d2 = WVector { d: BigInt::from(2), ..zero };
        assert!(matches!(rank_one_d1(&d2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn half_integral_membership() {
        let y = SymMat3::new([2, 0, 4], 1, 0, 3);
        let x = HalfSymMat3::from_doubled(&y);
        assert!(x.in_dual_lattice());
        assert!(!x.is_integral());
        let z = HalfSymMat3::from_doubled(&SymMat3::new([1, 0, 0], 0, 0, 0));
        assert!(!z.in_dual_lattice());
    }

    #[test]
    fn dual_sharp_scan_small_bounds() {
        assert!(dual_sharp_scan(0).is_empty());
        assert!(dual_sharp_scan(1).is_empty());
        assert!(dual_sharp_scan(2).is_empty());
    }

    #[test]
    fn json_shapes() {
        let x = SymMat3::new([1, 2, 3], 4, 5, 6);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[[1,6,5],[6,2,4],[5,4,3]]");
        let back: SymMat3 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<SymMat3>("[[1,2,0],[0,1,0],[0,0,1]]").is_err());
        let h = HalfSymMat3::from_doubled(&SymMat3::new([2, 2, 2], 1, 0, 0));
        assert_eq!(
            serde_json::to_string(&h).unwrap(),
            r#"[["1","0","0"],["0","1","1/2"],["0","1/2","1"]]"#
        );
    }
}
