use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{CubicRing, FieldElem};
use crate::algebra::linalg::{self, Mat3Q};

/// A full-rank lattice in `E`, stored as its row Hermite normal form in
/// coordinates `(1, theta, theta^2)`. Equality of values is equality of
/// lattices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    basis: Mat3Q,
}

impl FracIdeal {
    /// Lattice spanned by the rows of `m`, if nonsingular.
    pub fn from_basis(m: &Mat3Q) -> Option<Self> {
        Self::from_generators(m)
    }

    /// Lattice generated by any number of rows, if it has rank 3.
    pub fn from_generators(rows: &[[BigRational; 3]]) -> Option<Self> {
        linalg::hnf_lattice_q(rows).map(|basis| FracIdeal { basis })
    }

    pub fn from_elems(gens: &[FieldElem]) -> Option<Self> {
        let rows: Vec<[BigRational; 3]> = gens.iter().map(|g| g.0.clone()).collect();
        Self::from_generators(&rows)
    }

    /// `R` itself.
    pub fn unit(_ring: &CubicRing) -> Self {
        FracIdeal {
            basis: linalg::identity(),
        }
    }

    pub fn basis(&self) -> &Mat3Q {
        &self.basis
    }

    pub fn basis_elems(&self) -> Vec<FieldElem> {
        self.basis.iter().map(|r| FieldElem(r.clone())).collect()
    }

    /// `|det|` of the basis, i.e. the index relative to `R`.
    pub fn norm(&self) -> BigRational {
        linalg::det(&self.basis).abs()
    }

    /// `x I`; `x` must be invertible.
    pub fn scale(&self, ring: &CubicRing, x: &FieldElem) -> Self {
        let rows: Vec<[BigRational; 3]> = self
            .basis_elems()
            .iter()
            .map(|b| ring.mul(x, b).0)
            .collect();
        Self::from_generators(&rows).expect("scaling by a unit keeps full rank")
    }

    pub fn mul(&self, ring: &CubicRing, other: &Self) -> Self {
        let mut rows = Vec::with_capacity(9);
        for a in self.basis_elems() {
            for b in other.basis_elems() {
                rows.push(ring.mul(&a, &b).0);
            }
        }
        Self::from_generators(&rows).expect("product of full-rank ideals has full rank")
    }

    pub fn contains(&self, x: &FieldElem) -> bool {
        let inv = linalg::inverse(&self.basis).expect("basis is nonsingular");
        linalg::vec_mat(&x.0, &inv).iter().all(|c| c.is_integer())
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.basis_elems().iter().all(|b| other.contains(b))
    }

    /// Closed under multiplication by `theta`, hence an `R`-module.
    pub fn is_r_module(&self, ring: &CubicRing) -> bool {
        let th = FieldElem::theta();
        self.basis_elems()
            .iter()
            .all(|b| self.contains(&ring.mul(&th, b)))
    }
}

impl fmt::Debug for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| format!("[{}, {}, {}]", r[0], r[1], r[2]))
            .collect();
        write!(f, "FracIdeal[{}]", rows.join(", "))
    }
}

/// HNF basis as a 3x3 array of exact fraction strings.
impl Serialize for FracIdeal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.basis
            .clone()
            .map(|r| r.map(|x| x.to_string()))
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FracIdeal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: [[String; 3]; 3] = Deserialize::deserialize(d)?;
        let mut m: Mat3Q = linalg::zero();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = rows[i][j].parse().map_err(serde::de::Error::custom)?;
            }
        }
        FracIdeal::from_basis(&m).ok_or_else(|| serde::de::Error::custom("singular basis"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> CubicRing {
        CubicRing::new(s.parse().unwrap())
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn norm_examples() {
        let r = ring("t^3 - 2");
        let unit = FracIdeal::unit(&r);
        assert_eq!(unit.norm(), q(1));
        assert_eq!(unit.scale(&r, &FieldElem::integer(2)).norm(), q(8));
        assert_eq!(unit.scale(&r, &FieldElem::theta()).norm(), q(2));
    }

    #[test]
    fn lattice_equality_ignores_generators() {
        let r = ring("t^3 - t^2 - 2t + 1");
        let th = FieldElem::theta();
        let a = FracIdeal::unit(&r).scale(&r, &th);
        // theta is a unit here (norm -1)
        assert_eq!(a, FracIdeal::unit(&r));
        let two = FracIdeal::unit(&r).scale(&r, &FieldElem::integer(2));
        let gens = [
            FieldElem::integer(2),
            FieldElem::from_ints([0, 2, 0]),
            FieldElem::from_ints([0, 0, 2]),
            FieldElem::from_ints([4, 6, 8]),
        ];
        assert_eq!(FracIdeal::from_elems(&gens).unwrap(), two);
        assert!(two.is_subset_of(&FracIdeal::unit(&r)));
        assert!(!FracIdeal::unit(&r).is_subset_of(&two));
    }

    #[test]
    fn ideals_are_modules() {
        let r = ring("t^3 - 2");
        let i = FracIdeal::from_elems(&[
            FieldElem::integer(2),
            FieldElem::from_ints([0, 1, 0]),
            FieldElem::from_ints([0, 0, 1]),
        ])
        .unwrap();
        assert!(i.is_r_module(&r));
        assert_eq!(i.norm(), q(2));
        assert_eq!(i, FracIdeal::unit(&r).scale(&r, &FieldElem::theta()));
        let not_module = FracIdeal::from_elems(&[
            FieldElem::integer(1),
            FieldElem::from_ints([0, 2, 0]),
            FieldElem::from_ints([0, 0, 1]),
        ])
        .unwrap();
        assert!(!not_module.is_r_module(&r));
    }

    #[test]
    fn json_round_trip() {
        let r = ring("t^3 - 2");
        let d = r.inverse_different().unwrap();
        let s = serde_json::to_string(&d).unwrap();
        let back: FracIdeal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
