//! Dense 3x3 matrices over `Z` and `Q`, plus integer Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Mat3<T> = [[T; 3]; 3];
pub type Mat3Z = Mat3<BigInt>;
pub type Mat3Q = Mat3<BigRational>;

pub fn from_i64(m: [[i64; 3]; 3]) -> Mat3Z {
    m.map(|r| r.map(BigInt::from))
}

pub fn identity<T: Zero + One + Clone>() -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { T::one() } else { T::zero() }))
}

pub fn zero<T: Zero + Clone>() -> Mat3<T> {
    std::array::from_fn(|_| std::array::from_fn(|_| T::zero()))
}

pub fn mul<T>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T>
where
    T: Zero + Clone,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..3).fold(T::zero(), |acc, k| acc + &a[i][k] * &b[k][j])
        })
    })
}

pub fn transpose<T: Clone>(a: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn det<T>(m: &Mat3<T>) -> T
where
    T: Clone + std::ops::Sub<Output = T> + std::ops::Add<Output = T>,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    let c0 = &m[1][1] * &m[2][2] - &m[1][2] * &m[2][1];
    let c1 = &m[1][2] * &m[2][0] - &m[1][0] * &m[2][2];
    let c2 = &m[1][0] * &m[2][1] - &m[1][1] * &m[2][0];
    &m[0][0] * &c0 + &m[0][1] * &c1 + &m[0][2] * &c2
}

/// Classical adjugate: `m * adj(m) = det(m) I`.
pub fn adjugate<T>(m: &Mat3<T>) -> Mat3<T>
where
    T: Clone + std::ops::Sub<Output = T>,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
        &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
    };
    [
        [c(1, 2, 1, 2), c(0, 2, 2, 1), c(0, 1, 1, 2)],
        [c(1, 2, 2, 0), c(0, 2, 0, 2), c(0, 1, 2, 0)],
        [c(1, 2, 0, 1), c(0, 2, 1, 0), c(0, 1, 0, 1)],
    ]
}

pub fn inverse(m: &Mat3Q) -> Option<Mat3Q> {
    let d = det(m);
    if d.is_zero() {
        return None;
    }
    Some(adjugate(m).map(|r| r.map(|x| x / &d)))
}

pub fn to_q(m: &Mat3Z) -> Mat3Q {
    m.clone().map(|r| r.map(BigRational::from_integer))
}

/// `Some` if every entry is an integer.
pub fn to_z(m: &Mat3Q) -> Option<Mat3Z> {
    let mut out = zero::<BigInt>();
    for i in 0..3 {
        for j in 0..3 {
            if !m[i][j].is_integer() {
                return None;
            }
            out[i][j] = m[i][j].to_integer();
        }
    }
    Some(out)
}

pub fn vec_mat<T>(v: &[T; 3], m: &Mat3<T>) -> [T; 3]
where
    T: Zero + Clone,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    std::array::from_fn(|j| (0..3).fold(T::zero(), |acc, k| acc + &v[k] * &m[k][j]))
}

pub fn mat_vec<T>(m: &Mat3<T>, v: &[T; 3]) -> [T; 3]
where
    T: Zero + Clone,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    std::array::from_fn(|i| (0..3).fold(T::zero(), |acc, k| acc + &m[i][k] * &v[k]))
}

/// Upper-triangular row Hermite normal form of a nonsingular integer matrix:
/// positive pivots on the diagonal, entries above each pivot reduced into
/// `[0, pivot)`. The row lattice is unchanged.
pub fn hnf_rows(m: &Mat3Z) -> Mat3Z {
    hnf_lattice(m).expect("hnf_rows: singular matrix")
}

/// Row HNF basis of the lattice generated by `rows`, or `None` if they do
/// not span a rank-3 lattice.
pub fn hnf_lattice(rows: &[[BigInt; 3]]) -> Option<Mat3Z> {
    let mut a: Vec<[BigInt; 3]> = rows.to_vec();
    if a.len() < 3 {
        return None;
    }
    for col in 0..3 {
        // Euclid on rows col.. until a single nonzero entry remains in `col`.
        loop {
            let piv = (col..a.len())
                .filter(|&r| !a[r][col].is_zero())
                .min_by_key(|&r| a[r][col].abs())?;
            a.swap(col, piv);
            let mut done = true;
            for r in col + 1..a.len() {
                if a[r][col].is_zero() {
                    continue;
                }
                let q = a[r][col].div_floor(&a[col][col]);
                let pivot_row = a[col].clone();
                for k in 0..3 {
                    a[r][k] -= &q * &pivot_row[k];
                }
                if !a[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[col][col].is_negative() {
            for k in 0..3 {
                a[col][k] = -&a[col][k];
            }
        }
    }
    for col in 0..3 {
        for r in 0..col {
            let q = a[r][col].div_floor(&a[col][col]);
            if q.is_zero() {
                continue;
            }
            let pivot_row = a[col].clone();
            for k in 0..3 {
                a[r][k] -= &q * &pivot_row[k];
            }
        }
    }
    Some([a[0].clone(), a[1].clone(), a[2].clone()])
}

/// Row HNF of the lattice generated by rational `rows`: scale to integers,
/// reduce, scale back.
pub fn hnf_lattice_q(rows: &[[BigRational; 3]]) -> Option<Mat3Q> {
    let d = rows
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let dq = BigRational::from_integer(d.clone());
    let scaled: Vec<[BigInt; 3]> = rows
        .iter()
        .map(|r| r.clone().map(|x| (x * &dq).to_integer()))
        .collect();
    let h = hnf_lattice(&scaled)?;
    Some(h.map(|r| r.map(|x| BigRational::new(x, d.clone()))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjugate_identity() {
        let m = from_i64([[2, -1, 3], [0, 4, 1], [5, 2, -2]]);
        let d = det(&m);
        let p = mul(&m, &adjugate(&m));
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { d.clone() } else { BigInt::zero() };
                assert_eq!(p[i][j], want);
            }
        }
    }

    #[test]
    fn hnf_is_canonical() {
        let m = from_i64([[2, 4, 6], [1, 3, 5], [0, 0, 7]]);
        let h = hnf_rows(&m);
        // multiply by a unimodular matrix on the left; HNF must not change
        let u = from_i64([[1, 2, 0], [0, 1, 0], [3, 7, 1]]);
        assert_eq!(det(&u), BigInt::one());
        assert_eq!(hnf_rows(&mul(&u, &m)), h);
        assert!(h[1][0].is_zero() && h[2][0].is_zero() && h[2][1].is_zero());
        assert_eq!(det(&h).abs(), det(&m).abs());
        for c in 0..3 {
            assert!(h[c][c].is_positive());
            for r in 0..c {
                assert!(!h[r][c].is_negative() && h[r][c] < h[c][c]);
            }
        }
    }

    #[test]
    fn hnf_of_redundant_generators() {
        let rows = [[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 1]].map(|r| r.map(BigInt::from));
        let h = hnf_lattice(&rows).unwrap();
        assert_eq!(h, from_i64([[1, 1, 1], [0, 2, 0], [0, 0, 2]]));
        let flat = [[1, 0, 0], [0, 1, 0], [1, 1, 0]].map(|r| r.map(BigInt::from));
        assert!(hnf_lattice(&flat).is_none());
    }

    #[test]
    fn rational_inverse() {
        let m = to_q(&from_i64([[1, 2, 0], [0, 1, 3], [4, 0, 1]]));
        let inv = inverse(&m).unwrap();
        assert_eq!(mul(&m, &inv), identity());
    }
}
