//! Enumeration of `Q_p = {T in H3(Z) : det(tI + T) = p(t)}` and its
//! decomposition into `SO3(Z)`-orbits.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::{self, Mat3Z};
use crate::algebra::MonicCubic;
use crate::error::{Error, Result};
use crate::jordan::SymMat3;

/// A rotation with entries in `{-1, 0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct So3Element(pub [[i64; 3]; 3]);

impl So3Element {
    pub fn matrix(&self) -> Mat3Z {
        linalg::from_i64(self.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        So3Element(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum())
        }))
    }

    pub fn transpose(&self) -> Self {
        So3Element(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i])))
    }

    pub fn is_identity(&self) -> bool {
        self.0 == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    }

    /// `g T g^t` on the small-integer representation.
    fn conj(&self, t: &Small) -> Small {
        let m = t.matrix();
        let g = &self.0;
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0;
                for k in 0..3 {
                    for l in 0..3 {
                        s += g[i][k] * m[k][l] * g[j][l];
                    }
                }
                out[i][j] = s;
            }
        }
        Small([out[0][0], out[1][1], out[2][2], out[1][2], out[0][2], out[0][1]])
    }
}

/// The 24 signed permutation matrices of determinant 1, sorted.
pub fn so3z_elements() -> &'static [So3Element] {
    static ELEMS: OnceLock<Vec<So3Element>> = OnceLock::new();
    ELEMS.get_or_init(|| {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(24);
        for p in perms {
            for signs in 0..8u32 {
                let mut m = [[0i64; 3]; 3];
                for (i, &pi) in p.iter().enumerate() {
                    m[i][pi] = if signs >> i & 1 == 1 { -1 } else { 1 };
                }
                let g = So3Element(m);
                if linalg::det(&g.matrix()) == BigInt::from(1) {
                    out.push(g);
                }
            }
        }
        out.sort();
        out
    })
}

/// `(d1, d2, d3, o23, o13, o12)` as machine integers; same ordering as
/// [`SymMat3`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Small([i64; 6]);

impl Small {
    fn from_sym(t: &SymMat3) -> Option<Self> {
        let f = |x: &BigInt| x.to_i64();
        Some(Small([f(&t.d1)?, f(&t.d2)?, f(&t.d3)?, f(&t.o23)?, f(&t.o13)?, f(&t.o12)?]))
    }

    fn to_sym(self) -> SymMat3 {
        let [a, b, c, d, e, f] = self.0;
        SymMat3::new([a, b, c], d, e, f)
    }

    fn matrix(&self) -> [[i64; 3]; 3] {
        let [a, b, c, d, e, f] = self.0;
        [[a, f, e], [f, b, d], [e, d, c]]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// Lexicographically minimal member.
    pub rep: SymMat3,
    pub size: usize,
    pub stabilizer_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpResult {
    pub polynomial: MonicCubic,
    pub total: usize,
    /// Sorted in canonical order.
    pub matrices: Vec<SymMat3>,
    /// Empty until [`orbit_decompose`] has run. Sorted by representative.
    pub orbits: Vec<Orbit>,
}

impl QpResult {
    /// Index into `orbits` of the orbit containing `t`.
    pub fn orbit_index(&self, t: &SymMat3) -> Option<usize> {
        let rep = orbit_rep(t);
        self.orbits.binary_search_by(|o| o.rep.cmp(&rep)).ok()
    }

    pub fn orbit_members(&self, idx: usize) -> Vec<&SymMat3> {
        let rep = &self.orbits[idx].rep;
        self.matrices.iter().filter(|t| &orbit_rep(t) == rep).collect()
    }
}

/// Characteristic-polynomial coefficients `(tr T, tr T^#, det T)` of
/// `det(tI + T)`.
pub fn charpoly(t: &SymMat3) -> MonicCubic {
    MonicCubic::new(t.trace(), t.sigma2(), t.det())
}

/// Lexicographically smallest element of the `SO3(Z)`-orbit of `t`.
pub fn orbit_rep(t: &SymMat3) -> SymMat3 {
    so3z_elements()
        .iter()
        .map(|g| t.conjugate(&g.matrix()))
        .min()
        .expect("group is nonempty")
}

pub fn stabilizer(t: &SymMat3) -> Vec<So3Element> {
    so3z_elements()
        .iter()
        .filter(|g| &t.conjugate(&g.matrix()) == t)
        .copied()
        .collect()
}

/// Exhaustive enumeration of `Q_p` using every available core.
pub fn enumerate(p: &MonicCubic) -> Result<QpResult> {
    enumerate_with_jobs(p, None)
}

/// As [`enumerate`], restricted to `jobs` worker threads when given. The
/// result does not depend on the number of workers.
pub fn enumerate_with_jobs(p: &MonicCubic, jobs: Option<usize>) -> Result<QpResult> {
    let matrices = match jobs {
        None => enumerate_matrices(p)?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?
            .install(|| enumerate_matrices(p))?,
    };
    for t in &matrices {
        if &charpoly(t) != p {
            return Err(Error::Invariant(format!(
                "enumerated {t} does not have characteristic polynomial {p}"
            )));
        }
    }
    Ok(QpResult {
        polynomial: p.clone(),
        total: matrices.len(),
        matrices,
        orbits: Vec::new(),
    })
}

fn enumerate_matrices(p: &MonicCubic) -> Result<Vec<SymMat3>> {
    if !p.is_totally_real() {
        return Ok(Vec::new());
    }
    let too_big = || Error::Unsupported(format!("coefficients of {p} exceed the machine-integer kernel"));
    let a2 = p.a2.to_i64().ok_or_else(too_big)? as i128;
    let a1 = p.a1.to_i64().ok_or_else(too_big)? as i128;
    let a0 = p.a0.to_i64().ok_or_else(too_big)? as i128;
    let b = p
        .max_abs_root_bound()
        .to_i64()
        .filter(|b| *b < 1 << 20)
        .ok_or_else(too_big)? as i128;

    let mut found: Vec<Small> = (-b..=b)
        .into_par_iter()
        .flat_map_iter(|d1| {
            let mut out = Vec::new();
            for d2 in -b..=b {
                let d3 = a2 - d1 - d2;
                if d3.abs() > b {
                    continue;
                }
                // sigma2 = e2(diag) - (o23^2 + o13^2 + o12^2)
                let s = d1 * d2 + d1 * d3 + d2 * d3 - a1;
                if s < 0 {
                    continue;
                }
                let r1 = isqrt(s).min(b);
                for o23 in -r1..=r1 {
                    let s1 = s - o23 * o23;
                    let r2 = isqrt(s1).min(b);
                    for o13 in -r2..=r2 {
                        let s2 = s1 - o13 * o13;
                        let r3 = isqrt(s2);
                        if r3 * r3 != s2 || r3 > b {
                            continue;
                        }
                        let cands: &[i128] = if r3 == 0 { &[0] } else { &[-r3, r3] };
                        for &o12 in cands {
                            let det = d1 * d2 * d3 + 2 * o23 * o13 * o12
                                - d1 * o23 * o23
                                - d2 * o13 * o13
                                - d3 * o12 * o12;
                            if det == a0 {
                                out.push(Small(
                                    [d1, d2, d3, o23, o13, o12].map(|x| x as i64),
                                ));
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    found.sort_unstable();
    Ok(found.into_iter().map(Small::to_sym).collect())
}

fn isqrt(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Fills `result.orbits`, checking that orbits partition the matrices and
/// that `size * stabilizer = 24`.
pub fn orbit_decompose(mut result: QpResult) -> Result<QpResult> {
    let small: Vec<Small> = result
        .matrices
        .iter()
        .map(|t| Small::from_sym(t).ok_or_else(|| Error::Invariant("entry overflow".into())))
        .collect::<Result<_>>()?;
    let group = so3z_elements();
    let mut assigned = vec![false; small.len()];
    let mut orbits = Vec::new();
    for i in 0..small.len() {
        if assigned[i] {
            continue;
        }
        let t = small[i];
        let mut images: Vec<Small> = group.iter().map(|g| g.conj(&t)).collect();
        let stab = images.iter().filter(|x| **x == t).count();
        images.sort_unstable();
        images.dedup();
        for img in &images {
            let j = small
                .binary_search(img)
                .map_err(|_| Error::Invariant(format!("orbit of {} leaves Q_p", t.to_sym())))?;
            if assigned[j] {
                return Err(Error::Invariant("orbits overlap".into()));
            }
            assigned[j] = true;
        }
        if images.len() * stab != group.len() {
            return Err(Error::Invariant("orbit-stabilizer count mismatch".into()));
        }
        // matrices are sorted, so the first unassigned member is the minimum
        debug_assert_eq!(images[0], t);
        orbits.push(Orbit {
            rep: t.to_sym(),
            size: images.len(),
            stabilizer_order: stab,
        });
    }
    result.orbits = orbits;
    Ok(result)
}

/// Enumeration followed by orbit decomposition.
pub fn compute(p: &MonicCubic, jobs: Option<usize>) -> Result<QpResult> {
    orbit_decompose(enumerate_with_jobs(p, jobs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(s: &str) -> MonicCubic {
        s.parse().unwrap()
    }

    #[test]
    fn so3z_is_a_group_of_order_24() {
        let g = so3z_elements();
        assert_eq!(g.len(), 24);
        assert!(g.iter().any(So3Element::is_identity));
        for a in g {
            assert!(a.mul(&a.transpose()).is_identity());
            for b in g {
                assert!(g.contains(&a.mul(b)));
            }
        }
    }

    #[test]
    fn small_table_counts() {
        assert_eq!(enumerate(&cubic("t^3 - t^2 - 2t + 1")).unwrap().total, 24);
        assert_eq!(enumerate(&cubic("t^3 - 2")).unwrap().total, 0);
        assert_eq!(enumerate(&cubic("t^3 - 3t - 1")).unwrap().total, 24);
    }

    #[test]
    fn orbit_examples() {
        let r = compute(&cubic("t^3 - t^2 - 2t + 1"), None).unwrap();
        assert_eq!(r.orbits.len(), 1);
        assert_eq!((r.orbits[0].size, r.orbits[0].stabilizer_order), (24, 1));

        let r = compute(&cubic("t^3 - t^2 - 9t + 10"), None).unwrap();
        assert_eq!(r.orbits.len(), 2);
        assert!(r.orbits.iter().all(|o| o.size == 24 && o.stabilizer_order == 1));

        let r = compute(&cubic("(t-1)(t^2-2)"), None).unwrap();
        assert_eq!(r.total, 12);
        assert_eq!(r.orbits.len(), 1);
        assert_eq!((r.orbits[0].size, r.orbits[0].stabilizer_order), (12, 2));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let p = cubic("t^3 - t^2 - 11t + 12");
        let a = compute(&p, Some(1)).unwrap();
        let b = compute(&p, Some(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total, 48);
    }

    #[test]
    fn degenerate_polynomials_do_not_crash() {
        // t^3: only the zero matrix is nilpotent and symmetric
        let r = compute(&cubic("t^3"), None).unwrap();
        assert_eq!(r.matrices, vec![SymMat3::default()]);
        // (t-1)^3 has only T = -I
        let r = compute(&cubic("(t+1)^3"), None).unwrap();
        assert_eq!(r.matrices, vec![SymMat3::identity()]);
        assert_eq!(r.orbits[0].stabilizer_order, 24);
    }

    #[test]
    fn orbit_lookup() {
        let r = compute(&cubic("t^3 - t^2 - 9t + 10"), None).unwrap();
        for t in &r.matrices {
            let i = r.orbit_index(t).unwrap();
            assert!(r.orbit_members(i).contains(&t));
        }
        assert_eq!(r.orbit_members(0).len() + r.orbit_members(1).len(), 48);
    }
}
