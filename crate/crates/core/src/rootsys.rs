//! The F4 root system in the Bourbaki model, with long roots of squared
//! length 2, together with the parabolic root subsets attached to the simple
//! roots `a1, a2` (long) and `a3, a4` (short).
//!
//! Diagram: `a1 - a2 => a3 - a4`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

type Q = Rational64;
pub type Vec4 = [Q; 4];
pub type Mat4 = [[Q; 4]; 4];

/// `m_{a_i}` for the simple roots.
pub const M_VALUES: [i64; 4] = [2, 2, 1, 1];

/// Height of the highest root `2a1 + 3a2 + 4a3 + 2a4`.
pub const HIGHEST_HEIGHT: i64 = 11;

pub const WEYL_ORDER: usize = 1152;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn half(n: i64) -> Q {
    Q::new(n, 2)
}

pub fn dot(a: &Vec4, b: &Vec4) -> Q {
    (0..4).fold(Q::zero(), |acc, i| acc + a[i] * b[i])
}

fn add(a: &Vec4, b: &Vec4) -> Vec4 {
    std::array::from_fn(|i| a[i] + b[i])
}

fn sub(a: &Vec4, b: &Vec4) -> Vec4 {
    std::array::from_fn(|i| a[i] - b[i])
}

fn scale(c: Q, a: &Vec4) -> Vec4 {
    a.map(|x| c * x)
}

fn ser_vec4<S: Serializer>(v: &Vec4, s: S) -> Result<S::Ok, S::Error> {
    v.map(|x| x.to_string()).serialize(s)
}

/// A root, in Euclidean coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Root(#[serde(serialize_with = "ser_vec4")] pub Vec4);

impl Root {
    pub fn coords(&self) -> &Vec4 {
        &self.0
    }

    pub fn norm2(&self) -> Q {
        dot(&self.0, &self.0)
    }

    pub fn is_long(&self) -> bool {
        self.norm2() == q(2)
    }

    /// `2 a / (a, a)`.
    pub fn coroot(&self) -> Vec4 {
        scale(q(2) / self.norm2(), &self.0)
    }

    pub fn neg(&self) -> Root {
        Root(self.0.map(|x| -x))
    }
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", c.join(", "))
    }
}

/// A weight, in Euclidean coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Weight(#[serde(serialize_with = "ser_vec4")] pub Vec4);

/// An element of the Weyl group, as an exact orthogonal matrix acting on
/// column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement(pub Mat4);

impl WeylElement {
    pub fn identity() -> Self {
        WeylElement(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { Q::one() } else { Q::zero() })
        }))
    }

    /// Reflection `v -> v - <v, a^vee> a`.
    pub fn reflection(a: &Root) -> Self {
        let c = a.coroot();
        WeylElement(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let d = if i == j { Q::one() } else { Q::zero() };
                d - a.0[i] * c[j]
            })
        }))
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        std::array::from_fn(|i| dot(&self.0[i], v))
    }

    /// `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        WeylElement(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).fold(Q::zero(), |acc, k| acc + self.0[i][k] * other.0[k][j]))
        }))
    }

    pub fn is_minus_identity(&self) -> bool {
        *self == WeylElement(Self::identity().0.map(|r| r.map(|x| -x)))
    }

    pub fn is_orthogonal(&self) -> bool {
        (0..4).all(|i| {
            (0..4).all(|j| {
                let e = if i == j { Q::one() } else { Q::zero() };
                (0..4).fold(Q::zero(), |acc, k| acc + self.0[k][i] * self.0[k][j]) == e
            })
        })
    }

    /// `w . lambda = w(lambda + rho) - rho`.
    pub fn dot_action(&self, lambda: &Vec4, rho: &Vec4) -> Vec4 {
        sub(&self.apply(&add(lambda, rho)), rho)
    }
}

impl Serialize for WeylElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.map(|r| r.map(|x| x.to_string())).serialize(s)
    }
}

pub struct RootSystemF4 {
    roots: Vec<Root>,
    index: HashMap<Root, usize>,
    simple: [Root; 4],
    /// Inverse of the matrix whose rows are the simple roots.
    simple_inv: Mat4,
    /// Simple-root coefficients of each root.
    coeffs: Vec<[i64; 4]>,
}

fn invert4(m: &Mat4) -> Mat4 {
    let mut a = *m;
    let mut inv = WeylElement::identity().0;
    for col in 0..4 {
        let piv = (col..4).find(|&r| !a[r][col].is_zero()).expect("simple roots are independent");
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..4 {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..4 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..4 {
                    let (x, y) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * x;
                    inv[r][j] -= f * y;
                }
            }
        }
    }
    inv
}

/// Named subsets of the positive roots, by simple-root coefficients `m_i`.
#[derive(Clone, Debug, Serialize)]
pub struct RootSubsets {
    /// `m1 = m2 = 0`: the Levi `M_R`.
    pub m_r: Vec<Root>,
    /// Positive roots outside `M_R`.
    pub u_r: Vec<Root>,
    /// `m1 >= 1`: the Heisenberg unipotent radical.
    pub n: Vec<Root>,
    /// `m1 = 0`, `m2 = 1`.
    pub n_s: Vec<Root>,
    /// `m1, m2 > 0`.
    pub n_11: Vec<Root>,
    /// `m2 >= 1`.
    pub u_q: Vec<Root>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Simple-root coefficients.
    pub alpha: [i64; 4],
    pub beta: [i64; 4],
    pub a: i64,
    pub b: i64,
    pub gamma: [i64; 4],
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureCheck {
    pub check_id: String,
    pub statement: String,
    pub verified: bool,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct A2Subsystem {
    pub roots: Vec<Root>,
    /// Ranks of the pieces `M_3(Z)^{tr=0} + V_3(Z) + V_3(Z)^vee` of the
    /// G2 Chevalley lattice.
    pub g2_lattice_pieces: [u32; 3],
    pub g2_lattice_rank: u32,
}

impl Default for RootSystemF4 {
    fn default() -> Self {
        Self::build()
    }
}

impl RootSystemF4 {
    pub fn build() -> Self {
        let mut roots = Vec::with_capacity(48);
        for i in 0..4 {
            for s in [1, -1] {
                let mut v = [Q::zero(); 4];
                v[i] = q(s);
                roots.push(Root(v));
            }
        }
        for i in 0..4 {
            for j in i + 1..4 {
                for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    let mut v = [Q::zero(); 4];
                    v[i] = q(si);
                    v[j] = q(sj);
                    roots.push(Root(v));
                }
            }
        }
        for bits in 0..16u32 {
            let v = std::array::from_fn(|i| half(if bits >> i & 1 == 1 { -1 } else { 1 }));
            roots.push(Root(v));
        }
        roots.sort();
        let simple = [
            Root([q(0), q(1), q(-1), q(0)]),
            Root([q(0), q(0), q(1), q(-1)]),
            Root([q(0), q(0), q(0), q(1)]),
            Root([half(1), half(-1), half(-1), half(-1)]),
        ];
        let simple_inv = invert4(&simple.map(|r| r.0));
        let coeffs = roots
            .iter()
            .map(|r| {
                // coords = c * S, so c = coords * S^{-1}
                let c: Vec4 = std::array::from_fn(|j| (0..4).fold(Q::zero(), |acc, k| acc + r.0[k] * simple_inv[k][j]));
                c.map(|x| {
                    assert!(x.is_integer(), "root is not in the root lattice");
                    x.to_integer()
                })
            })
            .collect();
        let index = roots.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        RootSystemF4 {
            roots,
            index,
            simple,
            simple_inv,
            coeffs,
        }
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn simple_roots(&self) -> &[Root; 4] {
        &self.simple
    }

    pub fn is_root(&self, v: &Vec4) -> bool {
        self.index.contains_key(&Root(*v))
    }

    /// Simple-root coefficients of any vector of the root lattice span.
    pub fn coefficients(&self, v: &Vec4) -> Vec4 {
        std::array::from_fn(|j| (0..4).fold(Q::zero(), |acc, k| acc + v[k] * self.simple_inv[k][j]))
    }

    pub fn root_coefficients(&self, r: &Root) -> Option<[i64; 4]> {
        self.index.get(r).map(|&i| self.coeffs[i])
    }

    fn from_coefficients(&self, c: &[i64; 4]) -> Vec4 {
        (0..4).fold([Q::zero(); 4], |acc, i| add(&acc, &scale(q(c[i]), &self.simple[i].0)))
    }

    pub fn positive_roots(&self) -> Vec<Root> {
        self.roots
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| c.iter().all(|x| *x >= 0))
            .map(|(r, _)| *r)
            .collect()
    }

    pub fn is_positive(&self, r: &Root) -> bool {
        self.root_coefficients(r).is_some_and(|c| c.iter().all(|x| *x >= 0))
    }

    pub fn highest_root(&self) -> Root {
        *self
            .positive_roots()
            .iter()
            .max_by_key(|r| self.root_coefficients(r).unwrap().iter().sum::<i64>())
            .expect("nonempty")
    }

    pub fn height(&self, r: &Root) -> Option<i64> {
        self.root_coefficients(r).map(|c| c.iter().sum())
    }

    pub fn subsets(&self) -> RootSubsets {
        let pos = self.positive_roots();
        let by = |f: &dyn Fn(&[i64; 4]) -> bool| -> Vec<Root> {
            pos.iter()
                .filter(|r| f(&self.root_coefficients(r).unwrap()))
                .copied()
                .collect()
        };
        RootSubsets {
            m_r: by(&|c| c[0] == 0 && c[1] == 0),
            u_r: by(&|c| c[0] != 0 || c[1] != 0),
            n: by(&|c| c[0] >= 1),
            n_s: by(&|c| c[0] == 0 && c[1] == 1),
            n_11: by(&|c| c[0] > 0 && c[1] > 0),
            u_q: by(&|c| c[1] >= 1),
        }
    }

    fn counterexample(&self, alpha: &Root, beta: &Root, a: i64, b: i64, gamma: &Vec4) -> Counterexample {
        Counterexample {
            alpha: self.root_coefficients(alpha).unwrap(),
            beta: self.root_coefficients(beta).unwrap(),
            a,
            b,
            gamma: self.root_coefficients(&Root(*gamma)).unwrap(),
        }
    }

    /// All `(alpha, beta, a, b)` with `gamma = a alpha + s b beta` a root that
    /// violates `ok`, for `a, b` in `1..=HIGHEST_HEIGHT` and `s = sign`.
    fn scan(
        &self,
        pairs: &[(Root, Root)],
        sign: i64,
        ok: &dyn Fn(&Root) -> bool,
    ) -> Vec<Counterexample> {
        let mut out = Vec::new();
        for (alpha, beta) in pairs {
            for a in 1..=HIGHEST_HEIGHT {
                for b in 1..=HIGHEST_HEIGHT {
                    let g = add(&scale(q(a), &alpha.0), &scale(q(sign * b), &beta.0));
                    if self.is_root(&g) && !ok(&Root(g)) {
                        out.push(self.counterexample(alpha, beta, a, b, &g));
                    }
                }
            }
        }
        out
    }

    fn check(&self, id: &str, statement: &str, ces: Vec<Counterexample>) -> ClosureCheck {
        ClosureCheck {
            check_id: id.into(),
            statement: statement.into(),
            verified: ces.is_empty(),
            counterexamples: ces,
        }
    }

    /// The four closure statements used in the Iwahori factorization
    /// arguments, checked over all roots and all `1 <= a, b <= 11`.
    pub fn check_closure_lemmas(&self) -> Vec<ClosureCheck> {
        let s = self.subsets();
        let m_r_all: Vec<Root> = s.m_r.iter().flat_map(|r| [*r, r.neg()]).collect();
        let u_r_neg: HashSet<Root> = s.u_r.iter().map(Root::neg).collect();

        let pairs_i: Vec<(Root, Root)> = m_r_all
            .iter()
            .flat_map(|a| u_r_neg.iter().map(move |b| (*a, *b)))
            .collect();
        let c1 = self.scan(&pairs_i, 1, &|g| u_r_neg.contains(g));

        let pairs_ii: Vec<(Root, Root)> = self.simple[..2]
            .iter()
            .flat_map(|ai| s.u_r.iter().filter(move |a| *a != ai).map(move |a| (*ai, *a)))
            .collect();
        let c2 = self.scan(&pairs_ii, -1, &|g| !self.is_positive(g));

        let c3 = self.alpha1_check(&s.n_s);

        let pairs_iv: Vec<(Root, Root)> = s
            .n_s
            .iter()
            .filter(|b| **b != self.simple[1])
            .map(|b| (*b, self.simple[1]))
            .collect();
        let c4 = self.scan(&pairs_iv, -1, &|g| self.is_positive(g));

        vec![
            self.check(
                "i",
                "beta in Phi_{U_R}^-, alpha in Phi_{M_R}, a,b >= 1: if a alpha + b beta is a root it lies in Phi_{U_R}^-",
                c1,
            ),
            self.check(
                "ii",
                "i in {1,2}, alpha in Phi_{U_R}^+ \\ {alpha_i}, a,b >= 1: if a alpha_i - b alpha is a root it is negative",
                c2,
            ),
            self.check(
                "iii",
                "alpha in Phi_{N_S}^+, a,b >= 1: a alpha_1 - b alpha is never a root",
                c3,
            ),
            self.check(
                "iv",
                "beta in Phi_{N_S}^+ \\ {alpha_2}, a,b >= 1: if a beta - b alpha_2 is a root it is positive",
                c4,
            ),
        ]
    }

    /// `a alpha_1 - b alpha` over `alpha` in `set`; any root is a
    /// counterexample.
    pub fn alpha1_check(&self, set: &[Root]) -> Vec<Counterexample> {
        let pairs: Vec<(Root, Root)> = set.iter().map(|a| (self.simple[0], *a)).collect();
        self.scan(&pairs, -1, &|_| false)
    }

    /// Check (iii) with `Phi_{N_S}^+` replaced by `Phi_N^+`; expected to fail.
    pub fn perturbed_alpha1_check(&self) -> ClosureCheck {
        let s = self.subsets();
        self.check(
            "iii-perturbed",
            "alpha in Phi_N^+, a,b >= 1: a alpha_1 - b alpha is never a root",
            self.alpha1_check(&s.n),
        )
    }

    /// Closure of the simple reflections, in breadth-first order.
    pub fn weyl_group(&self) -> Vec<WeylElement> {
        let gens: Vec<WeylElement> = self.simple.iter().map(WeylElement::reflection).collect();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::from([WeylElement::identity()]);
        seen.insert(WeylElement::identity());
        while let Some(w) = queue.pop_front() {
            for g in &gens {
                let x = g.compose(&w);
                if seen.insert(x) {
                    queue.push_back(x);
                }
            }
            out.push(w);
        }
        out
    }

    pub fn permutes_roots(&self, w: &WeylElement) -> bool {
        let image: HashSet<Root> = self.roots.iter().map(|r| Root(w.apply(&r.0))).collect();
        image.len() == self.roots.len() && image.iter().all(|r| self.index.contains_key(r))
    }

    /// `(rho, [w1, w2, w3, w4])` with `<w_i, a_j^vee> = delta_ij`.
    pub fn rho_and_fundamental_weights(&self) -> (Weight, [Weight; 4]) {
        // columns of C^{-1} where C_ij = a_i^vee coordinate j
        let cor = invert4(&self.simple.map(|r| r.coroot()));
        let omegas: [Weight; 4] = std::array::from_fn(|i| Weight(std::array::from_fn(|k| cor[k][i])));
        let rho = omegas.iter().fold([Q::zero(); 4], |acc, w| add(&acc, &w.0));
        (Weight(rho), omegas)
    }

    /// `<v, a_i^vee>` for the four simple roots.
    pub fn pairings(&self, v: &Vec4) -> [Q; 4] {
        self.simple.map(|a| dot(v, &a.coroot()))
    }

    /// `rho - (w1 + w2) / 2`.
    pub fn nu_exc(&self) -> Weight {
        let (rho, w) = self.rho_and_fundamental_weights();
        Weight(sub(&rho.0, &scale(half(1), &add(&w[0].0, &w[1].0))))
    }

    /// `(-(3/2) w1, -(w1 + w2) / 2)`.
    pub fn dot_problem(&self) -> (Vec4, Vec4) {
        let (_, w) = self.rho_and_fundamental_weights();
        (
            scale(half(-3), &w[0].0),
            scale(half(-1), &add(&w[0].0, &w[1].0)),
        )
    }

    /// Every `w` with `w . (-(3/2) w1) = -(w1 + w2) / 2`, sorted.
    pub fn find_dot_witnesses(&self, group: &[WeylElement]) -> Vec<WeylElement> {
        let (rho, _) = self.rho_and_fundamental_weights();
        let (from, to) = self.dot_problem();
        let mut hits: Vec<WeylElement> = group
            .par_iter()
            .filter(|w| w.dot_action(&from, &rho.0) == to)
            .copied()
            .collect();
        hits.sort();
        hits
    }

    pub fn find_dot_witness(&self, group: &[WeylElement]) -> Option<WeylElement> {
        self.find_dot_witnesses(group).into_iter().next()
    }

    /// The A2 subsystem spanned by `a3, a4`.
    pub fn g2_and_sl3_subsystems(&self) -> A2Subsystem {
        let roots = self
            .roots
            .iter()
            .filter(|r| {
                let c = self.root_coefficients(r).unwrap();
                c[0] == 0 && c[1] == 0
            })
            .copied()
            .collect();
        A2Subsystem {
            roots,
            g2_lattice_pieces: [8, 3, 3],
            g2_lattice_rank: 14,
        }
    }

    /// `{k : beta + k alpha in roots or zero}` is an interval, for all
    /// `alpha != +-beta`.
    pub fn root_strings_unbroken(&self) -> bool {
        self.roots.iter().all(|a| {
            self.roots.iter().filter(|b| **b != *a && **b != a.neg()).all(|b| {
                let ks: Vec<i64> = (-4..=4)
                    .filter(|k| {
                        let v = add(&b.0, &scale(q(*k), &a.0));
                        self.is_root(&v) || v.iter().all(|x| x.is_zero())
                    })
                    .collect();
                ks.windows(2).all(|w| w[1] == w[0] + 1)
            })
        })
    }

    pub fn root_from_coefficients(&self, c: &[i64; 4]) -> Option<Root> {
        let v = self.from_coefficients(c);
        self.is_root(&v).then_some(Root(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_lengths() {
        let f4 = RootSystemF4::build();
        assert_eq!(f4.roots().len(), 48);
        assert_eq!(f4.positive_roots().len(), 24);
        assert_eq!(f4.roots().iter().filter(|r| r.is_long()).count(), 24);
        let s = f4.simple_roots();
        assert!(s[0].is_long() && s[1].is_long());
        assert_eq!(s[2].norm2(), q(1));
        assert_eq!(s[3].norm2(), q(1));
        let top = f4.highest_root();
        assert_eq!(f4.root_coefficients(&top), Some([2, 3, 4, 2]));
        assert_eq!(f4.height(&top), Some(HIGHEST_HEIGHT));
    }

    #[test]
    fn subset_sizes() {
        let f4 = RootSystemF4::build();
        let s = f4.subsets();
        assert_eq!(s.m_r.len(), 3);
        assert_eq!(s.u_r.len(), 21);
        assert_eq!(s.n.len(), 15);
        assert_eq!(s.n_s.len(), 6);
        assert_eq!(s.n_11.len(), 14);
        assert_eq!(s.u_q.len(), 20);
    }

    #[test]
    fn closure_lemmas_hold() {
        let f4 = RootSystemF4::build();
        for c in f4.check_closure_lemmas() {
            assert!(c.verified, "{}: {:?}", c.check_id, c.counterexamples);
        }
        assert!(!f4.perturbed_alpha1_check().verified);
    }

    #[test]
    fn weights() {
        let f4 = RootSystemF4::build();
        let (rho, w) = f4.rho_and_fundamental_weights();
        assert_eq!(rho.0, [half(11), half(5), half(3), half(1)]);
        assert_eq!(w[0].0, [q(1), q(1), q(0), q(0)]);
        assert_eq!(w[3].0, [q(1), q(0), q(0), q(0)]);
        assert_eq!(f4.pairings(&rho.0), [q(1); 4]);
        assert_eq!(f4.pairings(&f4.nu_exc().0), [half(1), half(1), q(1), q(1)]);
    }

    #[test]
    fn identity_is_not_a_dot_witness() {
        let f4 = RootSystemF4::build();
        let hits = f4.find_dot_witnesses(&[WeylElement::identity()]);
        assert!(hits.is_empty());
    }

    #[test]
    fn weyl_group_and_witness() {
        let f4 = RootSystemF4::build();
        let w = f4.weyl_group();
        assert_eq!(w.len(), WEYL_ORDER);
        assert!(w.iter().any(WeylElement::is_minus_identity));
        assert!(w.iter().all(|x| x.is_orthogonal() && f4.permutes_roots(x)));
        let all: HashSet<WeylElement> = w.iter().copied().collect();
        assert!(f4.roots().iter().all(|r| all.contains(&WeylElement::reflection(r))));
        let hits = f4.find_dot_witnesses(&w);
        assert!(!hits.is_empty());
        let (rho, _) = f4.rho_and_fundamental_weights();
        let (from, to) = f4.dot_problem();
        assert!(hits.iter().all(|h| h.dot_action(&from, &rho.0) == to));
    }

    #[test]
    fn strings_and_a2() {
        let f4 = RootSystemF4::build();
        assert!(f4.root_strings_unbroken());
        let a2 = f4.g2_and_sl3_subsystems();
        assert_eq!(a2.roots.len(), 6);
        assert!(a2.roots.iter().all(|r| !r.is_long()));
        assert_eq!(a2.g2_lattice_rank, 14);
    }
}
