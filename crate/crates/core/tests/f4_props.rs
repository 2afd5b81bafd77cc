use std::collections::{BTreeSet, HashSet};

use g2theta::rootsys::{RootSystemF4, WeylElement, M_VALUES, WEYL_ORDER};
use num_rational::Rational64;
use num_traits::{One, Zero};

type C = [i64; 4];

/// `<a_i, a_j^vee>` for `a1 - a2 => a3 - a4`.
const CARTAN: [[i64; 4]; 4] = [[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]];

fn reflect(c: &C, j: usize) -> C {
    let pairing: i64 = (0..4).map(|i| c[i] * CARTAN[i][j]).sum();
    let mut out = *c;
    out[j] -= pairing;
    out
}

/// Roots in simple-root coordinates, as the orbit of the simple roots under
/// the simple reflections.
fn oracle_roots() -> BTreeSet<C> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<C> = (0..4).map(|i| std::array::from_fn(|k| i64::from(k == i))).collect();
    while let Some(c) = stack.pop() {
        if seen.insert(c) {
            stack.extend((0..4).map(|j| reflect(&c, j)));
        }
    }
    seen
}

fn positive(c: &C) -> bool {
    c.iter().all(|x| *x >= 0)
}

fn lin(a: i64, x: &C, b: i64, y: &C) -> C {
    std::array::from_fn(|i| a * x[i] + b * y[i])
}

fn unit(i: usize) -> C {
    std::array::from_fn(|k| i64::from(k == i))
}

/// The four closure statements, by brute force over coefficient vectors.
fn oracle_closure(roots: &BTreeSet<C>) -> [bool; 4] {
    let range = 1..=11;
    let pos: Vec<C> = roots.iter().filter(|c| positive(c)).copied().collect();
    let m_r: Vec<C> = roots.iter().filter(|c| c[0] == 0 && c[1] == 0).copied().collect();
    let u_r_pos: Vec<C> = pos.iter().filter(|c| c[0] != 0 || c[1] != 0).copied().collect();
    let u_r_neg: HashSet<C> = u_r_pos.iter().map(|c| c.map(|x| -x)).collect();
    let n_s: Vec<C> = pos.iter().filter(|c| c[0] == 0 && c[1] == 1).copied().collect();

    let mut ok = [true; 4];
    for a in range.clone() {
        for b in range.clone() {
            for al in &m_r {
                for be in &u_r_neg {
                    let g = lin(a, al, b, be);
                    ok[0] &= !roots.contains(&g) || u_r_neg.contains(&g);
                }
            }
            for i in 0..2 {
                for al in u_r_pos.iter().filter(|c| **c != unit(i)) {
                    let g = lin(a, &unit(i), -b, al);
                    ok[1] &= !roots.contains(&g) || !positive(&g);
                }
            }
            for al in &n_s {
                ok[2] &= !roots.contains(&lin(a, &unit(0), -b, al));
            }
            for be in n_s.iter().filter(|c| **c != unit(1)) {
                let g = lin(a, be, -b, &unit(1));
                ok[3] &= !roots.contains(&g) || positive(&g);
            }
        }
    }
    ok
}

#[test]
fn roots_match_cartan_closure() {
    let f4 = RootSystemF4::build();
    let oracle = oracle_roots();
    assert_eq!(oracle.len(), 48);
    let ours: BTreeSet<C> = f4.roots().iter().map(|r| f4.root_coefficients(r).unwrap()).collect();
    assert_eq!(ours, oracle);
    assert_eq!(f4.positive_roots().len(), 24);
    assert_eq!(f4.roots().iter().filter(|r| r.is_long()).count(), 24);
    let h = f4.highest_root();
    assert_eq!(f4.root_coefficients(&h), Some([2, 3, 4, 2]));
}

#[test]
fn bourbaki_coordinates() {
    // +-e_i, +-e_i +- e_j and (+-1/2, +-1/2, +-1/2, +-1/2)
    let half = Rational64::new(1, 2);
    let mut expected = HashSet::new();
    for i in 0..4 {
        for s in [-1, 1] {
            let mut v = [Rational64::zero(); 4];
            v[i] = Rational64::from_integer(s);
            expected.insert(v);
            for j in i + 1..4 {
                for t in [-1, 1] {
                    let mut w = v;
                    w[j] = Rational64::from_integer(t);
                    expected.insert(w);
                }
            }
        }
    }
    for mask in 0..16 {
        expected.insert(std::array::from_fn(|k| if mask >> k & 1 == 1 { -half } else { half }));
    }
    let f4 = RootSystemF4::build();
    let ours: HashSet<_> = f4.roots().iter().map(|r| *r.coords()).collect();
    assert_eq!(ours, expected);
}

#[test]
fn weyl_group_acts_faithfully_on_roots() {
    let f4 = RootSystemF4::build();
    let w = f4.weyl_group();
    assert_eq!(w.len(), WEYL_ORDER);
    assert_eq!(w.iter().collect::<HashSet<_>>().len(), WEYL_ORDER);
    assert!(w.iter().all(|x| x.is_orthogonal() && f4.permutes_roots(x)));
    assert_eq!(w.iter().filter(|x| x.is_minus_identity()).count(), 1);
    for r in f4.roots() {
        let s = WeylElement::reflection(r);
        assert!(s.compose(&s) == WeylElement::identity());
        assert_eq!(s.apply(r.coords()), r.neg().0);
    }
}

#[test]
fn dot_witness_is_valid() {
    let f4 = RootSystemF4::build();
    let group = f4.weyl_group();
    let w = f4.find_dot_witness(&group).expect("a witness exists");
    let (rho, omega) = f4.rho_and_fundamental_weights();
    let h = Rational64::new(1, 2);
    let from: [Rational64; 4] = std::array::from_fn(|k| -h * 3 * omega[0].0[k]);
    let to: [Rational64; 4] = std::array::from_fn(|k| -h * (omega[0].0[k] + omega[1].0[k]));
    // w(lambda + rho) - rho
    let shifted: [Rational64; 4] = std::array::from_fn(|k| from[k] + rho.0[k]);
    let image = w.apply(&shifted);
    let got: [Rational64; 4] = std::array::from_fn(|k| image[k] - rho.0[k]);
    assert_eq!(got, to);
}

#[test]
fn exceptional_weight_pairings() {
    let f4 = RootSystemF4::build();
    let (rho, omega) = f4.rho_and_fundamental_weights();
    assert!(f4.pairings(&rho.0).iter().all(|x| x.is_one()));
    for (i, w) in omega.iter().enumerate() {
        let p = f4.pairings(&w.0);
        for (j, x) in p.iter().enumerate() {
            assert_eq!(*x, Rational64::from_integer(i64::from(i == j)));
        }
    }
    let nu = f4.nu_exc();
    let p = f4.pairings(&nu.0);
    for (x, m) in p.iter().zip(M_VALUES) {
        assert_eq!(*x, Rational64::new(1, m));
    }
}

#[test]
fn closure_lemmas_agree_with_brute_force() {
    let f4 = RootSystemF4::build();
    let oracle = oracle_closure(&oracle_roots());
    let ours: Vec<bool> = f4.check_closure_lemmas().iter().map(|c| c.verified).collect();
    assert_eq!(ours, oracle.to_vec());
    assert!(oracle.iter().all(|x| *x));
    assert!(!f4.perturbed_alpha1_check().verified);
    assert!(f4.root_strings_unbroken());
}
