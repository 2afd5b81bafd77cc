use std::collections::BTreeSet;

use g2theta::algebra::MonicCubic;
use g2theta::binary_cubics::trace_map;
use g2theta::cubic_rings::{self, CubicRing};
use g2theta::jordan::{rank_one_d1, HalfSymMat3, SymMat3, WVector};
use g2theta::qp;
use g2theta::table::{reproduce_row, TABLE};
use num_bigint::BigInt;
use proptest::prelude::*;

fn sym(e: [i64; 6]) -> SymMat3 {
    SymMat3::new([e[0], e[1], e[2]], e[3], e[4], e[5])
}

fn entries() -> impl Strategy<Value = [i64; 6]> {
    prop::array::uniform6(-20i64..=20)
}

/// Leibniz expansion of a 3x3 determinant.
fn det3(m: [[i64; 3]; 3]) -> i64 {
    let mut s = 0;
    for (p, sign) in [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)] {
        s += sign * m[0][p[0]] * m[1][p[1]] * m[2][p[2]];
    }
    s
}

fn full(e: [i64; 6]) -> [[i64; 3]; 3] {
    let [a, b, c, d, f, g] = e;
    [[a, g, f], [g, b, d], [f, d, c]]
}

/// Brute force over `[-r, r]^6`.
fn brute(p: &MonicCubic, r: i64) -> Vec<SymMat3> {
    let mut out = Vec::new();
    let side = 2 * r + 1;
    for mut k in 0..side.pow(6) {
        let mut e = [0i64; 6];
        for slot in e.iter_mut().rev() {
            *slot = k % side - r;
            k /= side;
        }
        if &qp::charpoly(&sym(e)) == p {
            out.push(sym(e));
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn determinant_matches_leibniz(e in entries()) {
        prop_assert_eq!(sym(e).det(), BigInt::from(det3(full(e))));
    }

    #[test]
    fn sharp_is_adjugate(e in entries()) {
        let x = sym(e);
        let prod = g2theta::algebra::linalg::mul(&x.to_matrix(), &x.sharp().to_matrix());
        for (i, row) in prod.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { x.det() } else { BigInt::from(0) };
                prop_assert_eq!(v, &want);
            }
        }
        let d = x.det();
        let twice = x.sharp().sharp().to_matrix();
        prop_assert_eq!(twice, x.to_matrix().map(|r| r.map(|v| v * &d)));
    }

    #[test]
    fn rank_one_vectors_are_recognized(e in prop::array::uniform6(-5i64..=5)) {
        let t = sym(e);
        let w = WVector::rank_one_from(&t);
        prop_assert!(rank_one_d1(&w).unwrap());
        let f = trace_map(&w);
        prop_assert_eq!(f.companion().unwrap(), qp::charpoly(&t));
        let mut bad = w.clone();
        bad.a += 1;
        prop_assert!(!rank_one_d1(&bad).unwrap());
    }

    #[test]
    fn half_sharp_agrees_with_integral_sharp(e in prop::array::uniform6(-6i64..=6)) {
        // X = Y/2 gives X# = Y#/4
        let y = sym(e);
        let x = HalfSymMat3::from_doubled(&y);
        let ys = HalfSymMat3::from(&y.sharp());
        let four = num_rational::BigRational::from_integer(4.into());
        let xs = x.sharp();
        prop_assert_eq!(xs.d1 * &four, ys.d1);
        prop_assert_eq!(xs.o23 * &four, ys.o23);
    }

    #[test]
    fn enumeration_matches_brute_force(e in prop::array::uniform6(-1i64..=1)) {
        // eigenvalues of a matrix with entries in [-1, 1] are at most 3 in
        // absolute value, so every matrix with the same polynomial fits in the box
        let p = qp::charpoly(&sym(e));
        let r = qp::enumerate(&p).unwrap();
        prop_assert_eq!(r.matrices, brute(&p, 3));
    }
}

#[test]
fn orbits_partition_and_conjugation_preserves_charpoly() {
    let p: MonicCubic = "t^3-t^2-9t+10".parse().unwrap();
    let r = qp::compute(&p, None).unwrap();
    let mut seen = BTreeSet::new();
    for (i, o) in r.orbits.iter().enumerate() {
        let members = r.orbit_members(i);
        assert_eq!(members.len(), o.size);
        for m in members {
            assert!(seen.insert(m.clone()));
            for g in qp::so3z_elements() {
                let c = m.conjugate(&g.matrix());
                assert_eq!(qp::charpoly(&c), p);
                assert_eq!(r.orbit_index(&c), Some(i));
            }
        }
    }
    assert_eq!(seen.len(), r.total);
}

#[test]
fn jobs_do_not_change_results() {
    let p: MonicCubic = "t^3-t^2-34t-57".parse().unwrap();
    assert_eq!(qp::compute(&p, Some(1)).unwrap(), qp::compute(&p, Some(3)).unwrap());
}

#[test]
fn every_table_row_reproduces() {
    for row in &TABLE {
        let rep = reproduce_row(row, None).unwrap();
        assert!(rep.passed, "{rep:#?}");
    }
}

#[test]
fn round_trip_lands_in_source_orbit() {
    for poly in ["t^3-t^2-11t+12", "(t-3)(t^2-10)"] {
        let p: MonicCubic = poly.parse().unwrap();
        let ring = CubicRing::new(p.clone());
        let r = qp::compute(&p, None).unwrap();
        for t in &r.matrices {
            let pair = cubic_rings::matrix_to_pair(t, &ring).unwrap();
            assert!(ring.is_balanced(&pair.ideal, &pair.mu).unwrap());
            let back = cubic_rings::pair_to_matrix(&ring, &pair).unwrap();
            assert_eq!(r.orbit_index(&back), r.orbit_index(t), "{poly}: {t}");
        }
        let classes = cubic_rings::classes_qr_from(&ring, &r).unwrap();
        assert_eq!(classes.count, r.orbits.len());
    }
}

#[test]
fn cache_format_round_trips() {
    let p: MonicCubic = "(t-1)(t^2-2)".parse().unwrap();
    let r = qp::compute(&p, None).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: qp::QpResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}
