use g2theta::algebra::{MonicCubic, QPoly};
use g2theta::binary_cubics::{psd_classify, BinaryCubic, Psd};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

/// Resultant by cofactor expansion of the Sylvester matrix, over i128.
fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| *x).collect())
                .collect();
            let s = if c % 2 == 0 { 1 } else { -1 };
            s * m[0][c] * det(&minor)
        })
        .sum()
}

fn resultant_p_dp(a2: i64, a1: i64, a0: i64) -> i128 {
    let (a2, a1, a0) = (a2 as i128, a1 as i128, a0 as i128);
    let rows = vec![
        vec![1, a2, a1, a0, 0],
        vec![0, 1, a2, a1, a0],
        vec![3, 2 * a2, a1, 0, 0],
        vec![0, 3, 2 * a2, a1, 0],
        vec![0, 0, 3, 2 * a2, a1],
    ];
    det(&rows)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

proptest! {
    #[test]
    fn discriminant_is_minus_resultant(a2 in -50i64..=50, a1 in -50i64..=50, a0 in -50i64..=50) {
        let p = MonicCubic::new(a2, a1, a0);
        prop_assert_eq!(p.discriminant(), BigInt::from(-resultant_p_dp(a2, a1, a0)));
    }

    #[test]
    fn real_root_count_follows_discriminant(a2 in -30i64..=30, a1 in -30i64..=30, a0 in -30i64..=30) {
        let p = MonicCubic::new(a2, a1, a0);
        let d = p.discriminant();
        prop_assume!(!d.is_zero());
        let n = p.isolate_real_roots(&q(1, 100)).unwrap().len();
        prop_assert_eq!(n, if d.is_positive() { 3 } else { 1 });
        prop_assert_eq!(p.is_totally_real(), d.is_positive());
    }

    #[test]
    fn isolating_intervals_are_disjoint_and_narrow(r in -8i64..=8, s in -8i64..=8, t in -8i64..=8) {
        // (x - r)(x - s)(x - t), possibly with repeated roots
        let p = MonicCubic::new(-(r + s + t), r * s + r * t + s * t, -r * s * t);
        let eps = q(1, 1000);
        let roots = p.isolate_real_roots(&eps).unwrap();
        let mut distinct = vec![r, s, t];
        distinct.sort_unstable();
        distinct.dedup();
        prop_assert_eq!(roots.len(), distinct.len());
        for (iv, want) in roots.iter().zip(&distinct) {
            prop_assert!(iv.interval.contains(&q(*want, 1)));
            prop_assert!(iv.interval.width() < eps);
            let mult = [r, s, t].iter().filter(|x| *x == want).count();
            prop_assert_eq!(iv.multiplicity, mult);
        }
        for w in roots.windows(2) {
            prop_assert!(!w[0].interval.overlaps(&w[1].interval));
        }
    }

    #[test]
    fn polynomial_display_round_trips(a2 in -99i64..=99, a1 in -99i64..=99, a0 in -99i64..=99) {
        let p = MonicCubic::new(a2, a1, a0);
        let back: MonicCubic = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn gcd_divides_both(a in prop::collection::vec(-9i64..=9, 1..5), b in prop::collection::vec(-9i64..=9, 1..5)) {
        let (f, g) = (QPoly::from_ints(a), QPoly::from_ints(b));
        prop_assume!(!f.is_zero() && !g.is_zero());
        let h = f.gcd(&g);
        prop_assert!(f.rem(&h).is_zero());
        prop_assert!(g.rem(&h).is_zero());
    }

    #[test]
    fn psd_iff_no_upper_half_plane_root(a in -6i64..=6, b in -6i64..=6, c in -6i64..=6, d in -6i64..=6) {
        let f = BinaryCubic::new(a, b, c, d);
        prop_assume!(!f.is_zero());
        let class = psd_classify(&f).unwrap();
        // for a genuine cubic the discriminant sign decides real-rootedness
        if a != 0 {
            let disc = f.discriminant();
            if disc.is_negative() {
                prop_assert_eq!(class, Psd::NotPsd);
            } else if disc.is_positive() {
                prop_assert_eq!(class, Psd::Psd);
            }
        }
        prop_assert_eq!(class, psd_classify(&f.reversed()).unwrap());
    }
}

#[test]
fn parse_accepts_factored_and_expanded_forms() {
    let a: MonicCubic = "(t-3)(t^2-10)".parse().unwrap();
    let b: MonicCubic = "t^3 - 3t^2 - 10t + 30".parse().unwrap();
    assert_eq!(a, b);
    assert!("t^2 + 1".parse::<MonicCubic>().is_err());
    assert!("2t^3 + 1".parse::<MonicCubic>().is_err());
}
