//! Seeded random relation checks for the metaplectic models.
//!
//! Samples are split into fixed-size chunks; chunk `k` draws from ChaCha8
//! stream `k` of the master seed, so results do not depend on the number of
//! worker threads.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::gl2::{commutator, h_alpha1, h_alpha2, mgl2_product, w_alpha1, Cover, MetaGL2Elem};
use super::hilbert::{hilbert, hilbert_product, Place};
use super::sl2::{alpha_cocycle, h_tilde, mat2_mul, steinberg_opposite_identity, Mat2, MetaSL2Elem};
use crate::error::{Error, Result};

const CHUNK: usize = 256;
const MAX_EXAMPLES: usize = 5;
/// Bound on numerators and denominators of random rationals.
pub const ENTRY_BOUND: i64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfTest {
    Cocycle,
    Associativity,
    Hilbert,
    HilbertProduct,
    Torus,
    Commutator,
    WConjugation,
    Steinberg,
    Covers,
}

impl SelfTest {
    pub const ALL: [SelfTest; 9] = [
        SelfTest::Cocycle,
        SelfTest::Associativity,
        SelfTest::Hilbert,
        SelfTest::HilbertProduct,
        SelfTest::Torus,
        SelfTest::Commutator,
        SelfTest::WConjugation,
        SelfTest::Steinberg,
        SelfTest::Covers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelfTest::Cocycle => "cocycle",
            SelfTest::Associativity => "associativity",
            SelfTest::Hilbert => "hilbert",
            SelfTest::HilbertProduct => "hilbert_product",
            SelfTest::Torus => "torus",
            SelfTest::Commutator => "commutator",
            SelfTest::WConjugation => "w_conjugation",
            SelfTest::Steinberg => "steinberg",
            SelfTest::Covers => "covers",
        }
    }

    /// Whether the check depends on the place (place-free checks such as
    /// the product formula run once).
    pub fn is_local(self) -> bool {
        self != SelfTest::HilbertProduct
    }
}

impl fmt::Display for SelfTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelfTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SelfTest::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown self-test '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfTestReport {
    pub test: SelfTest,
    /// `None` for place-free checks.
    pub place: Option<Place>,
    pub samples: usize,
    pub seed: u64,
    pub failures: usize,
    /// The first few failing samples, for diagnosis.
    pub examples: Vec<String>,
}

pub fn random_rational(rng: &mut impl Rng) -> BigRational {
    let n = loop {
        let n = rng.gen_range(-ENTRY_BOUND..=ENTRY_BOUND);
        if n != 0 {
            break n;
        }
    };
    let d = rng.gen_range(1..=ENTRY_BOUND);
    BigRational::new(n.into(), d.into())
}

/// Random determinant-one matrix; one in four is upper triangular so the
/// `c = 0` branch of `x(s)` is exercised.
pub fn random_sl2(rng: &mut impl Rng) -> Mat2 {
    if rng.gen_range(0..4) == 0 {
        let a = random_rational(rng);
        let b = if rng.gen_bool(0.5) { random_rational(rng) } else { BigRational::zero() };
        let d = a.recip();
        return [[a, b], [BigRational::zero(), d]];
    }
    let c = random_rational(rng);
    let a = if rng.gen_range(0..5) == 0 { BigRational::zero() } else { random_rational(rng) };
    let d = random_rational(rng);
    let b = (&a * &d - BigRational::one()) / &c;
    [[a, b], [c, d]]
}

fn random_msl2(rng: &mut impl Rng, v: Place) -> MetaSL2Elem {
    let zeta = if rng.gen_bool(0.5) { 1 } else { -1 };
    MetaSL2Elem { g: random_sl2(rng), zeta, place: v }
}

fn random_mgl2(rng: &mut impl Rng, v: Place, variant: Cover) -> MetaGL2Elem {
    MetaGL2Elem {
        s: random_msl2(rng, v),
        y: random_rational(rng),
        variant,
    }
}

/// One sample; `Ok(None)` on success, `Ok(Some(description))` on failure.
fn sample(test: SelfTest, v: Place, rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let fail = |ok: bool, what: String| if ok { None } else { Some(what) };
    Ok(match test {
        SelfTest::Cocycle => {
            let (g1, g2, g3) = (random_sl2(rng), random_sl2(rng), random_sl2(rng));
            let lhs = alpha_cocycle(&g1, &g2, v) * alpha_cocycle(&mat2_mul(&g1, &g2), &g3, v);
            let rhs = alpha_cocycle(&g1, &mat2_mul(&g2, &g3), v) * alpha_cocycle(&g2, &g3, v);
            fail(lhs == rhs, format!("{g1:?} {g2:?} {g3:?}"))
        }
        SelfTest::Associativity => {
            let (x, y, z) = (random_msl2(rng, v), random_msl2(rng, v), random_msl2(rng, v));
            let lhs = x.mul(&y)?.mul(&z)?;
            let rhs = x.mul(&y.mul(&z)?)?;
            let mut ok = lhs == rhs;
            for variant in [Cover::Cover0, Cover::Cover1] {
                let (a, b, c) = (
                    random_mgl2(rng, v, variant),
                    random_mgl2(rng, v, variant),
                    random_mgl2(rng, v, variant),
                );
                ok &= a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?;
            }
            fail(ok, format!("{x:?} {y:?} {z:?}"))
        }
        SelfTest::Hilbert => {
            let (a, b, c) = (random_rational(rng), random_rational(rng), random_rational(rng));
            let mut ok = hilbert(&a, &b, v) == hilbert(&b, &a, v);
            ok &= hilbert(&a, &(&b * &c), v) == hilbert(&a, &b, v) * hilbert(&a, &c, v);
            ok &= hilbert(&a, &-&a, v) == 1;
            let s = &a + &b;
            if !s.is_zero() {
                ok &= hilbert(&a, &b, v) * hilbert(&-(&a * &b), &s, v) == 1;
            }
            fail(ok, format!("a = {a}, b = {b}, c = {c}"))
        }
        SelfTest::HilbertProduct => {
            let (a, b) = (random_rational(rng), random_rational(rng));
            fail(hilbert_product(&a, &b) == 1, format!("a = {a}, b = {b}"))
        }
        SelfTest::Torus => {
            let (s, t) = (random_rational(rng), random_rational(rng));
            let lhs = h_tilde(&s, v).mul(&h_tilde(&t, v))?;
            let rhs = h_tilde(&(&s * &t), v).with_sign(hilbert(&s, &t, v));
            let c = Cover::Cover1;
            let lhs2 = h_alpha2(&s, v, c).mul(&h_alpha2(&t, v, c))?;
            let rhs2 = h_alpha2(&(&s * &t), v, c).with_sign(hilbert(&s, &t, v));
            fail(lhs == rhs && lhs2 == rhs2, format!("s = {s}, t = {t}"))
        }
        SelfTest::Commutator => {
            let (s, t) = (random_rational(rng), random_rational(rng));
            let c = Cover::Cover1;
            let comm = commutator(&h_alpha1(&s, v, c), &h_alpha2(&t, v, c))?;
            let rhs = MetaGL2Elem::identity(v, c).with_sign(hilbert(&s, &t, v));
            fail(comm == rhs, format!("s = {s}, t = {t}"))
        }
        SelfTest::WConjugation => {
            let (u, t) = (random_rational(rng), random_rational(rng));
            let c = Cover::Cover1;
            let lhs = mgl2_product(&[w_alpha1(&t, v, c), h_alpha2(&u, v, c), w_alpha1(&-&t, v, c)])?;
            let ui = u.recip();
            let rhs = h_alpha1(&u, v, c)
                .mul(&h_alpha2(&u, v, c))?
                .with_sign(hilbert(&ui, &(&ui * &t), v));
            fail(lhs == rhs, format!("u = {u}, t = {t}"))
        }
        SelfTest::Steinberg => {
            let (t, s) = loop {
                let t = if rng.gen_range(0..10) == 0 { BigRational::zero() } else { random_rational(rng) };
                let s = random_rational(rng);
                if !(BigRational::one() + &s * &t).is_zero() {
                    break (t, s);
                }
            };
            fail(steinberg_opposite_identity(&t, &s, v)?, format!("t = {t}, s = {s}"))
        }
        SelfTest::Covers => {
            let x0 = random_mgl2(rng, v, Cover::Cover0);
            let y0 = random_mgl2(rng, v, Cover::Cover0);
            let x1 = MetaGL2Elem { variant: Cover::Cover1, ..x0.clone() };
            let y1 = MetaGL2Elem { variant: Cover::Cover1, ..y0.clone() };
            let (p0, p1) = (x0.mul(&y0)?, x1.mul(&y1)?);
            let ok = p0.matrix() == p1.matrix() && p1.zeta() == p0.zeta() * hilbert(&x0.y, &y0.y, v);
            fail(ok, format!("y1 = {}, y2 = {}", x0.y, y0.y))
        }
    })
}

/// Run `samples` random instances of `test` at `place` (ignored for
/// place-free checks).
pub fn run_selftest(test: SelfTest, place: Place, samples: usize, seed: u64) -> Result<SelfTestReport> {
    let chunks = samples.div_ceil(CHUNK);
    let results: Vec<(usize, Vec<String>)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = CHUNK.min(samples - k * CHUNK);
            let mut failures = 0;
            let mut examples = Vec::new();
            for _ in 0..n {
                if let Some(e) = sample(test, place, &mut rng)? {
                    failures += 1;
                    if examples.len() < MAX_EXAMPLES {
                        examples.push(e);
                    }
                }
            }
            Ok((failures, examples))
        })
        .collect::<Result<_>>()?;
    let failures = results.iter().map(|r| r.0).sum();
    let examples = results.into_iter().flat_map(|r| r.1).take(MAX_EXAMPLES).collect();
    Ok(SelfTestReport {
        test,
        place: test.is_local().then_some(place),
        samples,
        seed,
        failures,
        examples,
    })
}

/// Every check at every given place; place-free checks run once.
pub fn run_all_selftests(places: &[Place], samples: usize, seed: u64) -> Result<Vec<SelfTestReport>> {
    let mut jobs = Vec::new();
    for test in SelfTest::ALL {
        if test.is_local() {
            jobs.extend(places.iter().map(|&v| (test, v)));
        } else {
            jobs.push((test, Place::Real));
        }
    }
    jobs.into_iter().map(|(t, v)| run_selftest(t, v, samples, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLACES: [Place; 5] = [
        Place::Prime(2),
        Place::Prime(3),
        Place::Prime(5),
        Place::Prime(7),
        Place::Real,
    ];

    #[test]
    fn small_runs_pass() {
        for r in run_all_selftests(&PLACES, 300, 7).unwrap() {
            assert_eq!(r.failures, 0, "{r:?}");
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let a = run_selftest(SelfTest::Cocycle, Place::Prime(2), 600, 11).unwrap();
        let b = run_selftest(SelfTest::Cocycle, Place::Prime(2), 600, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_matrices_have_det_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let m = random_sl2(&mut rng);
            assert!(super::super::sl2::mat2_det(&m).is_one());
        }
    }

    #[test]
    fn names_round_trip() {
        for t in SelfTest::ALL {
            assert_eq!(t.name().parse::<SelfTest>().unwrap(), t);
        }
        assert!("nope".parse::<SelfTest>().is_err());
    }
}
