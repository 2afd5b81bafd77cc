//! Cross-module invariant suite.
//!
//! Every check has a stable id and runs from its own ChaCha8 seed derived
//! from the master seed, so a report is a pure function of the seed and the
//! budget. Checks run in parallel; the report is ordered by id.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{linalg, MonicCubic, QPoly};
use crate::binary_cubics::{psd_classify, trace_map, BinaryCubic, Psd};
use crate::cubic_rings::{self, CubicRing};
use crate::error::{Error, Result};
use crate::jordan::{dual_sharp_scan, SymMat3, WVector};
use crate::metaplectic::{run_selftest, Place, SelfTest};
use crate::qp::{self, QpResult};
use crate::rootsys::{RootSystemF4, WeylElement, M_VALUES, WEYL_ORDER};
use crate::table::{self, AbelianGroup, Structure, TableRow, TABLE};
use crate::whittaker::{bessel_k_half, whittaker_value, HalfInt};

pub const DEFAULT_SEED: u64 = 0x0067_3274_6865_7461;

pub const PLACES: [Place; 5] = [
    Place::Prime(2),
    Place::Prime(3),
    Place::Prime(5),
    Place::Prime(7),
    Place::Real,
];

/// Sample budget: `Full` uses the documented counts, `Quick` a small
/// fraction for use inside unit tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Full,
    Quick,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckSpec {
    pub id: &'static str,
    pub description: &'static str,
    pub anchor: &'static str,
    pub seed: u64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub description: &'static str,
    pub anchor: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub failures: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub budget: Budget,
    pub total: usize,
    pub failed: usize,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            4
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_junit(&self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            s,
            "<testsuite name=\"g2theta\" tests=\"{}\" failures=\"{}\">",
            self.total, self.failed
        );
        for c in &self.checks {
            let _ = write!(
                s,
                "  <testcase classname=\"g2theta.harness\" name=\"{}\">",
                xml_escape(c.id)
            );
            let _ = write!(
                s,
                "<properties><property name=\"seed\" value=\"{}\"/><property name=\"samples\" value=\"{}\"/></properties>",
                c.seed, c.samples
            );
            if !c.passed {
                let _ = write!(
                    s,
                    "<failure message=\"{} failure(s)\">{}</failure>",
                    c.failures,
                    xml_escape(&c.detail)
                );
            }
            s.push_str("</testcase>\n");
        }
        s.push_str("</testsuite>\n");
        s
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Table enumerations shared by several checks, computed before the
/// parallel phase.
struct Ctx {
    table: Vec<(TableRow, QpResult)>,
}

#[derive(Default)]
struct Outcome {
    failures: usize,
    notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures += 1;
            if self.notes.len() < 5 {
                self.notes.push(what());
            }
        }
    }

    fn error(&mut self, e: &Error) {
        self.check(false, || format!("error: {e}"));
    }
}

type CheckFn = fn(&Ctx, &mut ChaCha8Rng, usize, &mut Outcome) -> Result<()>;

struct CheckDef {
    id: &'static str,
    description: &'static str,
    anchor: &'static str,
    full: usize,
    quick: usize,
    run: CheckFn,
}

const fn def(
    id: &'static str,
    description: &'static str,
    anchor: &'static str,
    full: usize,
    quick: usize,
    run: CheckFn,
) -> CheckDef {
    CheckDef {
        id,
        description,
        anchor,
        full,
        quick,
        run,
    }
}

const BOX3: usize = 7usize.pow(6);

static CHECKS: &[CheckDef] = &[
    def("alg-1-real-root-count", "3 isolated real roots iff disc > 0, 1 iff disc < 0", "sign of the cubic discriminant", 1000, 100, alg_root_count),
    def("alg-2-disc-resultant", "disc(p) = -Res(p, p') via an independent Sylvester determinant", "discriminant as a resultant", 1000, 100, alg_disc_resultant),
    def("alg-3-root-intervals", "each isolating interval holds a sign change of p or of gcd(p, p')", "Sturm isolation", 1000, 100, alg_root_intervals),
    def("bc-1-trace-map-charpoly", "companion of trace_map(det T, T#, T, 1) is det(tI + T) on [-3,3]^6", "rank-one elements and characteristic polynomials", BOX3, 2000, bc_trace_map),
    def("bc-2-psd-criteria", "PSD for totally real companions, NOT_PSD for disc < 0 with a != 0", "positive semi-definite binary cubics", 2000, 200, bc_psd),
    def("bc-3-psd-reversal", "exchanging u and v preserves real-rootedness of the projective form", "z -> -1/z symmetry of the upper half plane", 2000, 200, bc_reversal),
    def("cli-1-cache-round-trip", "serialize then deserialize of every table QpResult is the identity", "cache format", TABLE.len(), TABLE.len(), cli_cache),
    def("cli-2-determinism", "seeded self-tests and thread counts do not change results", "reproducible runs", 3, 3, cli_determinism),
    def("cli-3-exit-codes", "errors map to exit 2 (input) or 3 (invariant); failed acceptance to 4", "exit status contract", 9, 9, cli_exit_codes),
    def("cr-1-bijection", "matrix_to_pair is constant on orbits, separates orbits, and round trips", "orthonormal bases and balanced pairs", TABLE.len(), TABLE.len(), cr_bijection),
    def("cr-2-ait-identity", "|Q_p| = 24 |Q_R| for irreducible totally real rows", "SO3(Z) acts freely: |Q_p| = |SO3(Z)| |Q_R|", 13, 13, cr_ait),
    def("cr-3-class-group", "|Q_R| = |Cl+[2]| for nonempty maximal field rows", "Q_R as 2-torsion of the narrow class group", 12, 12, cr_class_group),
    def("cr-4-mass-formula", "|Q_p| = 48/|mu2(R)| |Cl+[2]| delta for the non-field rows", "mass formula for etale algebras", 3, 3, cr_mass),
    def("cr-5-stabilizers", "stabilizer order = |mu2(R)|/2 on every table row", "stabilizers as units of order 2", TABLE.len(), TABLE.len(), cr_stabilizers),
    def("cr-6-inverse-different", "trace dual of R equals (1/p'(theta)) R", "inverse different of a monogenic order", 100, 10, cr_inverse_different),
    def("f4-1-root-strings", "root strings are unbroken", "root-string property", 1, 1, f4_root_strings),
    def("f4-2-weyl-group", "|W(F4)| = 1152 and every reflection lies in W", "Weyl group of F4", 1, 1, f4_weyl),
    def("f4-3-subsets", "positive roots split as M_R, N, N_S with N = {a1} + N_11", "Heisenberg parabolic subsets", 1, 1, f4_subsets),
    def("f4-4-nu-exc", "<nu_exc, a_i^vee> = 1/m_i", "exceptional infinitesimal character", 1, 1, f4_nu_exc),
    def("har-1-suite", "ids are unique and sorted, every check has an anchor", "suite bookkeeping", 1, 1, har_suite),
    def("jor-1-sharp-product", "X X# = det(X) I", "adjugate in the Jordan algebra", 1000, 100, jor_sharp_product),
    def("jor-2-double-sharp", "(X#)# = det(X) X", "adjugate identity", 1000, 100, jor_double_sharp),
    def("jor-3-trace-pairing", "trace pairing is symmetric and bilinear", "trace form", 1000, 100, jor_trace_pair),
    def("jor-4-dual-sharp", "dual_sharp_scan(B) is empty for B <= 3", "X# integral forces X integral", 3, 2, jor_dual_sharp),
    def("mp-1-cocycle", "alpha(g1,g2) alpha(g1g2,g3) = alpha(g1,g2g3) alpha(g2,g3)", "2-cocycle of the metaplectic cover", 10_000, 100, mp_cocycle),
    def("mp-2-associativity", "products in the SL2 and GL2 covers are associative", "group law of the covers", 10_000, 100, mp_assoc),
    def("mp-3-hilbert", "symmetry, bimultiplicativity, (a,-a) = 1, (a,b)(-ab,a+b) = 1", "quadratic Hilbert symbol", 10_000, 100, mp_hilbert),
    def("mp-4-hilbert-product", "product of (a,b)_v over all places is 1", "Hilbert reciprocity", 10_000, 200, mp_hilbert_product),
    def("mp-5-covers", "the two GL2 covers differ by (y1, y2)_v", "two double covers of GL2", 10_000, 100, mp_covers),
    def("qp-1-exhaustive", "pruned enumeration equals brute force over [-3,3]^6", "exhaustive enumeration of Q_p", 200, 20, qp_exhaustive),
    def("qp-2-free-action", "stabilizers trivial and 24 | |Q_p| for totally real cubic fields", "SO3(Z) acts freely", 100, 10, qp_free),
    def("qp-3-charpoly", "every enumerated T has characteristic polynomial p", "definition of Q_p", TABLE.len(), TABLE.len(), qp_charpoly),
    def("qp-4-partition", "orbits are disjoint and cover Q_p", "orbit decomposition", TABLE.len(), TABLE.len(), qp_partition),
    def("wh-1-bessel-quadrature", "K_v(z) matches quadrature of the integral representation to 1e-10", "K-Bessel integral", 12, 12, wh_quadrature),
    def("wh-2-bessel-recurrence", "K_{v+1} = K_{v-1} + (2v/z) K_v to 1e-12", "K-Bessel recurrence", 1000, 100, wh_recurrence),
    def("wh-3-decay", "coefficients decrease monotonically to 0 as |alpha| grows", "exponential decay of Whittaker functions", 200, 20, wh_decay),
    def("wh-4-phase", "phases have modulus 1 and magnitudes match the closed form", "phase factor (|alpha|/alpha)^(2v)", 1000, 100, wh_phase),
];

/// The suite for a master seed and budget, ordered by id.
pub fn specs(seed: u64, budget: Budget) -> Vec<CheckSpec> {
    CHECKS
        .iter()
        .map(|c| CheckSpec {
            id: c.id,
            description: c.description,
            anchor: c.anchor,
            seed: derive_seed(seed, c.id),
            samples: match budget {
                Budget::Full => c.full,
                Budget::Quick => c.quick,
            },
        })
        .collect()
}

/// Per-check seed: FNV-1a of the id mixed into the master seed, then one
/// ChaCha8 output.
pub fn derive_seed(master: u64, id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(master ^ h).next_u64()
}

pub fn run_all(seed: u64) -> Result<Report> {
    run_suite(seed, Budget::Full, None)
}

/// Run the suite, optionally restricted to ids starting with `filter`.
pub fn run_suite(seed: u64, budget: Budget, filter: Option<&str>) -> Result<Report> {
    let table = TABLE
        .iter()
        .map(|r| Ok((*r, qp::compute(&r.polynomial.parse()?, None)?)))
        .collect::<Result<Vec<_>>>()?;
    let ctx = Ctx { table };
    let selected: Vec<(&CheckDef, CheckSpec)> = CHECKS
        .iter()
        .zip(specs(seed, budget))
        .filter(|(c, _)| filter.is_none_or(|f| c.id.starts_with(f)))
        .collect();
    let mut checks: Vec<CheckResult> = selected
        .par_iter()
        .map(|(c, spec)| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut out = Outcome::default();
            if let Err(e) = (c.run)(&ctx, &mut rng, spec.samples, &mut out) {
                out.error(&e);
            }
            CheckResult {
                id: spec.id,
                description: spec.description,
                anchor: spec.anchor,
                seed: spec.seed,
                samples: spec.samples,
                passed: out.failures == 0,
                failures: out.failures,
                detail: out.notes.join("; "),
            }
        })
        .collect();
    checks.sort_by_key(|c| c.id);
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(Report {
        seed,
        budget,
        total: checks.len(),
        failed,
        passed: failed == 0,
        checks,
    })
}

// ---- shared helpers -------------------------------------------------------

fn random_cubic(rng: &mut ChaCha8Rng, bound: i64) -> MonicCubic {
    MonicCubic::new(
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
    )
}

fn random_sym(rng: &mut ChaCha8Rng, bound: i64) -> [i64; 6] {
    std::array::from_fn(|_| rng.gen_range(-bound..=bound))
}

fn sym(e: [i64; 6]) -> SymMat3 {
    SymMat3::new([e[0], e[1], e[2]], e[3], e[4], e[5])
}

fn det3(m: [[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `(a2, a1, a0)` of `det(tI + T)`, by evaluating the determinant at
/// `t = 0, 1, 2` and interpolating.
fn charpoly_oracle(e: [i64; 6]) -> [i64; 3] {
    let [a, b, c, d, f, g] = e;
    let at = |t: i64| det3([[a + t, g, f], [g, b + t, d], [f, d, c + t]]);
    let (f0, f1, f2) = (at(0), at(1) - 1, at(2) - 8);
    // f1 = a2 + a1 + a0, f2 = 4 a2 + 2 a1 + a0
    let a0 = f0;
    let a2 = (f2 - 2 * f1 + a0) / 2;
    let a1 = f1 - a2 - a0;
    [a2, a1, a0]
}

fn small(t: &SymMat3) -> Option<[i64; 6]> {
    Some([
        t.d1.to_i64()?,
        t.d2.to_i64()?,
        t.d3.to_i64()?,
        t.o23.to_i64()?,
        t.o13.to_i64()?,
        t.o12.to_i64()?,
    ])
}

fn mu2_order(p: &MonicCubic) -> usize {
    1 << table::field_factor_count(p)
}

fn nonempty_rows(ctx: &Ctx) -> impl Iterator<Item = &(TableRow, QpResult)> {
    ctx.table.iter().filter(|(_, r)| r.total > 0)
}

// ---- algebra ---------------------------------------------------------------

fn alg_root_count(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    let eps = BigRational::new(1.into(), 1000.into());
    for _ in 0..n {
        let p = random_cubic(rng, 50);
        let disc = p.discriminant();
        if disc.is_zero() {
            continue;
        }
        let k = p.isolate_real_roots(&eps)?.len();
        let want = if disc.is_positive() { 3 } else { 1 };
        out.check(k == want, || format!("{p}: {k} roots, disc {disc}"));
    }
    Ok(())
}

/// Bareiss fraction-free determinant.
fn bareiss(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn sylvester_resultant(f: &[i128], g: &[i128]) -> i128 {
    // coefficient lists from the leading term down
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![0; size];
        r[i..i + f.len()].copy_from_slice(f);
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![0; size];
        r[i..i + g.len()].copy_from_slice(g);
        rows.push(r);
    }
    bareiss(rows)
}

fn alg_disc_resultant(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for _ in 0..n {
        let p = random_cubic(rng, 50);
        let c = [&p.a2, &p.a1, &p.a0].map(|x| x.to_i128().unwrap());
        let f = [1, c[0], c[1], c[2]];
        let g = [3, 2 * c[0], c[1]];
        let res = sylvester_resultant(&f, &g);
        let disc = p.discriminant();
        out.check(disc == BigInt::from(-res), || format!("{p}: disc {disc}, -Res {}", -res));
    }
    Ok(())
}

fn changes_sign(f: &QPoly, lo: &BigRational, hi: &BigRational) -> bool {
    let (a, b) = (f.sign_at(lo), f.sign_at(hi));
    a != b || f.eval(lo).is_zero() || f.eval(hi).is_zero()
}

fn alg_root_intervals(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    let eps = BigRational::new(1.into(), 64.into());
    for i in 0..n {
        let p = match i % 3 {
            0 => random_cubic(rng, 20),
            // repeated roots
            1 => {
                let (r, s) = (rng.gen_range(-6i64..=6), rng.gen_range(-6i64..=6));
                MonicCubic::new(-(2 * r + s), r * r + 2 * r * s, -r * r * s)
            }
            _ => {
                let r = rng.gen_range(-6i64..=6);
                MonicCubic::new(-3 * r, 3 * r * r, -r * r * r)
            }
        };
        let f = p.to_qpoly();
        let g = f.gcd(&f.derivative());
        for root in p.isolate_real_roots(&eps)? {
            let iv = &root.interval;
            let ok = if iv.is_point() {
                f.eval(&iv.lo).is_zero()
            } else {
                changes_sign(&f, &iv.lo, &iv.hi) || (g.degree().unwrap_or(0) > 0 && changes_sign(&g.squarefree_part(), &iv.lo, &iv.hi))
            };
            out.check(ok, || format!("{p}: interval [{}, {}]", iv.lo, iv.hi));
        }
    }
    Ok(())
}

// ---- jordan ----------------------------------------------------------------

fn jor_sharp_product(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for _ in 0..n {
        let x = sym(random_sym(rng, 20));
        let prod = linalg::mul(&x.to_matrix(), &x.sharp().to_matrix());
        let d = x.det();
        let want: linalg::Mat3Z = std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { d.clone() } else { BigInt::zero() })
        });
        out.check(prod == want, || format!("{x}"));
    }
    Ok(())
}

fn jor_double_sharp(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for _ in 0..n {
        let x = sym(random_sym(rng, 20));
        let d = x.det();
        let want = x.to_matrix().map(|r| r.map(|e| e * &d));
        out.check(x.sharp().sharp().to_matrix() == want, || format!("{x}"));
    }
    Ok(())
}

fn jor_trace_pair(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for _ in 0..n {
        let (x, y, z) = (random_sym(rng, 20), random_sym(rng, 20), random_sym(rng, 20));
        let (a, b) = (rng.gen_range(-9i64..=9), rng.gen_range(-9i64..=9));
        let comb: [i64; 6] = std::array::from_fn(|i| a * x[i] + b * y[i]);
        let (sx, sy, sz) = (sym(x), sym(y), sym(z));
        let sym_ok = sx.trace_pair(&sy) == sy.trace_pair(&sx);
        let lin = sym(comb).trace_pair(&sz) == BigInt::from(a) * sx.trace_pair(&sz) + BigInt::from(b) * sy.trace_pair(&sz);
        out.check(sym_ok && lin, || format!("{sx} {sy} {sz} a={a} b={b}"));
    }
    Ok(())
}

fn jor_dual_sharp(_: &Ctx, _: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for b in 1..=n as u32 {
        let hits = dual_sharp_scan(b);
        out.check(hits.is_empty(), || format!("B = {b}: {} hits", hits.len()));
    }
    Ok(())
}

// ---- binary cubics ---------------------------------------------------------

fn box_points(radius: i64) -> impl Iterator<Item = [i64; 6]> {
    let side = 2 * radius + 1;
    let total = side.pow(6);
    (0..total).map(move |mut k| {
        let mut e = [0i64; 6];
        for slot in e.iter_mut().rev() {
            *slot = k % side - radius;
            k /= side;
        }
        e
    })
}

fn bc_trace_map(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    let pts: Vec<[i64; 6]> = if n >= BOX3 {
        box_points(3).collect()
    } else {
        (0..n).map(|_| random_sym(rng, 3)).collect()
    };
    for e in pts {
        let t = sym(e);
        let comp = trace_map(&WVector::rank_one_from(&t)).companion()?;
        let [a2, a1, a0] = charpoly_oracle(e);
        out.check(comp == MonicCubic::new(a2, a1, a0), || format!("{t}: {comp}"));
    }
    Ok(())
}

fn random_form(rng: &mut ChaCha8Rng) -> BinaryCubic {
    loop {
        let c: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-10..=10));
        let f = BinaryCubic::new(c[0], c[1], c[2], if rng.gen_bool(0.5) { 1 } else { c[3] });
        if !f.is_zero() {
            return f;
        }
    }
}

fn bc_psd(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for _ in 0..n {
        let f = random_form(rng);
        let class = psd_classify(&f)?;
        if let Ok(p) = f.companion() {
            if p.is_totally_real() {
                out.check(class == Psd::Psd, || format!("{f}: companion {p} totally real but {class}"));
            }
        }
        if f.discriminant().is_negative() && !f.a.is_zero() {
            out.check(class == Psd::NotPsd, || format!("{f}: disc < 0 but {class}"));
        }
    }
    Ok(())
}

fn bc_reversal(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for _ in 0..n {
        let f = random_form(rng);
        let (a, b) = (psd_classify(&f)?, psd_classify(&f.reversed())?);
        out.check(a == b, || format!("{f}: {a} vs reversed {b}"));
    }
    Ok(())
}

// ---- qp kernel -------------------------------------------------------------

fn qp_exhaustive(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    let mut brute: HashMap<[i64; 3], Vec<[i64; 6]>> = HashMap::new();
    for e in box_points(3) {
        brute.entry(charpoly_oracle(e)).or_default().push(e);
    }
    for _ in 0..n {
        // eigenvalues of a matrix with entries in [-1, 1] are at most 3
        let e = random_sym(rng, 1);
        let [a2, a1, a0] = charpoly_oracle(e);
        let p = MonicCubic::new(a2, a1, a0);
        let got: Vec<[i64; 6]> = qp::enumerate(&p)?.matrices.iter().filter_map(small).collect();
        let mut want = brute.get(&[a2, a1, a0]).cloned().unwrap_or_default();
        want.sort_unstable();
        out.check(got == want, || format!("{p}: {} vs brute force {}", got.len(), want.len()));
    }
    Ok(())
}

fn qp_free(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    let check = |p: &MonicCubic, r: &QpResult, out: &mut Outcome| {
        let ok = r.total % 24 == 0 && r.orbits.iter().all(|o| o.stabilizer_order == 1);
        out.check(ok, || format!("{p}: total {}", r.total));
    };
    for (row, r) in &ctx.table {
        if row.structure == Structure::CubicField {
            check(&r.polynomial, r, out);
        }
    }
    let mut done = 0;
    while done < n {
        let [a2, a1, a0] = charpoly_oracle(random_sym(rng, 2));
        let p = MonicCubic::new(a2, a1, a0);
        if !p.is_squarefree() || table::field_factor_count(&p) != 1 {
            continue;
        }
        check(&p, &qp::compute(&p, None)?, out);
        done += 1;
    }
    Ok(())
}

fn qp_charpoly(ctx: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    for (_, r) in &ctx.table {
        let p = &r.polynomial;
        let want = [&p.a2, &p.a1, &p.a0].map(|x| x.to_i64());
        for t in &r.matrices {
            let ok = small(t).is_some_and(|e| charpoly_oracle(e).map(Some) == want);
            out.check(ok, || format!("{t} for {p}"));
        }
    }
    Ok(())
}

fn qp_partition(ctx: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    let group = qp::so3z_elements();
    for (_, r) in &ctx.table {
        let all: BTreeSet<&SymMat3> = r.matrices.iter().collect();
        let mut seen: BTreeSet<SymMat3> = BTreeSet::new();
        let mut sum = 0;
        for o in &r.orbits {
            let orbit: BTreeSet<SymMat3> = group.iter().map(|g| o.rep.conjugate(&g.matrix())).collect();
            let stab = group.iter().filter(|g| o.rep.conjugate(&g.matrix()) == o.rep).count();
            out.check(orbit.len() == o.size && o.size * stab == 24, || format!("orbit of {} in {}", o.rep, r.polynomial));
            out.check(orbit.iter().all(|t| all.contains(t)), || format!("orbit of {} leaves Q_p", o.rep));
            out.check(orbit.iter().all(|t| !seen.contains(t)), || format!("orbits overlap at {}", o.rep));
            sum += orbit.len();
            seen.extend(orbit);
        }
        out.check(sum == r.total && seen.len() == all.len(), || format!("{}: orbits cover {sum} of {}", r.polynomial, r.total));
    }
    Ok(())
}

// ---- cubic rings -----------------------------------------------------------

fn cr_bijection(ctx: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    for (_, r) in nonempty_rows(ctx) {
        let ring = CubicRing::new(r.polynomial.clone());
        let mut reps = Vec::new();
        for (idx, o) in r.orbits.iter().enumerate() {
            let rep_pair = cubic_rings::matrix_to_pair(&o.rep, &ring)?;
            for t in r.orbit_members(idx) {
                let pair = cubic_rings::matrix_to_pair(t, &ring)?;
                out.check(cubic_rings::pairs_equivalent(&ring, &pair, &rep_pair)?, || {
                    format!("{t} and {} give inequivalent pairs", o.rep)
                });
                let back = cubic_rings::pair_to_matrix(&ring, &pair)?;
                out.check(r.orbit_index(&back) == Some(idx), || format!("{t} round trips to {back}"));
            }
            reps.push(rep_pair);
        }
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                out.check(!cubic_rings::pairs_equivalent(&ring, &reps[i], &reps[j])?, || {
                    format!("{}: orbits {i} and {j} give equivalent pairs", r.polynomial)
                });
            }
        }
    }
    Ok(())
}

fn field_rows(ctx: &Ctx) -> impl Iterator<Item = &(TableRow, QpResult)> {
    ctx.table.iter().filter(|(row, _)| row.structure == Structure::CubicField)
}

fn cr_ait(ctx: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    for (_, r) in field_rows(ctx) {
        let ring = CubicRing::new(r.polynomial.clone());
        let qr = cubic_rings::classes_qr_from(&ring, r)?;
        out.check(r.total == 24 * qr.count, || format!("{}: {} vs 24 * {}", r.polynomial, r.total, qr.count));
    }
    Ok(())
}

fn cr_class_group(ctx: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    for (row, r) in field_rows(ctx).filter(|(_, r)| r.total > 0) {
        let ring = CubicRing::new(r.polynomial.clone());
        if !cubic_rings::is_maximal(&ring)? {
            continue;
        }
        let cl2 = row.class_group.parse::<AbelianGroup>()?.two_torsion();
        let qr = cubic_rings::classes_qr_from(&ring, r)?;
        out.check(qr.count as u64 == cl2, || format!("{}: |Q_R| = {}, |Cl+[2]| = {cl2}", r.polynomial, qr.count));
    }
    Ok(())
}

fn cr_mass(ctx: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    for (row, r) in ctx.table.iter().filter(|(row, _)| row.structure != Structure::CubicField) {
        let mu2 = mu2_order(&r.polynomial);
        let cl2 = row.class_group.parse::<AbelianGroup>()?.two_torsion() as usize;
        let delta = usize::from(r.total > 0);
        out.check(mu2 == 4 && r.total == 48 / mu2 * cl2 * delta, || {
            format!("{}: {} vs 48/{mu2} * {cl2} * {delta}", r.polynomial, r.total)
        });
    }
    Ok(())
}

fn cr_stabilizers(ctx: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    for (_, r) in &ctx.table {
        let want = mu2_order(&r.polynomial) / 2;
        for o in &r.orbits {
            let direct = qp::stabilizer(&o.rep).len();
            out.check(direct == want && o.stabilizer_order == want, || {
                format!("{}: stabilizer of {} has order {direct}, expected {want}", r.polynomial, o.rep)
            });
        }
    }
    Ok(())
}

fn cr_inverse_different(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    let mut done = 0;
    while done < n {
        let [a2, a1, a0] = charpoly_oracle(random_sym(rng, 4));
        let p = MonicCubic::new(a2, a1, a0);
        if !p.is_squarefree() {
            continue;
        }
        done += 1;
        let ring = CubicRing::new(p.clone());
        let dual = match ring.inverse_different() {
            Ok(d) => d,
            Err(e) => {
                out.check(false, || format!("{p}: {e}"));
                continue;
            }
        };
        // independent: Tr(d_i theta^j) is a unimodular integer matrix
        let basis = dual.basis_elems();
        let m: Vec<Vec<BigRational>> = basis
            .iter()
            .map(|d| (0..3).map(|j| ring.trace(&ring.mul(d, &ring.theta_power(j)))).collect())
            .collect();
        let integral = m.iter().flatten().all(|x| x.is_integer());
        let mat: linalg::Mat3Q = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].clone()));
        let unimodular = linalg::det(&mat).abs().is_one();
        let scaled = cubic_rings::FracIdeal::unit(&ring).scale(&ring, &ring.inv(&ring.derivative_at_theta())?);
        out.check(integral && unimodular && scaled == dual, || format!("{p}"));
    }
    Ok(())
}

// ---- F4 --------------------------------------------------------------------

fn f4_root_strings(_: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    let rs = RootSystemF4::build();
    out.check(rs.root_strings_unbroken(), || "broken root string".into());
    Ok(())
}

fn f4_weyl(_: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    let rs = RootSystemF4::build();
    let mut w = rs.weyl_group();
    w.sort();
    out.check(w.len() == WEYL_ORDER, || format!("|W| = {}", w.len()));
    for r in rs.roots() {
        let s = WeylElement::reflection(r);
        out.check(w.binary_search(&s).is_ok(), || format!("reflection in {r:?} missing"));
    }
    Ok(())
}

fn f4_subsets(_: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    let rs = RootSystemF4::build();
    let s = rs.subsets();
    let coeffs = |v: &[crate::rootsys::Root]| -> Vec<[i64; 4]> {
        let mut c: Vec<[i64; 4]> = v.iter().map(|r| rs.root_coefficients(r).unwrap()).collect();
        c.sort();
        c
    };
    let mut pos = coeffs(&rs.positive_roots());
    let mut union = [coeffs(&s.m_r), coeffs(&s.n), coeffs(&s.n_s)].concat();
    union.sort();
    pos.dedup();
    out.check(union == pos, || "M_R, N, N_S do not partition the positive roots".into());
    let mut n_parts = [vec![[1, 0, 0, 0]], coeffs(&s.n_11)].concat();
    n_parts.sort();
    out.check(n_parts == coeffs(&s.n), || "N is not {a1} + N_11".into());
    Ok(())
}

fn f4_nu_exc(_: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    let rs = RootSystemF4::build();
    let got = rs.pairings(&rs.nu_exc().0);
    let want = M_VALUES.map(|m| Rational64::new(1, m));
    out.check(got == want, || format!("{got:?}"));
    Ok(())
}

// ---- metaplectic -----------------------------------------------------------

fn selftest_at_places(test: SelfTest, places: &[Place], rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for &v in places {
        let r = run_selftest(test, v, n, rng.next_u64())?;
        out.check(r.failures == 0, || format!("{test} at {v}: {} failures, e.g. {:?}", r.failures, r.examples.first()));
    }
    Ok(())
}

fn mp_cocycle(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    selftest_at_places(SelfTest::Cocycle, &PLACES, rng, n, out)
}

fn mp_assoc(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    selftest_at_places(SelfTest::Associativity, &PLACES, rng, n, out)
}

fn mp_hilbert(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    selftest_at_places(SelfTest::Hilbert, &PLACES, rng, n, out)
}

fn mp_hilbert_product(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    selftest_at_places(SelfTest::HilbertProduct, &[Place::Real], rng, n, out)
}

fn mp_covers(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    selftest_at_places(SelfTest::Covers, &PLACES, rng, n, out)
}

// ---- whittaker -------------------------------------------------------------

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `int_0^inf exp(-z cosh t) cosh(v t) dt`, truncated where the integrand
/// is below `e^{-60}` of its scale.
pub fn bessel_k_quadrature(v: f64, z: f64) -> f64 {
    let mut upper = 1.0f64;
    while z * upper.cosh() - v * upper < 60.0 + z {
        upper *= 1.5;
    }
    let f = |t: f64| (-z * t.cosh()).exp() * (v * t).cosh();
    // split where the integrand peaks so each piece is smooth and unimodal
    let tol = 1e-15 * f(0.0).max(1e-300);
    adaptive_simpson(&f, 0.0, upper / 4.0, tol) + adaptive_simpson(&f, upper / 4.0, upper, tol)
}

fn wh_quadrature(_: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    for num in [1, 3, 5] {
        for z in [0.5, 1.0, 2.0, 5.0] {
            let k = bessel_k_half(HalfInt::new(num)?, z)?;
            let quad = bessel_k_quadrature(f64::from(num as i32) / 2.0, z);
            let rel = (k - quad).abs() / quad.abs();
            out.check(rel < 1e-10, || format!("K_{num}/2({z}): {k} vs {quad}, rel {rel:e}"));
        }
    }
    Ok(())
}

fn wh_recurrence(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for _ in 0..n {
        let num = 2 * rng.gen_range(0..5) + 1;
        let z = rng.gen_range(0.1..20.0);
        let v = HalfInt::new(num)?;
        let lo = bessel_k_half(HalfInt::new(num - 2)?, z)?;
        let mid = bessel_k_half(v, z)?;
        let hi = bessel_k_half(HalfInt::new(num + 2)?, z)?;
        let rhs = lo + 2.0 * v.value() / z * mid;
        let rel = (hi - rhs).abs() / hi.abs();
        out.check(rel < 1e-12, || format!("v = {v}, z = {z}: rel {rel:e}"));
    }
    Ok(())
}

fn random_alpha(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

fn wh_decay(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for _ in 0..n {
        let nh = HalfInt::new(2 * rng.gen_range(0..5) + 1)?;
        let nu = rng.gen_range(0.1..5.0);
        let dir = random_alpha(rng, 1.0);
        let mut prev: Option<Vec<f64>> = None;
        let mut ok = true;
        for step in 0..=28 {
            let r = 1.0 + 0.25 * f64::from(step);
            let w = whittaker_value(nh, nu, dir * r)?;
            let mags: Vec<f64> = w.coefficients.iter().map(|c| c.value.norm()).collect();
            if let Some(p) = &prev {
                ok &= mags.iter().zip(p).all(|(m, q)| m < q);
            }
            prev = Some(mags);
        }
        ok &= prev.unwrap().iter().all(|m| *m < 1e-20);
        out.check(ok, || format!("n = {nh}, nu = {nu}"));
    }
    Ok(())
}

fn factorial(n: i64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn wh_phase(_: &Ctx, rng: &mut ChaCha8Rng, n: usize, out: &mut Outcome) -> Result<()> {
    for _ in 0..n {
        let nh = HalfInt::new(2 * rng.gen_range(0..5) + 1)?;
        let nu = rng.gen_range(0.1..5.0);
        let r = rng.gen_range(0.2..3.0);
        let (a, b) = (random_alpha(rng, r), random_alpha(rng, r));
        let (wa, wb) = (whittaker_value(nh, nu, a)?, whittaker_value(nh, nu, b)?);
        let mut ok = true;
        for (ca, cb) in wa.coefficients.iter().zip(&wb.coefficients) {
            let v = HalfInt::new(ca.x_exp as i64 - ca.y_exp as i64)?;
            let mag = nu.powf(nh.value() + 1.0) * bessel_k_half(v, r * r)?
                / (factorial(i64::from(ca.x_exp)) * factorial(i64::from(ca.y_exp)));
            let rel = |x: f64| (x - mag).abs() / mag;
            ok &= rel(ca.value.norm()) < 1e-12 && rel(cb.value.norm()) < 1e-12;
            // the phase is (|a|/a)^{2v}
            let phase = ca.value / ca.value.norm();
            let want = (a.conj() / r).powi((2.0 * v.value()) as i32);
            ok &= (phase.norm() - 1.0).abs() < 1e-15 && (phase - want).norm() < 1e-12;
        }
        out.check(ok, || format!("n = {nh}, nu = {nu}, alpha = {a}"));
    }
    Ok(())
}

// ---- cli contracts ---------------------------------------------------------

fn cli_cache(ctx: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    for (_, r) in &ctx.table {
        let text = serde_json::to_string(r).map_err(|e| Error::Invariant(e.to_string()))?;
        let back: QpResult = serde_json::from_str(&text).map_err(|e| Error::Invariant(e.to_string()))?;
        out.check(&back == r, || format!("{} does not round trip", r.polynomial));
    }
    Ok(())
}

fn cli_determinism(ctx: &Ctx, rng: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    let seed = rng.next_u64();
    let a = run_selftest(SelfTest::Cocycle, Place::Prime(2), 500, seed)?;
    let b = run_selftest(SelfTest::Cocycle, Place::Prime(2), 500, seed)?;
    out.check(a == b, || "self-test differs between identical runs".into());
    let (_, r) = &ctx.table[13];
    let one = qp::compute(&r.polynomial, Some(1))?;
    out.check(&one == r, || "enumeration depends on the number of threads".into());
    out.check(dual_sharp_scan(2) == dual_sharp_scan(2), || "dual_sharp_scan differs between runs".into());
    Ok(())
}

fn cli_exit_codes(_: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    let cases = [
        (Error::Parse("x".into()), 2),
        (Error::InvalidInput("x".into()), 2),
        (Error::Unsupported("x".into()), 2),
        (Error::PlaceMismatch("2".into(), "3".into()), 2),
        (Error::ZeroDivisor, 3),
        (Error::NotBalanced("x".into()), 3),
        (Error::UndecidedAtCap(4096), 3),
        (Error::Invariant("x".into()), 3),
    ];
    for (e, code) in cases {
        out.check(e.exit_code() == code, || format!("{e:?} -> {}", e.exit_code()));
    }
    let failing = Report {
        seed: 0,
        budget: Budget::Quick,
        total: 1,
        failed: 1,
        passed: false,
        checks: vec![],
    };
    out.check(failing.exit_code() == 4, || "failed report does not exit 4".into());
    Ok(())
}

fn har_suite(_: &Ctx, _: &mut ChaCha8Rng, _: usize, out: &mut Outcome) -> Result<()> {
    let ids: Vec<&str> = CHECKS.iter().map(|c| c.id).collect();
    out.check(ids.windows(2).all(|w| w[0] < w[1]), || "ids not strictly sorted".into());
    out.check(CHECKS.iter().all(|c| !c.anchor.is_empty() && !c.description.is_empty()), || "missing anchor".into());
    Ok(())
}
