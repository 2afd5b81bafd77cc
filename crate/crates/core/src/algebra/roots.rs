//! Exact real-root isolation by Sturm sequences and bisection.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{sturm_count, sturm_total, QPoly};

/// A closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn abs_max(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    /// Sign of every point of the interval, if uniform and nonzero.
    pub fn strict_sign(&self) -> Option<Ordering> {
        let z = BigRational::zero();
        if self.lo > z {
            Some(Ordering::Greater)
        } else if self.hi < z {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Self::new(lo, hi)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let a = &self.lo * s;
        let b = &self.hi * s;
        if a <= b {
            Self::new(a, b)
        } else {
            Self::new(b, a)
        }
    }

    /// `1 / self`; `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Self> {
        self.strict_sign()?;
        Some(Self::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.recip()?))
    }

    /// Interval enclosure of `p(x)` for `x` in `self` (Horner form).
    pub fn eval_poly(&self, p: &QPoly) -> Self {
        let mut acc = Self::point(BigRational::zero());
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Self::point(c.clone()));
        }
        acc
    }
}

impl fmt::Debug for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An isolating interval together with the multiplicity of the root it holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatedRoot {
    pub interval: RationalInterval,
    pub multiplicity: usize,
}

/// A root of a squarefree polynomial, pinned by an isolating interval.
///
/// Either the interval is a single (rational) point, or `f` has exactly one
/// root in the interval and is nonzero at both endpoints.
#[derive(Clone, Debug)]
pub struct RealRoot {
    poly: QPoly,
    interval: RationalInterval,
}

impl RealRoot {
    pub fn interval(&self) -> &RationalInterval {
        &self.interval
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn is_exact(&self) -> bool {
        self.interval.is_point()
    }

    /// One bisection step. The interval never widens.
    pub fn bisect(&mut self) {
        if self.interval.is_point() {
            return;
        }
        let mid = self.interval.midpoint();
        let sm = self.poly.sign_at(&mid);
        if sm == Ordering::Equal {
            self.interval = RationalInterval::point(mid);
            return;
        }
        let slo = self.poly.sign_at(&self.interval.lo);
        if slo != sm {
            self.interval.hi = mid;
        } else {
            self.interval.lo = mid;
        }
    }

    pub fn refine_below(&mut self, eps: &BigRational) {
        while !self.interval.is_point() && &self.interval.width() >= eps {
            self.bisect();
        }
    }

    /// Refine until the interval width is below `2^-bits`.
    pub fn refine_bits(&mut self, bits: u32) {
        let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
        self.refine_below(&eps);
    }

    /// Sign of `q` at this root, decided exactly.
    pub fn sign_of(&mut self, q: &QPoly) -> Ordering {
        if self.interval.is_point() {
            return q.sign_at(&self.interval.lo);
        }
        // q vanishes at the root iff gcd(q, f) does; gcd's roots are roots of f
        // and this interval holds exactly one of them.
        let g = q.gcd(&self.poly);
        if g.degree().unwrap_or(0) > 0 {
            let lo = g.sign_at(&self.interval.lo);
            let hi = g.sign_at(&self.interval.hi);
            // g is squarefree (divides f), so a root inside shows as a sign change.
            if lo != hi {
                return Ordering::Equal;
            }
        }
        let seq = q.sturm_sequence();
        loop {
            let lo = &self.interval.lo;
            let hi = &self.interval.hi;
            if q.sign_at(lo) != Ordering::Equal && sturm_count(&seq, lo, hi) == 0 {
                return q.sign_at(lo);
            }
            self.bisect();
            if self.interval.is_point() {
                return q.sign_at(&self.interval.lo);
            }
        }
    }
}

fn cauchy_bound(p: &QPoly) -> BigRational {
    let lc = p.leading().expect("nonzero polynomial").abs();
    let m = p
        .coeffs()
        .iter()
        .rev()
        .skip(1)
        .map(|c| c.abs() / &lc)
        .max()
        .unwrap_or_else(BigRational::zero);
    m + BigRational::one()
}

/// Isolate the real roots of a squarefree polynomial, in increasing order,
/// each interval narrower than `eps` (or exact).
pub fn isolate_squarefree(f: &QPoly, eps: &BigRational) -> Vec<RealRoot> {
    assert!(eps > &BigRational::zero(), "eps must be positive");
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let seq = f.sturm_sequence();
    let c = cauchy_bound(f);
    let mut out = Vec::new();
    let lo = -c.clone();
    let n = sturm_count(&seq, &lo, &c);
    isolate_rec(f, &seq, lo, c, n, eps, &mut out);
    out.sort_by(|a, b| a.interval.lo.cmp(&b.interval.lo));
    out
}

// Invariant: f(lo) != 0, f(hi) != 0, n = #roots in (lo, hi).
fn isolate_rec(
    f: &QPoly,
    seq: &[QPoly],
    lo: BigRational,
    hi: BigRational,
    n: usize,
    eps: &BigRational,
    out: &mut Vec<RealRoot>,
) {
    if n == 0 {
        return;
    }
    if n == 1 {
        let mut r = RealRoot {
            poly: f.clone(),
            interval: RationalInterval::new(lo, hi),
        };
        r.refine_below(eps);
        out.push(r);
        return;
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mid = (&lo + &hi) / &two;
    if f.sign_at(&mid) == Ordering::Equal {
        out.push(RealRoot {
            poly: f.clone(),
            interval: RationalInterval::point(mid.clone()),
        });
        // Step off the exact root until it is the only root in [mid-d, mid+d].
        let mut d = (&hi - &lo) / BigRational::from_integer(BigInt::from(4));
        loop {
            let a = &mid - &d;
            let b = &mid + &d;
            if f.sign_at(&a) != Ordering::Equal
                && f.sign_at(&b) != Ordering::Equal
                && sturm_count(seq, &a, &b) == 1
            {
                let nl = sturm_count(seq, &lo, &a);
                let nr = sturm_count(seq, &b, &hi);
                isolate_rec(f, seq, lo, a, nl, eps, out);
                isolate_rec(f, seq, b, hi, nr, eps, out);
                return;
            }
            d /= &two;
        }
    }
    let nl = sturm_count(seq, &lo, &mid);
    isolate_rec(f, seq, lo, mid.clone(), nl, eps, out);
    isolate_rec(f, seq, mid, hi, n - nl, eps, out);
}

/// All real roots of `p` (any degree >= 1) with multiplicities, as disjoint
/// isolating intervals of width `< eps`, in increasing order.
pub fn isolate_with_multiplicity(p: &QPoly, eps: &BigRational) -> Vec<IsolatedRoot> {
    let mut roots: Vec<(RealRoot, usize)> = Vec::new();
    for (mult, factor) in p.squarefree_decomposition() {
        for r in isolate_squarefree(&factor, eps) {
            roots.push((r, mult));
        }
    }
    // Roots of different squarefree factors are distinct; refine until disjoint.
    loop {
        roots.sort_by(|a, b| a.0.interval.lo.cmp(&b.0.interval.lo));
        let mut clash = None;
        for i in 1..roots.len() {
            if roots[i - 1].0.interval.overlaps(&roots[i].0.interval) {
                clash = Some(i);
                break;
            }
        }
        match clash {
            None => break,
            Some(i) => {
                roots[i - 1].0.bisect();
                roots[i].0.bisect();
            }
        }
    }
    roots
        .into_iter()
        .map(|(r, m)| IsolatedRoot {
            interval: r.interval,
            multiplicity: m,
        })
        .collect()
}

/// Real roots of the squarefree part of `p`, as refinable handles.
pub fn real_roots(p: &QPoly, eps: &BigRational) -> Vec<RealRoot> {
    isolate_squarefree(&p.squarefree_part(), eps)
}

/// Number of distinct real roots.
pub fn count_distinct_real_roots(p: &QPoly) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    sturm_total(&p.squarefree_part().sturm_sequence())
}

/// True iff all complex roots of `p` are real (counted with multiplicity).
pub fn all_roots_real(p: &QPoly) -> bool {
    let sf = p.squarefree_part();
    let deg = sf.degree().unwrap_or(0);
    deg == 0 || sturm_total(&sf.sturm_sequence()) == deg
}
