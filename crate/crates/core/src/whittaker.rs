//! Generalized Whittaker functions of half-integral weight `n`:
//!
//! `W(g) = nu^{n+1} sum_{-n <= v <= n} (|a|/a)^{2v} K_v(|a|^2) x^{n+v} y^{n-v} / ((n+v)! (n-v)!)`
//!
//! over half-integers `v`. This is the only floating-point module; values are
//! binary64.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::binary_cubics::{BinaryCubic, Psd};
use crate::error::{Error, Result};

/// A half-integer `num / 2` with `num` odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub fn new(num: i64) -> Result<Self> {
        if num % 2 == 0 {
            return Err(Error::InvalidInput(format!("{num}/2 is not a half-integer")));
        }
        Ok(HalfInt(num))
    }

    pub fn numerator(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// `|v| - 1/2`, the number of recurrence steps from `K_{1/2}`.
    fn steps(self) -> u32 {
        ((self.0.unsigned_abs() - 1) / 2) as u32
    }

    /// All half-integers `v` with `-self <= v <= self`, ascending.
    pub fn range_sym(self) -> impl Iterator<Item = HalfInt> {
        let n = self.0.abs();
        (-n..=n).step_by(2).map(HalfInt)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("bad half-integer '{s}'"));
        if let Some((n, d)) = t.split_once('/') {
            if d.trim() != "2" {
                return Err(bad());
            }
            return HalfInt::new(n.trim().parse().map_err(|_| bad())?);
        }
        let x: f64 = t.parse().map_err(|_| bad())?;
        let num = x * 2.0;
        if num.fract() != 0.0 {
            return Err(bad());
        }
        HalfInt::new(num.to_i64().ok_or_else(bad)?)
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `K_v(z)` for half-integral `v`, from `K_{1/2}(z) = sqrt(pi/(2z)) e^{-z}`,
/// `K_{-v} = K_v` and `K_{v+1} = K_{v-1} + (2v/z) K_v`.
pub fn bessel_k_half(v: HalfInt, z: f64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::InvalidInput(format!("K-Bessel argument must be positive, got {z}")));
    }
    let k_half = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp();
    let (mut prev, mut cur) = (k_half, k_half);
    let mut order = 0.5;
    for _ in 0..v.steps() {
        let next = prev + 2.0 * order / z * cur;
        prev = cur;
        cur = next;
        order += 1.0;
    }
    Ok(cur)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// One monomial `x^{x_exp} y^{y_exp}` with its coefficient, the factorials
/// included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coefficient {
    pub x_exp: u32,
    pub y_exp: u32,
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
}

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhittakerValue {
    pub n: HalfInt,
    /// Ascending in `x_exp`.
    pub coefficients: Vec<Coefficient>,
}

impl WhittakerValue {
    pub fn coefficient(&self, x_exp: u32) -> Option<Complex64> {
        self.coefficients.iter().find(|c| c.x_exp == x_exp).map(|c| c.value)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coefficients {
            c.value = -c.value;
        }
        out
    }

    /// Largest `|a_k - b_k| / max(|a_k|, |b_k|)` over matching monomials.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "different weights");
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| {
                let scale = a.value.norm().max(b.value.norm());
                if scale == 0.0 {
                    0.0
                } else {
                    (a.value - b.value).norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

fn check_inputs(nu: f64, alpha: Complex64) -> Result<()> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidInput(format!("nu must be positive, got {nu}")));
    }
    if alpha.norm() == 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidInput("alpha must be nonzero".into()));
    }
    Ok(())
}

/// `(|a|/a)^k` as a unit complex number.
fn phase_pow(alpha: Complex64, k: i64) -> Complex64 {
    let u = alpha.conj() / alpha.norm();
    let u = u / u.norm();
    let p = u.powi(k as i32);
    p / p.norm()
}

pub fn whittaker_value(n: HalfInt, nu: f64, alpha: Complex64) -> Result<WhittakerValue> {
    if n.numerator() < 1 {
        return Err(Error::InvalidInput(format!("weight must be at least 1/2, got {n}")));
    }
    check_inputs(nu, alpha)?;
    let r2 = alpha.norm_sqr();
    let pref = nu.powf(n.value() + 1.0);
    let mut coefficients = Vec::new();
    for v in n.range_sym() {
        let x_exp = ((n.numerator() + v.numerator()) / 2) as u32;
        let y_exp = ((n.numerator() - v.numerator()) / 2) as u32;
        let k = bessel_k_half(v, r2)?;
        let mag = pref * k / (factorial(x_exp) * factorial(y_exp));
        coefficients.push(Coefficient {
            x_exp,
            y_exp,
            value: phase_pow(alpha, v.numerator()) * mag,
        });
    }
    Ok(WhittakerValue { n, coefficients })
}

/// The weight-1/2 case written out:
/// `sqrt(pi nu^3 / 2) e^{-|a|^2} / |a| [(|a|/a) x + (a/|a|) y]`.
pub fn ell1_closed_form(nu: f64, alpha: Complex64) -> Result<WhittakerValue> {
    check_inputs(nu, alpha)?;
    let r = alpha.norm();
    let pref = (std::f64::consts::PI * nu.powi(3) / 2.0).sqrt() * (-r * r).exp() / r;
    let ph = alpha / r;
    Ok(WhittakerValue {
        n: HalfInt(1),
        coefficients: vec![
            Coefficient {
                x_exp: 0,
                y_exp: 1,
                value: ph * pref,
            },
            Coefficient {
                x_exp: 1,
                y_exp: 0,
                value: ph.conj() * pref,
            },
        ],
    })
}

/// `f(z, 1)` evaluated at a complex point.
pub fn eval_form(f: &BinaryCubic, z: Complex64) -> Complex64 {
    let c = |x: &num_bigint::BigInt| Complex64::new(x.to_f64().unwrap_or(f64::NAN), 0.0);
    ((c(&f.a) * z + c(&f.b)) * z + c(&f.c)) * z + c(&f.d)
}

/// `alpha^2 = -j p_f(z)`, with `j` the automorphy factor supplied by the
/// caller for a group element taking `i` to `z`.
pub fn alpha_squared(f: &BinaryCubic, z: Complex64, j: f64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidInput(format!("Im z must be positive, got {}", z.im)));
    }
    if f.psd_classify()? != Psd::Psd {
        return Err(Error::InvalidInput(format!("form {f:?} is not positive semi-definite")));
    }
    Ok(-eval_form(f, z) * j)
}

/// Default automorphy factor `(Im z)^{-1/2}` for the upper-triangular
/// representative.
pub fn default_j(z: Complex64) -> f64 {
    z.im.powf(-0.5)
}

/// Continuous square roots along a path of nonzero values, starting from
/// the principal root of the first value.
pub fn track_sqrt_branch(values: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out: Vec<Complex64> = Vec::with_capacity(values.len());
    for w in values {
        if w.norm() == 0.0 {
            return Err(Error::InvalidInput("path passes through zero".into()));
        }
        let r = w.sqrt();
        let next = match out.last() {
            Some(prev) if (r - prev).norm() > (r + prev).norm() => -r,
            _ => r,
        };
        out.push(next);
    }
    Ok(out)
}
