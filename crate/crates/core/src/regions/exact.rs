//! Number plumbing for the region predicates.
//!
//! Every condition is linear in (1, m, alpha, 1/p, q/p, kappa), so it can be
//! decided exactly on rationals. Evaluating in f64 first and redoing only the
//! near-ties in `BigRational` keeps grids fast.

use std::cell::Cell;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

use super::RegionError;

pub(crate) trait Scalar: Clone + PartialOrd + Num + Neg<Output = Self> {
    fn int(v: i64) -> Self;
    fn approx(&self) -> f64;
}

impl Scalar for f64 {
    fn int(v: i64) -> Self {
        v as f64
    }
    fn approx(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

pub(crate) fn frac<T: Scalar>(num: i64, den: i64) -> T {
    T::int(num) / T::int(den)
}

/// `(x)_+`
pub(crate) fn pos<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

pub(crate) fn max_of<T: Scalar>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter()
        .reduce(|a, b| if b > a { b } else { a })
        .expect("non-empty")
}

pub(crate) fn min_of<T: Scalar>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter()
        .reduce(|a, b| if b < a { b } else { a })
        .expect("non-empty")
}

/// Decides strict and non-strict comparisons.
pub(crate) trait Judge<T> {
    fn lt(&self, a: &T, b: &T) -> bool;
    fn le(&self, a: &T, b: &T) -> bool;
}

/// Float comparisons that remember whether any of them was too close to call.
#[derive(Default)]
pub(crate) struct Filter {
    tie: Cell<bool>,
}

impl Filter {
    const REL: f64 = 1e-12;

    fn watch(&self, a: f64, b: f64) {
        if !((a - b).abs() > Self::REL * (1.0 + a.abs() + b.abs())) {
            self.tie.set(true);
        }
    }

    pub(crate) fn undecided(&self) -> bool {
        self.tie.get()
    }
}

impl Judge<f64> for Filter {
    fn lt(&self, a: &f64, b: &f64) -> bool {
        self.watch(*a, *b);
        a < b
    }
    fn le(&self, a: &f64, b: &f64) -> bool {
        self.watch(*a, *b);
        a <= b
    }
}

pub(crate) struct Exact;

impl Judge<BigRational> for Exact {
    fn lt(&self, a: &BigRational, b: &BigRational) -> bool {
        a < b
    }
    fn le(&self, a: &BigRational, b: &BigRational) -> bool {
        a <= b
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Vars<T> {
    pub n: u32,
    pub p: T,
    pub q: T,
    pub m: T,
    pub alpha: T,
    pub kappa: T,
}

impl<T: Scalar> Vars<T> {
    pub fn nn(&self) -> T {
        T::int(self.n as i64)
    }
    /// 1/p
    pub fn u(&self) -> T {
        T::one() / self.p.clone()
    }
    /// (1 - alpha)_+
    pub fn lo_a(&self) -> T {
        pos(T::one() - self.alpha.clone())
    }
    /// (alpha - 1)_+
    pub fn hi_a(&self) -> T {
        pos(self.alpha.clone() - T::one())
    }
    /// (m - 1)_+
    pub fn hi_m(&self) -> T {
        pos(self.m.clone() - T::one())
    }
    /// p/n
    pub fn pn(&self) -> T {
        self.p.clone() / self.nn()
    }
}

/// A parameter value known both exactly and as a double.
#[derive(Clone, Debug, PartialEq)]
pub struct Exactish {
    pub exact: BigRational,
    pub approx: f64,
}

impl Exactish {
    pub fn from_f64(name: &'static str, v: f64) -> Result<Self, RegionError> {
        let exact = BigRational::from_float(v).ok_or(RegionError::NotFinite { name })?;
        Ok(Self { exact, approx: v })
    }

    /// Parses "0.4", "-1.5e-3", "14/15" or "7" without rounding.
    pub fn parse(s: &str) -> Result<Self, RegionError> {
        let t = s.trim();
        let exact = match t.split_once('/') {
            Some((a, b)) => {
                let den = parse_decimal(b).ok_or_else(|| RegionError::Parse(s.to_string()))?;
                if den.is_zero() {
                    return Err(RegionError::Parse(s.to_string()));
                }
                parse_decimal(a).ok_or_else(|| RegionError::Parse(s.to_string()))? / den
            }
            None => parse_decimal(t).ok_or_else(|| RegionError::Parse(s.to_string()))?,
        };
        let approx = exact.approx();
        Ok(Self { exact, approx })
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut value = BigRational::from_integer(BigInt::parse_bytes(digits.as_bytes(), 10)?);
    let shift = exp - frac_part.len() as i64;
    let ten = BigRational::from_u32(10)?;
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Some(if neg { -value } else { value })
}

/// Runs a generic predicate on doubles, falling back to rationals on near-ties.
macro_rules! decide {
    ($point:expr, |$j:ident, $v:ident| $body:expr) => {{
        let filter = $crate::regions::exact::Filter::default();
        let out = {
            let $j = &filter;
            let $v = &$point.approx;
            $body
        };
        if filter.undecided() {
            let $j = &$crate::regions::exact::Exact;
            let $v = &$point.exact;
            $body
        } else {
            out
        }
    }};
}
pub(crate) use decide;
