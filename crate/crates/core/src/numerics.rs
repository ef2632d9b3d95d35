//! Configurable-precision scalars, certified enclosures, logarithmic
//! factorials and deterministic compensated summation.
//!
//! [`Real`] carries its own precision. At 53 bits it is backed by a native
//! `f64` (the fast mode used for long sweeps); at any other precision it is
//! an MPFR float. Rounding errors of transcendental functions are not
//! tracked by the type itself: callers accumulate an explicit error budget
//! and widen the final result with [`widen_outward`] or
//! [`Enclosure::inflate`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rayon::prelude::*;
use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Default working precision for table reproduction.
pub const DEFAULT_BITS: u32 = 192;
/// Native double precision; selects the `f64` backend.
pub const FAST_BITS: u32 = 53;
/// Largest precision accepted by [`PrecisionConfig::new`].
pub const MAX_BITS: u32 = 1 << 16;
/// Largest argument accepted by [`ln_factorial`].
pub const LN_FACTORIAL_MAX: i64 = 1_000_000;

/// How accumulated rounding errors are turned into an outward widening.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WideningPolicy {
    /// Every evaluated term contributes its own relative error bound.
    #[default]
    PerOpUlp,
    /// A single budget `count × max_rel_err × magnitude` applied at the end.
    EndOfChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionConfig {
    bits: u32,
    widening: WideningPolicy,
}

impl PrecisionConfig {
    pub fn new(bits: u32) -> Result<Self> {
        if !(FAST_BITS..=MAX_BITS).contains(&bits) {
            return Err(Error::domain(
                "precision",
                format!("precision must be in {FAST_BITS}..={MAX_BITS} bits, got {bits}"),
            ));
        }
        Ok(Self {
            bits,
            widening: WideningPolicy::default(),
        })
    }

    /// 192-bit configuration used for table reproduction.
    pub fn standard() -> Self {
        Self {
            bits: DEFAULT_BITS,
            widening: WideningPolicy::default(),
        }
    }

    /// 53-bit configuration backed by native doubles.
    pub fn fast() -> Self {
        Self {
            bits: FAST_BITS,
            widening: WideningPolicy::default(),
        }
    }

    pub fn with_widening(mut self, widening: WideningPolicy) -> Self {
        self.widening = widening;
        self
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn widening(&self) -> WideningPolicy {
        self.widening
    }

    pub fn is_fast(&self) -> bool {
        self.bits == FAST_BITS
    }

    /// Same policy, `extra` more bits. Always lands on the MPFR backend.
    pub fn guarded(&self, extra: u32) -> Self {
        Self {
            bits: (self.bits + extra).min(MAX_BITS),
            widening: self.widening,
        }
    }

    /// Per-operation relative error bound `2^(1-p)`.
    ///
    /// One ulp rather than half an ulp so that the `f64` backend, whose
    /// `ln`/`exp` are faithfully but not correctly rounded, is covered.
    pub fn unit_roundoff(&self) -> f64 {
        unit_roundoff(self.bits)
    }

    /// Significant decimal digits that make a binary value round-trip.
    pub fn decimal_digits(&self) -> usize {
        decimal_digits(self.bits)
    }
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self::standard()
    }
}

pub(crate) fn unit_roundoff(bits: u32) -> f64 {
    2f64.powi(1 - bits as i32)
}

/// `⌈p·log₁₀2⌉ + 2` significant digits.
pub fn decimal_digits(bits: u32) -> usize {
    (f64::from(bits) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

/// Rounding direction for the directed arithmetic helpers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

impl Dir {
    fn round(self) -> Round {
        match self {
            Dir::Down => Round::Down,
            Dir::Up => Round::Up,
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Fast(f64),
    Multi(Float),
}

/// Real scalar at a fixed binary precision.
#[derive(Clone, Debug)]
pub struct Real(Repr);

impl Real {
    pub fn from_f64(value: f64, bits: u32) -> Real {
        if bits == FAST_BITS {
            Real(Repr::Fast(value))
        } else {
            Real(Repr::Multi(Float::with_val(bits, value)))
        }
    }

    pub fn from_i64(value: i64, bits: u32) -> Real {
        if bits == FAST_BITS {
            Real(Repr::Fast(value as f64))
        } else {
            Real(Repr::Multi(Float::with_val(bits, value)))
        }
    }

    pub fn from_u64(value: u64, bits: u32) -> Real {
        if bits == FAST_BITS {
            Real(Repr::Fast(value as f64))
        } else {
            Real(Repr::Multi(Float::with_val(bits, value)))
        }
    }

    /// `num / den` correctly rounded.
    pub fn ratio(num: i64, den: i64, bits: u32) -> Real {
        Real::from_i64(num, bits.max(64))
            .div(&Real::from_i64(den, bits.max(64)))
            .with_bits(bits)
    }

    pub fn zero(bits: u32) -> Real {
        Real::from_f64(0.0, bits)
    }

    pub fn one(bits: u32) -> Real {
        Real::from_f64(1.0, bits)
    }

    pub fn pi(bits: u32) -> Real {
        if bits == FAST_BITS {
            Real(Repr::Fast(std::f64::consts::PI))
        } else {
            Real(Repr::Multi(Float::with_val(bits, Constant::Pi)))
        }
    }

    /// Euler's number `e`.
    pub fn e(bits: u32) -> Real {
        Real::one(bits).exp()
    }

    /// Parses a decimal literal (`0.25`, `-1.5e-7`, ...) at `bits` precision.
    pub fn parse(text: &str, bits: u32) -> Result<Real> {
        let trimmed = text.trim();
        let bad = || Error::domain("parse", format!("not a decimal number: {trimmed:?}"));
        let value = if bits == FAST_BITS {
            Real(Repr::Fast(trimmed.parse::<f64>().map_err(|_| bad())?))
        } else {
            let parsed = Float::parse(trimmed).map_err(|_| bad())?;
            Real(Repr::Multi(Float::with_val(bits, parsed)))
        };
        value.finite("parse")
    }

    pub fn bits(&self) -> u32 {
        match &self.0 {
            Repr::Fast(_) => FAST_BITS,
            Repr::Multi(f) => f.prec(),
        }
    }

    /// Rounds (or exactly extends) to a different precision.
    pub fn with_bits(&self, bits: u32) -> Real {
        match (&self.0, bits == FAST_BITS) {
            (Repr::Fast(v), true) => Real(Repr::Fast(*v)),
            (Repr::Fast(v), false) => Real(Repr::Multi(Float::with_val(bits, *v))),
            (Repr::Multi(f), true) => Real(Repr::Fast(f.to_f64())),
            (Repr::Multi(f), false) => Real(Repr::Multi(Float::with_val(bits, f))),
        }
    }

    /// Same precision as `self`, holding `value`.
    pub fn lit(&self, value: f64) -> Real {
        Real::from_f64(value, self.bits())
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Fast(v) => *v,
            Repr::Multi(f) => f.to_f64(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.0 {
            Repr::Fast(v) => v.is_finite(),
            Repr::Multi(f) => f.is_finite(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Fast(v) => *v == 0.0,
            Repr::Multi(f) => f.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Fast(v) => *v < 0.0,
            Repr::Multi(f) => f.is_sign_negative() && !f.is_zero(),
        }
    }

    /// Converts NaN or infinities into a range error.
    pub fn finite(self, op: &'static str) -> Result<Real> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::range(op, "non-finite intermediate"))
        }
    }

    fn unary(&self, fast: impl FnOnce(f64) -> f64, multi: impl FnOnce(Float) -> Float) -> Real {
        match &self.0 {
            Repr::Fast(v) => Real(Repr::Fast(fast(*v))),
            Repr::Multi(f) => Real(Repr::Multi(multi(f.clone()))),
        }
    }

    pub fn ln(&self) -> Real {
        self.unary(f64::ln, Float::ln)
    }

    /// `ln(1 + self)`.
    pub fn ln_1p(&self) -> Real {
        self.unary(f64::ln_1p, Float::ln_1p)
    }

    pub fn exp(&self) -> Real {
        self.unary(f64::exp, Float::exp)
    }

    pub fn sqrt(&self) -> Real {
        self.unary(f64::sqrt, Float::sqrt)
    }

    pub fn recip(&self) -> Real {
        self.unary(f64::recip, Float::recip)
    }

    pub fn abs(&self) -> Real {
        self.unary(f64::abs, Float::abs)
    }

    pub fn square(&self) -> Real {
        self.unary(|v| v * v, Float::square)
    }

    pub fn floor(&self) -> Real {
        self.unary(f64::floor, Float::floor)
    }

    pub fn ceil(&self) -> Real {
        self.unary(f64::ceil, Float::ceil)
    }

    /// `self^exp` for a small integer exponent.
    pub fn powi(&self, exp: i32) -> Real {
        self.unary(|v| v.powi(exp), |f| f.pow(exp))
    }

    /// Integer part as `i64`, `None` when not finite or out of range.
    pub fn to_i64_floor(&self) -> Option<i64> {
        if !self.is_finite() {
            return None;
        }
        let v = self.floor().to_f64();
        if v.abs() < 9.0e15 {
            Some(v as i64)
        } else {
            None
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Fast(v) => v.fract() == 0.0,
            Repr::Multi(f) => f.is_integer(),
        }
    }

    pub fn next_up(&self) -> Real {
        self.unary(f64::next_up, |mut f| {
            f.next_up();
            f
        })
    }

    pub fn next_down(&self) -> Real {
        self.unary(f64::next_down, |mut f| {
            f.next_down();
            f
        })
    }

    pub fn max(&self, other: &Real) -> Real {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    fn promote(&self, bits: u32) -> Float {
        match &self.0 {
            Repr::Fast(v) => Float::with_val(bits, *v),
            Repr::Multi(f) => Float::with_val(bits.max(f.prec()), f),
        }
    }

    fn binary(
        &self,
        rhs: &Real,
        fast: impl FnOnce(f64, f64) -> f64,
        multi: impl FnOnce(&Float, &Float, u32) -> Float,
    ) -> Real {
        match (&self.0, &rhs.0) {
            (Repr::Fast(a), Repr::Fast(b)) => Real(Repr::Fast(fast(*a, *b))),
            (Repr::Multi(a), Repr::Multi(b)) => {
                Real(Repr::Multi(multi(a, b, a.prec().max(b.prec()))))
            }
            _ => {
                let bits = self.bits().max(rhs.bits());
                let a = self.promote(bits);
                let b = rhs.promote(bits);
                Real(Repr::Multi(multi(&a, &b, bits)))
            }
        }
    }

    /// Sum rounded in direction `dir`.
    pub fn add_dir(&self, rhs: &Real, dir: Dir) -> Real {
        self.binary(
            rhs,
            |a, b| {
                let (s, e) = two_sum(a, b);
                bump(s, e, dir)
            },
            |a, b, p| Float::with_val_round(p, a + b, dir.round()).0,
        )
    }

    pub fn sub_dir(&self, rhs: &Real, dir: Dir) -> Real {
        self.add_dir(&-rhs, dir)
    }

    pub fn mul_dir(&self, rhs: &Real, dir: Dir) -> Real {
        self.binary(
            rhs,
            |a, b| {
                let p = a * b;
                bump(p, a.mul_add(b, -p), dir)
            },
            |a, b, p| Float::with_val_round(p, a * b, dir.round()).0,
        )
    }

    pub fn div_dir(&self, rhs: &Real, dir: Dir) -> Real {
        self.binary(
            rhs,
            |a, b| {
                let q = a / b;
                // a - q·b is exact; its sign relative to b tells which side q is on.
                let r = (-q).mul_add(b, a);
                let err = if (r < 0.0) == (b < 0.0) {
                    r.abs()
                } else {
                    -r.abs()
                };
                bump(q, err, dir)
            },
            |a, b, p| Float::with_val_round(p, a / b, dir.round()).0,
        )
    }

    /// Scientific decimal string with `digits` significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        match &self.0 {
            Repr::Fast(v) => format!("{:.*e}", digits - 1, v),
            Repr::Multi(f) => {
                // rug prints "d.ddde-N"; normalise "e" casing to match std.
                f.to_string_radix(10, Some(digits)).replace('E', "e")
            }
        }
    }

    /// Round-trip decimal serialization at this value's own precision.
    pub fn to_exact_string(&self) -> String {
        self.to_sci_string(decimal_digits(self.bits()))
    }

    /// Positional decimal string with `digits` significant digits.
    pub fn to_fixed_string(&self, digits: usize) -> String {
        sci_to_fixed(&self.to_sci_string(digits))
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Moves `v` one ulp in `dir` when the exact result lies on that side.
fn bump(v: f64, err: f64, dir: Dir) -> f64 {
    match dir {
        Dir::Down if err < 0.0 => v.next_down(),
        Dir::Up if err > 0.0 => v.next_up(),
        _ => v,
    }
}

fn sci_to_fixed(sci: &str) -> String {
    let Some((mantissa, exponent)) = sci.split_once('e') else {
        return sci.to_string();
    };
    let Ok(exponent) = exponent.parse::<i64>() else {
        return sci.to_string();
    };
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    if !(-40..=40).contains(&exponent) {
        return sci.to_string();
    }
    let point = exponent + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(digits) => f.write_str(&self.to_sci_string(digits)),
            None => f.write_str(&self.to_exact_string()),
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        match (&self.0, &other.0) {
            (Repr::Fast(a), Repr::Fast(b)) => a.partial_cmp(b),
            (Repr::Multi(a), Repr::Multi(b)) => a.partial_cmp(b),
            (Repr::Fast(a), Repr::Multi(b)) => a.partial_cmp(b),
            (Repr::Multi(a), Repr::Fast(b)) => a.partial_cmp(b),
        }
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        match &self.0 {
            Repr::Fast(a) => a.partial_cmp(other),
            Repr::Multi(a) => a.partial_cmp(other),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $fast:expr, $multi:expr) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                self.binary(rhs, $fast, $multi)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a + b, |a, b, p| Float::with_val(p, a + b));
forward_binop!(Sub, sub, |a, b| a - b, |a, b, p| Float::with_val(p, a - b));
forward_binop!(Mul, mul, |a, b| a * b, |a, b, p| Float::with_val(p, a * b));
forward_binop!(Div, div, |a, b| a / b, |a, b, p| Float::with_val(p, a / b));

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        self.unary(|v| -v, |f| -f)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

/// Closed interval `[lo, hi]` certified to contain some exact quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    lo: Real,
    hi: Real,
}

impl Enclosure {
    pub fn new(lo: Real, hi: Real) -> Result<Enclosure> {
        let lo = lo.finite("enclosure")?;
        let hi = hi.finite("enclosure")?;
        if lo > hi {
            return Err(Error::domain(
                "enclosure",
                format!("lower end {lo} exceeds upper end {hi}"),
            ));
        }
        Ok(Enclosure { lo, hi })
    }

    pub fn point(x: Real) -> Result<Enclosure> {
        Enclosure::new(x.clone(), x)
    }

    pub fn lo(&self) -> &Real {
        &self.lo
    }

    pub fn hi(&self) -> &Real {
        &self.hi
    }

    /// `hi - lo`, rounded up.
    pub fn width(&self) -> Real {
        self.hi.sub_dir(&self.lo, Dir::Up)
    }

    pub fn midpoint(&self) -> Real {
        let sum = &self.lo + &self.hi;
        &sum / &sum.lit(2.0)
    }

    pub fn contains(&self, x: &Real) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn strictly_below(&self, other: &Enclosure) -> bool {
        self.hi < other.lo
    }

    /// Outward widening by a non-negative absolute error bound.
    pub fn inflate(&self, budget: f64) -> Enclosure {
        if budget <= 0.0 {
            return self.clone();
        }
        let b = self.lo.lit(budget);
        Enclosure {
            lo: self.lo.sub_dir(&b, Dir::Down),
            hi: self.hi.add_dir(&b, Dir::Up),
        }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.add_dir(&other.lo, Dir::Down),
            hi: self.hi.add_dir(&other.hi, Dir::Up),
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.sub_dir(&other.hi, Dir::Down),
            hi: self.hi.sub_dir(&other.lo, Dir::Up),
        }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn with_bits(&self, bits: u32) -> Enclosure {
        Enclosure {
            lo: self.lo.with_bits(bits).next_down(),
            hi: self.hi.with_bits(bits).next_up(),
        }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => write!(f, "[{:.*}, {:.*}]", d, self.lo, d, self.hi),
            None => write!(f, "[{}, {}]", self.lo, self.hi),
        }
    }
}

/// `[x - budget, x + budget]`, rounded outward.
pub fn widen_outward(x: &Real, error_budget: &Real) -> Result<Enclosure> {
    if !error_budget.is_finite() || error_budget.is_negative() {
        return Err(Error::domain(
            "widen_outward",
            format!("error budget must be finite and non-negative, got {error_budget}"),
        ));
    }
    Enclosure::new(
        x.sub_dir(error_budget, Dir::Down),
        x.add_dir(error_budget, Dir::Up),
    )
}

/// `ln(n!)` by direct summation of `ln i`, `i = 2..=n`.
pub fn ln_factorial(n: i64, cfg: &PrecisionConfig) -> Result<Real> {
    if !(0..=LN_FACTORIAL_MAX).contains(&n) {
        return Err(Error::domain(
            "ln_factorial",
            format!("n must be in 0..={LN_FACTORIAL_MAX}, got {n}"),
        ));
    }
    let bits = cfg.bits();
    let mut acc = CompensatedSum::new(bits);
    for i in 2..=n {
        acc.add(&Real::from_i64(i, bits).ln());
    }
    acc.value().finite("ln_factorial")
}

/// Cumulative `ln(n!)` for `n = 0..=n_max`, shared by sweeps over many `n`.
#[derive(Clone, Debug)]
pub struct LnFactorialTable {
    values: Vec<Real>,
}

impl LnFactorialTable {
    pub fn new(n_max: u64, cfg: &PrecisionConfig) -> Result<Self> {
        if n_max > LN_FACTORIAL_MAX as u64 {
            return Err(Error::domain(
                "ln_factorial",
                format!("n must be at most {LN_FACTORIAL_MAX}, got {n_max}"),
            ));
        }
        let bits = cfg.bits();
        let mut acc = CompensatedSum::new(bits);
        let mut values = Vec::with_capacity(n_max as usize + 1);
        values.push(Real::zero(bits));
        for i in 1..=n_max {
            if i >= 2 {
                acc.add(&Real::from_u64(i, bits).ln());
            }
            values.push(acc.value());
        }
        Ok(Self { values })
    }

    pub fn get(&self, n: u64) -> Option<&Real> {
        self.values.get(n as usize)
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }
}

/// Neumaier's compensated accumulator.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: Real,
    compensation: Real,
    abs_total: f64,
    count: u64,
}

impl CompensatedSum {
    pub fn new(bits: u32) -> Self {
        Self {
            sum: Real::zero(bits),
            compensation: Real::zero(bits),
            abs_total: 0.0,
            count: 0,
        }
    }

    pub fn add(&mut self, x: &Real) {
        let t = &self.sum + x;
        let c = if self.sum.abs() >= x.abs() {
            (&self.sum - &t) + x
        } else {
            (x - &t) + &self.sum
        };
        self.compensation = &self.compensation + &c;
        self.sum = t;
        self.abs_total += x.to_f64().abs();
        self.count += 1;
    }

    /// Appends another accumulator's terms after this one's.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(&other.sum);
        self.compensation = &self.compensation + &other.compensation;
        self.abs_total += other.abs_total - other.sum.to_f64().abs();
        self.count += other.count - 1;
    }

    pub fn value(&self) -> Real {
        &self.sum + &self.compensation
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Bound on `|value() - exact sum|`: `2u|S| + 2n·u²·Σ|t|`.
    pub fn error_bound(&self) -> f64 {
        let u = unit_roundoff(self.sum.bits());
        let s = self.value().to_f64().abs();
        (2.0 * u * s + 2.0 * (self.count as f64 + 2.0) * u * u * self.abs_total) * 1.01
    }
}

/// Compensated sum of `terms` in the given order.
pub fn compensated_sum(terms: &[Real]) -> Result<Real> {
    let bits = terms.iter().map(Real::bits).max().unwrap_or(FAST_BITS);
    let mut acc = CompensatedSum::new(bits);
    for t in terms {
        if !t.is_finite() {
            return Err(Error::range("compensated_sum", "non-finite term"));
        }
        acc.add(t);
    }
    acc.value().finite("compensated_sum")
}

/// Chunk length used by [`chunked_sum`]; fixed so results never depend on
/// the thread count.
pub const SUM_CHUNK: u64 = 1 << 12;

/// Sums `term(i)` for `i in range` in parallel chunks, combining chunk
/// accumulators in ascending order. Each term also reports an absolute
/// error bound which is accumulated alongside.
pub fn chunked_sum<F>(
    range: std::ops::Range<u64>,
    bits: u32,
    term: F,
) -> Result<(CompensatedSum, f64)>
where
    F: Fn(u64) -> Result<(Real, f64)> + Sync,
{
    let start = range.start;
    let len = range.end.saturating_sub(start);
    let chunks = len.div_ceil(SUM_CHUNK);
    let partials: Vec<Result<(CompensatedSum, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = start + c * SUM_CHUNK;
            let hi = (lo + SUM_CHUNK).min(range.end);
            let mut acc = CompensatedSum::new(bits);
            let mut err = 0.0;
            for i in lo..hi {
                let (v, e) = term(i)?;
                if !v.is_finite() {
                    return Err(Error::range(
                        "chunked_sum",
                        format!("non-finite term at {i}"),
                    ));
                }
                acc.add(&v);
                err += e;
            }
            Ok((acc, err))
        })
        .collect();
    let mut total = CompensatedSum::new(bits);
    let mut err = 0.0;
    for part in partials {
        let (acc, e) = part?;
        if acc.count() > 0 {
            total.merge(&acc);
        }
        err += e;
    }
    Ok((total, err))
}
