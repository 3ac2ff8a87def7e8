//! Exact rationals with an `i64` fast path and a `BigRational` fallback.
//!
//! Values are kept canonical: a number that fits in `i64/i64` is always stored
//! in the small representation, so structural equality and hashing agree with
//! numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
enum Repr {
    /// Reduced, denominator > 0.
    Small(i64, i64),
    /// Reduced, does not fit in `Small`.
    Big(BigRational),
}

/// An exact rational number.
#[derive(Clone)]
pub struct Rational(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// `n / d`; panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_i128(n as i128, d as i128)
    }

    fn from_i128(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
        let g = gcd_u128(n.unsigned_abs(), d as u128);
        if g > 1 {
            n /= g as i128;
            d /= g as i128;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Rational(Repr::Small(a, b)),
            _ => Rational(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    pub fn from_big(r: BigRational) -> Self {
        // BigRational keeps itself reduced with a positive denominator.
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(a), Some(b)) => Rational(Repr::Small(a, b)),
            _ => Rational(Repr::Big(r)),
        }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    pub fn from_ratio(n: BigInt, d: BigInt) -> Self {
        Self::from_big(BigRational::new(n, d))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(r) => match r.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(r) => Self::from_big(r.recip()),
        }
    }

    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(Integer::div_floor(n, d)),
            Repr::Big(r) => r.floor().to_integer(),
        }
    }

    pub fn ceil(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(-Integer::div_floor(&-n, d)),
            Repr::Big(r) => r.ceil().to_integer(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => big_to_f64(r),
        }
    }

    /// `self * 2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        let p = BigInt::one() << k.unsigned_abs();
        if k >= 0 {
            Self::from_ratio(self.numer() * p, self.denom())
        } else {
            Self::from_ratio(self.numer(), self.denom() * p)
        }
    }

    /// `2^k` for an integer `k` (negative allowed).
    pub fn pow2(k: i64) -> Self {
        Self::one().mul_pow2(k)
    }

    /// `self^e` for integer `e`.
    pub fn powi(&self, e: i32) -> Self {
        let r = num_traits::pow(self.to_big(), e.unsigned_abs() as usize);
        let r = Self::from_big(r);
        if e < 0 {
            r.recip()
        } else {
            r
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `Some(k)` when the value is exactly `2^k`.
    pub fn exact_log2(&self) -> Option<i64> {
        if !self.is_positive() {
            return None;
        }
        let n = self.numer();
        let d = self.denom();
        let is_pow2 = |x: &BigInt| x.is_positive() && (x & (x - 1u32)).is_zero();
        if n.is_one() && is_pow2(&d) {
            Some(-(d.bits() as i64 - 1))
        } else if d.is_one() && is_pow2(&n) {
            Some(n.bits() as i64 - 1)
        } else {
            None
        }
    }

    /// A dyadic approximation of `log2(self)` with absolute error below
    /// `2^-bits`, rounded toward negative infinity.
    ///
    /// Shift-consistent: `log2_approx(x * 2^k) == log2_approx(x) + k`, and exact
    /// on powers of two.
    pub fn log2_approx(&self, bits: u32) -> Self {
        assert!(self.is_positive(), "log2 of a non-positive number");
        let n = self.numer().magnitude().clone();
        let d = self.denom().magnitude().clone();
        // r = 2^k * m with m in [1, 2).
        let mut k = n.bits() as i64 - d.bits() as i64;
        let (num, den) = if k >= 0 { (n, d << k as u64) } else { (n << (-k) as u64, d) };
        let (num, den) = if num < den {
            k -= 1;
            (num << 1u32, den)
        } else {
            (num, den)
        };
        let frac = log2_mantissa(&num, &den, bits);
        Self::from_int(k) + frac
    }

    /// `floor(2^self)` computed from below with enough precision that the
    /// result is exact whenever `2^self` is an integer, and otherwise may fall
    /// short by at most one.
    pub fn pow2_floor(&self) -> BigInt {
        let k = self.floor();
        let f = self - &Self::from_bigint(k.clone());
        let k = k.to_i64().expect("exponent out of range");
        if k < 0 {
            return BigInt::zero();
        }
        if f.is_zero() {
            return BigInt::one() << k as u64;
        }
        // Fixed-point 2^f with `prec` fractional bits, truncating downward.
        let prec: u64 = 96 + k as u64;
        let one = BigUint::one() << prec;
        let mut acc = one.clone();
        let mut root = &one << 1u32; // 2^(2^-i), starting at i = 0
        let fb = f.to_big();
        let mut rem = fb;
        let two = BigRational::from_integer(BigInt::from(2));
        for _ in 0..prec {
            root = (&root << prec).sqrt();
            rem = rem * &two;
            if rem >= BigRational::one() {
                rem -= BigRational::one();
                acc = (&acc * &root) >> prec;
            }
            if rem.is_zero() {
                break;
            }
        }
        let v = (acc << k as u64) >> prec;
        BigInt::from(v)
    }

    /// Decimal rendering with `digits` digits after the point (truncated).
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let neg = self.is_negative();
        let a = self.abs();
        let scaled = (a.numer() * &scale) / a.denom();
        let int_part = &scaled / &scale;
        let frac_part = &scaled % &scale;
        let mut s = String::new();
        if neg && !scaled.is_zero() {
            s.push('-');
        }
        s.push_str(&int_part.to_string());
        if digits > 0 {
            s.push('.');
            s.push_str(&format!("{:0>width$}", frac_part.to_string(), width = digits as usize));
        }
        s
    }
}

/// `log2(num/den)` for `num/den` in `[1, 2)`, as a dyadic rational with
/// `bits` fractional bits, truncated.
fn log2_mantissa(num: &BigUint, den: &BigUint, bits: u32) -> Rational {
    let guard: u64 = bits as u64 + 64;
    let two = BigUint::one() << (guard + 1);
    let mut m = (num << guard) / den;
    let mut out = BigUint::zero();
    for _ in 0..bits {
        m = (&m * &m) >> guard;
        out <<= 1u32;
        if m >= two {
            m >>= 1u32;
            out |= BigUint::one();
        }
    }
    Rational::from_ratio(BigInt::from(out), BigInt::one() << bits as u64)
}

fn big_to_f64(r: &BigRational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    let shift = (n.bits() as i64 - d.bits() as i64) - 60;
    let q = if shift >= 0 {
        n / (d << shift as u64)
    } else {
        (n << (-shift) as u64) / d
    };
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Self::from_int(n as i64)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Self::from_bigint(BigInt::from(n))
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Self::from_bigint(BigInt::from(n))
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Self::from_bigint(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self::from_big(r)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_ref(x: &Rational, y: &Rational) -> Rational {
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&x.0, &y.0) {
        if *b == 1 && *d == 1 {
            if let Some(s) = a.checked_add(*c) {
                return Rational(Repr::Small(s, 1));
            }
        }
        let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
        if let (Some(ad), Some(cb), Some(bd)) = (a.checked_mul(d), c.checked_mul(b), b.checked_mul(d)) {
            if let Some(n) = ad.checked_add(cb) {
                return Rational::from_i128(n, bd);
            }
        }
    }
    Rational::from_big(x.to_big() + y.to_big())
}

fn mul_ref(x: &Rational, y: &Rational) -> Rational {
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&x.0, &y.0) {
        let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
        if let (Some(n), Some(m)) = (a.checked_mul(c), b.checked_mul(d)) {
            return Rational::from_i128(n, m);
        }
    }
    Rational::from_big(x.to_big() * y.to_big())
}

fn neg_ref(x: &Rational) -> Rational {
    match &x.0 {
        Repr::Small(n, d) => match n.checked_neg() {
            Some(m) => Rational(Repr::Small(m, *d)),
            None => Rational::from_big(-x.to_big()),
        },
        Repr::Big(r) => Rational::from_big(-r.clone()),
    }
}

fn div_ref(x: &Rational, y: &Rational) -> Rational {
    assert!(!y.is_zero(), "division by zero");
    mul_ref(x, &y.recip())
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident, $atr:ident, $am:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                $f(self, rhs)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                $f(&self, &rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                $f(&self, rhs)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                $f(self, &rhs)
            }
        }
        impl $atr<&Rational> for Rational {
            fn $am(&mut self, rhs: &Rational) {
                *self = $f(self, rhs);
            }
        }
        impl $atr<Rational> for Rational {
            fn $am(&mut self, rhs: Rational) {
                *self = $f(self, &rhs);
            }
        }
    };
}

fn sub_ref(x: &Rational, y: &Rational) -> Rational {
    add_ref(x, &neg_ref(y))
}

binop!(Add, add, add_ref, AddAssign, add_assign);
binop!(Sub, sub, sub_ref, SubAssign, sub_assign);
binop!(Mul, mul, mul_ref, MulAssign, mul_assign);
binop!(Div, div, div_ref, DivAssign, div_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(self)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |a, b| a * b)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `7`, `-3/4`, `+2`, and decimals such as `0.125`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let t = t.strip_prefix('+').unwrap_or(t);
        if t.is_empty() {
            return Err(err());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Rational::from_ratio(n, d));
        }
        if let Some((i, f)) = t.split_once('.') {
            if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
                return Err(err());
            }
            let neg = i.starts_with('-');
            let i_abs = i.trim_start_matches('-');
            let i_abs = if i_abs.is_empty() { "0" } else { i_abs };
            let ip: BigInt = i_abs.parse().map_err(|_| err())?;
            let fp: BigInt = f.parse().map_err(|_| err())?;
            let scale = BigInt::from(10u32).pow(f.len() as u32);
            let v = Rational::from_ratio(ip * &scale + fp, scale);
            return Ok(if neg { -v } else { v });
        }
        let n: BigInt = t.parse().map_err(|_| err())?;
        Ok(Rational::from_bigint(n))
    }
}

/// Shorthand for `Rational::new(n, d)`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Shorthand for an integer rational.
pub fn int(n: i64) -> Rational {
    Rational::from_int(n)
}
