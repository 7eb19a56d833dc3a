//! Coefficient fields.
//!
//! [`ExactScalar`] is an element `a + b√2` of ℚ(√2) with arbitrary precision
//! rational parts. The [`Scalar`] trait abstracts over the exact field, plain
//! `f64`, and [`crate::chart::Jet`] so that the fiber algebra is written once.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Numbers `rat + sqrt2·√2` with both parts in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    rat: BigRational,
    sqrt2: BigRational,
}

/// The operations accepted by [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Conj,
}

/// Applies `op` to `a` (and `b` for binary operations). Unary operations ignore `b`.
pub fn field_arith(a: &ExactScalar, b: &ExactScalar, op: FieldOp) -> Result<ExactScalar, ScalarError> {
    Ok(match op {
        FieldOp::Add => a + b,
        FieldOp::Sub => a - b,
        FieldOp::Mul => a * b,
        FieldOp::Div => a.checked_div(b)?,
        FieldOp::Neg => -a,
        FieldOp::Conj => a.conj(),
    })
}

impl ExactScalar {
    pub fn new(rat: BigRational, sqrt2: BigRational) -> Self {
        // BigRational keeps itself reduced with a positive denominator.
        ExactScalar { rat, sqrt2 }
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        ExactScalar::new(BigRational::new(p.into(), q.into()), BigRational::zero())
    }

    pub fn from_parts(p: i64, q: i64, r: i64, s: i64) -> Self {
        ExactScalar::new(
            BigRational::new(p.into(), q.into()),
            BigRational::new(r.into(), s.into()),
        )
    }

    pub fn from_integer(n: i64) -> Self {
        ExactScalar::from_ratio(n, 1)
    }

    pub fn sqrt2() -> Self {
        ExactScalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn rat_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.sqrt2
    }

    pub fn is_rational(&self) -> bool {
        self.sqrt2.is_zero()
    }

    pub fn conj(&self) -> Self {
        ExactScalar::new(self.rat.clone(), -self.sqrt2.clone())
    }

    /// `a·conj(a) = rat² − 2·sqrt2²`.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat - BigRational::from_integer(2.into()) * &self.sqrt2 * &self.sqrt2
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        let n = other.norm();
        if n.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let num = self * &other.conj();
        Ok(ExactScalar::new(num.rat / &n, num.sqrt2 / n))
    }

    /// Sign of the real embedding.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.rat);
        let sb = sign_of(&self.sqrt2);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let two = BigRational::from_integer(2.into());
        match (&self.rat * &self.rat).cmp(&(two * &self.sqrt2 * &self.sqrt2)) {
            Ordering::Greater => sa,
            _ => sb,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.sqrt2.is_zero() {
            return a;
        }
        let b = self.sqrt2.to_f64().unwrap_or(f64::NAN);
        if a == 0.0 {
            return b * std::f64::consts::SQRT_2;
        }
        b.mul_add(std::f64::consts::SQRT_2, a)
    }

    /// Square root inside ℚ(√2), choosing the root with positive embedding.
    pub fn try_sqrt(&self) -> Option<Self> {
        if self.signum() < 0 {
            return None;
        }
        if self.is_zero_exact() {
            return Some(self.clone());
        }
        // (x + y√2)² = a + b√2  ⇔  x² + 2y² = a, 2xy = b.
        // x² and 2y² are the roots of t² − a t + b²/2.
        let a = &self.rat;
        let b = &self.sqrt2;
        let two = BigRational::from_integer(2.into());
        let d = rational_sqrt(&(a * a - &two * b * b))?;
        for t in [(a + &d) / &two, (a - &d) / &two] {
            let Some(x) = rational_sqrt(&t) else { continue };
            let cand = if x.is_zero() {
                let Some(y) = rational_sqrt(&(a / &two)) else { continue };
                ExactScalar::new(x, y)
            } else {
                let y = b / (&two * &x);
                ExactScalar::new(x, y)
            };
            if &cand * &cand == *self {
                return Some(if cand.signum() < 0 { -cand } else { cand });
            }
        }
        None
    }

    /// Real cube root inside ℚ(√2), when one exists with small height.
    pub fn try_cbrt(&self) -> Option<Self> {
        if self.is_zero_exact() {
            return Some(self.clone());
        }
        if self.is_rational() {
            return rational_cbrt(&self.rat).map(|r| ExactScalar::new(r, BigRational::zero()));
        }
        // Guess from the two real embeddings, then confirm exactly.
        let r1 = self.to_f64().cbrt();
        let r2 = self.conj().to_f64().cbrt();
        let x = best_rational((r1 + r2) / 2.0, 1 << 20)?;
        let y = best_rational((r1 - r2) / (2.0 * std::f64::consts::SQRT_2), 1 << 20)?;
        let cand = ExactScalar::new(x, y);
        if &(&cand * &cand) * &cand == *self {
            Some(cand)
        } else {
            None
        }
    }

    fn is_zero_exact(&self) -> bool {
        self.rat.is_zero() && self.sqrt2.is_zero()
    }
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &n * &n == *r.numer() && &d * &d == *r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn rational_cbrt(r: &BigRational) -> Option<BigRational> {
    let neg = r.is_negative();
    let num = r.numer().abs();
    let n = num.cbrt();
    let d = r.denom().cbrt();
    if &n * &n * &n == num && &d * &d * &d == *r.denom() {
        let q = BigRational::new(n, d);
        Some(if neg { -q } else { q })
    } else {
        None
    }
}

/// Continued-fraction approximation with bounded denominator.
fn best_rational(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sqrt2.is_zero() {
            return write!(f, "{}", self.rat);
        }
        if self.rat.is_zero() {
            return write!(f, "{}*sqrt2", self.sqrt2);
        }
        if self.sqrt2.is_negative() {
            write!(f, "{}-{}*sqrt2", self.rat, -self.sqrt2.clone())
        } else {
            write!(f, "{}+{}*sqrt2", self.rat, self.sqrt2)
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactScalar {
    type Err = ScalarError;

    /// Accepts sums of terms `p`, `p/q`, `sqrt2`, `p*sqrt2`, `p/q*sqrt2`,
    /// with any whitespace.
    fn from_str(input: &str) -> Result<Self, ScalarError> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: &str| ScalarError::Parse { input: input.to_string(), reason: reason.to_string() };
        if s.is_empty() {
            return Err(err("empty"));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'*' && bytes[i - 1] != b'/' {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut acc = ExactScalar::zero();
        for t in terms {
            let (neg, body) = match t.as_bytes().first() {
                Some(b'-') => (true, &t[1..]),
                Some(b'+') => (false, &t[1..]),
                _ => (false, t),
            };
            if body.is_empty() {
                return Err(err("dangling sign"));
            }
            let (coef, irr) = if body == "sqrt2" {
                ("1", true)
            } else if let Some(c) = body.strip_suffix("*sqrt2") {
                (c, true)
            } else {
                (body, false)
            };
            let q = parse_rational(coef).ok_or_else(|| err("bad rational"))?;
            let q = if neg { -q } else { q };
            let term = if irr {
                ExactScalar::new(BigRational::zero(), q)
            } else {
                ExactScalar::new(q, BigRational::zero())
            };
            acc = acc + term;
        }
        Ok(acc)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let mut sign = BigInt::one();
    let mut body = s;
    while let Some(rest) = body.strip_prefix('-') {
        sign = -sign;
        body = rest;
    }
    let (n, d) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    let valid = |t: &str| !t.is_empty() && t.bytes().all(|c| c.is_ascii_digit());
    if !valid(n) || !valid(d) {
        return None;
    }
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(sign * n, d))
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &'a ExactScalar) -> ExactScalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                self.$m(&rhs)
            }
        }
    };
}

impl<'b> Add<&'b ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &'b ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.rat + &rhs.rat, &self.sqrt2 + &rhs.sqrt2)
    }
}

impl<'b> Sub<&'b ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &'b ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.rat - &rhs.rat, &self.sqrt2 - &rhs.sqrt2)
    }
}

impl<'b> Mul<&'b ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &'b ExactScalar) -> ExactScalar {
        let two = BigRational::from_integer(2.into());
        ExactScalar::new(
            &self.rat * &rhs.rat + two * &self.sqrt2 * &rhs.sqrt2,
            &self.rat * &rhs.sqrt2 + &self.sqrt2 * &rhs.rat,
        )
    }
}

/// Panics on a zero divisor; use [`ExactScalar::checked_div`] to get an error instead.
impl<'b> Div<&'b ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn div(self, rhs: &'b ExactScalar) -> ExactScalar {
        self.checked_div(rhs).expect("ExactScalar division by zero")
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.rat, -self.sqrt2)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.rat.clone(), -self.sqrt2.clone())
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::from_integer(n)
    }
}

/// The coefficient interface shared by the exact field, `f64` and jets.
///
/// `is_zero` means exactly zero; `near_zero` applies a tolerance for floating
/// backends and ignores it for the exact one.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(p: i64, q: i64) -> Self;
    fn sqrt2() -> Self;
    fn is_zero(&self) -> bool;
    fn near_zero(&self, tol: f64) -> bool;
    fn try_recip(&self) -> Option<Self>;
    /// Real value (the constant term for jets).
    fn value(&self) -> f64;
    fn signum(&self, tol: f64) -> i8;
    fn try_sqrt(&self) -> Option<Self>;
    fn try_cbrt(&self) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn magnitude(&self) -> f64 {
        self.value().abs()
    }

    fn scale_i(&self, p: i64, q: i64) -> Self {
        self.clone() * Self::from_ratio(p, q)
    }
}

impl Scalar for ExactScalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        ExactScalar::default()
    }
    fn one() -> Self {
        ExactScalar::from_integer(1)
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        ExactScalar::from_ratio(p, q)
    }
    fn sqrt2() -> Self {
        ExactScalar::sqrt2()
    }
    fn is_zero(&self) -> bool {
        self.is_zero_exact()
    }
    fn near_zero(&self, _tol: f64) -> bool {
        self.is_zero_exact()
    }
    fn try_recip(&self) -> Option<Self> {
        ExactScalar::one().checked_div(self).ok()
    }
    fn value(&self) -> f64 {
        self.to_f64()
    }
    fn signum(&self, _tol: f64) -> i8 {
        ExactScalar::signum(self)
    }
    fn try_sqrt(&self) -> Option<Self> {
        ExactScalar::try_sqrt(self)
    }
    fn try_cbrt(&self) -> Option<Self> {
        ExactScalar::try_cbrt(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn sqrt2() -> Self {
        std::f64::consts::SQRT_2
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn near_zero(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn try_recip(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn value(&self) -> f64 {
        *self
    }
    fn signum(&self, tol: f64) -> i8 {
        if self.abs() <= tol {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
    fn try_sqrt(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(self.sqrt())
        } else {
            None
        }
    }
    fn try_cbrt(&self) -> Option<Self> {
        Some(self.cbrt())
    }
}

/// Text form used by the JSON formats.
pub trait ScalarText: Sized {
    fn to_text(&self) -> String;
    fn from_text(s: &str) -> Result<Self, ScalarError>;
}

impl ScalarText for ExactScalar {
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn from_text(s: &str) -> Result<Self, ScalarError> {
        s.parse()
    }
}

impl ScalarText for f64 {
    fn to_text(&self) -> String {
        format!("{self:?}")
    }
    fn from_text(s: &str) -> Result<Self, ScalarError> {
        let t = s.trim();
        t.parse::<f64>()
            .or_else(|_| t.parse::<ExactScalar>().map(|e| e.to_f64()))
            .map_err(|_| ScalarError::Parse { input: s.to_string(), reason: "not a number".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> ExactScalar {
        ExactScalar::from_parts(p, 1, r, 1)
    }

    #[test]
    fn spec_arith_examples() {
        let s = ExactScalar::sqrt2();
        assert_eq!(&s * &s, ExactScalar::from_integer(2));
        assert_eq!(q(1, 1).checked_div(&q(1, 1)).unwrap(), ExactScalar::from_integer(1));
        assert_eq!(&q(1, 1) * &q(-1, 1), ExactScalar::from_integer(1));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(q(1, 1).checked_div(&q(0, 0)), Err(ScalarError::DivisionByZero));
        assert_eq!(field_arith(&q(3, 0), &q(0, 0), FieldOp::Div), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn float_conversion() {
        assert_eq!(q(0, 0).to_f64(), 0.0);
        assert_eq!(q(1, 0).to_f64(), 1.0);
        assert_eq!(q(0, 1).to_f64(), std::f64::consts::SQRT_2);
    }

    #[test]
    fn sign_of_embedding() {
        assert_eq!(q(3, -2).signum(), 1); // 3 − 2.83
        assert_eq!(q(2, -2).signum(), -1);
        assert_eq!(q(-1, 1).signum(), 1);
        assert!(q(1, 0) < ExactScalar::sqrt2());
    }

    #[test]
    fn text_round_trip() {
        for t in ["0", "-3/4", "sqrt2", "-1/2*sqrt2", "1+sqrt2", " 2 - 5/6 * sqrt2 ", "-1/3+2*sqrt2"] {
            let v: ExactScalar = t.parse().unwrap();
            let back: ExactScalar = v.to_string().parse().unwrap();
            assert_eq!(v, back, "{t}");
        }
        let v: ExactScalar = "3/6-2/4*sqrt2".parse().unwrap();
        assert_eq!(v.to_string(), "1/2-1/2*sqrt2");
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("abc".parse::<ExactScalar>().is_err());
        assert!("1+".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn roots() {
        let x = q(3, 2); // (1 + √2)²
        assert_eq!(x.try_sqrt().unwrap(), q(1, 1));
        assert_eq!(ExactScalar::from_integer(2).try_sqrt().unwrap(), ExactScalar::sqrt2());
        assert!(ExactScalar::from_integer(3).try_sqrt().is_none());
        assert_eq!(ExactScalar::from_ratio(-1, 216).try_cbrt().unwrap(), ExactScalar::from_ratio(-1, 6));
        let c = &(&q(1, 1) * &q(1, 1)) * &q(1, 1);
        assert_eq!(c.try_cbrt().unwrap(), q(1, 1));
    }
}
