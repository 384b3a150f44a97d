//! Exact dyadic rationals `m * 2^e` with arbitrary-precision mantissa.
//!
//! Everything the recursive interval family produces (endpoints,
//! breakpoints, values, slopes) is dyadic by construction, so computing in
//! this type makes equality tests exact. Canonical form keeps the mantissa
//! odd (or zero with exponent zero), which makes structural equality agree
//! with numeric equality.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic::from(1)
    }

    /// `mantissa * 2^exponent`, brought to canonical form.
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn from_parts(mantissa: i64, exponent: i64) -> Self {
        Dyadic::new(BigInt::from(mantissa), exponent)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mantissa: BigInt::from(1), exponent: e }
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        if let Some(tz) = self.mantissa.trailing_zeros() {
            if tz > 0 {
                self.mantissa >>= tz;
                self.exponent += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i8 {
        match self.mantissa.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    pub fn mul_pow2(&self, e: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + e }
    }

    /// Half of `self`.
    pub fn half(&self) -> Dyadic {
        self.mul_pow2(-1)
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.mantissa.to_f64().unwrap_or(f64::NAN);
        libm::ldexp(m, self.exponent.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Nearest dyadic on the `2^-bits` grid; exact for finite `x` scaled into
    /// range. Used where float-level callers feed the exact families.
    pub fn from_f64_snapped(x: f64, bits: u32) -> Dyadic {
        let scaled = x * crate::math::exp2(bits as f64);
        let rounded = crate::math::floor(scaled + 0.5);
        Dyadic::new(BigInt::from(rounded as i128), -(bits as i64))
    }

    /// Exact decimal representation, available when the exponent is not too
    /// small. The result has no trailing zeros after the point.
    pub fn to_decimal(&self) -> Option<String> {
        use alloc::string::ToString;
        if self.exponent >= 0 {
            let v: BigInt = &self.mantissa << self.exponent as u64;
            return Some(v.to_string());
        }
        let k = -self.exponent;
        if k > 64 {
            return None;
        }
        let five = BigInt::from(5).pow(k as u32);
        let digits = (self.mantissa.abs() * five).to_string();
        let k = k as usize;
        let sign = if self.signum() < 0 { "-" } else { "" };
        let mut s = String::from(sign);
        if digits.len() > k {
            s.push_str(&digits[..digits.len() - k]);
        } else {
            s.push('0');
        }
        s.push('.');
        for _ in digits.len()..k {
            s.push('0');
        }
        let frac_start = digits.len().saturating_sub(k);
        s.push_str(&digits[frac_start..]);
        Some(s)
    }

    /// Parses a decimal like `-0.3125`; errors when the value is not dyadic
    /// (denominator after reduction must be a power of two).
    pub fn parse_decimal(s: &str) -> Result<Dyadic> {
        let (int_part, frac_part) = match s.split_once('.') {
            Some((a, b)) => (a, b),
            None => (s, ""),
        };
        if frac_part.contains(['-', '+']) {
            return Err(Error::MalformedQuery("misplaced sign in decimal"));
        }
        let digits: String = [int_part, frac_part].concat();
        let value: BigInt = digits
            .parse()
            .map_err(|_| Error::MalformedQuery("invalid decimal literal"))?;
        let k = frac_part.len() as u32;
        // value / 10^k = value / (2^k 5^k); dyadic iff 5^k divides value
        let five = BigInt::from(5).pow(k);
        let (q, r) = num_integer_div_rem(&value, &five);
        if !r.is_zero() {
            return Err(Error::MalformedQuery(
                "decimal is not a dyadic rational (denominator must be a power of two)",
            ));
        }
        Ok(Dyadic::new(q, -(k as i64)))
    }
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    (a / b, a % b)
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }
}

fn add_impl(a: &Dyadic, b: &Dyadic) -> Dyadic {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let e = a.exponent.min(b.exponent);
    let ma: BigInt = &a.mantissa << (a.exponent - e) as u64;
    let mb: BigInt = &b.mantissa << (b.exponent - e) as u64;
    Dyadic::new(ma + mb, e)
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        add_impl(self, rhs)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        add_impl(&self, &rhs)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        add_impl(self, &(-rhs.clone()))
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa.clone(), exponent: self.exponent }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let e = self.exponent.min(other.exponent);
        let ma: BigInt = &self.mantissa << (self.exponent - e) as u64;
        let mb: BigInt = &other.mantissa << (other.exponent - e) as u64;
        ma.cmp(&mb)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_decimal() {
            Some(d) => write!(f, "{d}"),
            None => write!(f, "{self}"),
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some((m, e)) = s.split_once("*2^") {
            let m: BigInt =
                m.parse().map_err(|_| Error::MalformedQuery("invalid dyadic mantissa"))?;
            let e: i64 =
                e.parse().map_err(|_| Error::MalformedQuery("invalid dyadic exponent"))?;
            return Ok(Dyadic::new(m, e));
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt =
                num.parse().map_err(|_| Error::MalformedQuery("invalid numerator"))?;
            let den: BigInt =
                den.parse().map_err(|_| Error::MalformedQuery("invalid denominator"))?;
            if den.is_zero() || den.is_negative() {
                return Err(Error::MalformedQuery("denominator must be positive"));
            }
            let tz = den.trailing_zeros().unwrap_or(0);
            if (&den >> tz) != BigInt::from(1) {
                return Err(Error::MalformedQuery("denominator must be a power of two"));
            }
            return Ok(Dyadic::new(num, -(tz as i64)));
        }
        if s.contains('.') {
            return Dyadic::parse_decimal(s);
        }
        let m: BigInt = s.parse().map_err(|_| Error::MalformedQuery("invalid integer"))?;
        Ok(Dyadic::new(m, 0))
    }
}

/// Sum of a slice.
pub fn sum(values: &[Dyadic]) -> Dyadic {
    let mut acc = Dyadic::zero();
    for v in values {
        acc = &acc + v;
    }
    acc
}

/// Maximum of a non-empty slice together with every index attaining it.
pub fn max_with_argmax(values: &[Dyadic]) -> (Dyadic, Vec<usize>) {
    assert!(!values.is_empty());
    let mut best = values[0].clone();
    for v in &values[1..] {
        if *v > best {
            best = v.clone();
        }
    }
    let arg = values.iter().enumerate().filter(|(_, v)| **v == best).map(|(i, _)| i).collect();
    (best, arg)
}
