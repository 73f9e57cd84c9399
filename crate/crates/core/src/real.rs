//! Arbitrary-precision reals used by every bound evaluation.
//!
//! [`Real`] wraps an `astro_float::BigFloat` and carries its own precision.
//! Binary operations run at the larger of the two operand precisions with
//! round-to-nearest-even, so a computation started at `p` bits stays at `p`
//! bits and is bit-reproducible.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::Zero;

const RM: RoundingMode = RoundingMode::ToEven;

/// Significant digits used when a real is rendered for output.
pub const OUTPUT_DIGITS: usize = 24;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        debug_assert!(!v.is_nan(), "NaN produced in Real arithmetic");
        Real { v, prec }
    }

    pub fn zero(prec: usize) -> Self {
        Self::wrap(BigFloat::from_u8(0, prec), prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(x: i64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_i64(x, prec), prec)
    }

    pub fn from_u64(x: u64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_u64(x, prec), prec)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, prec), prec)
    }

    /// Rounds an arbitrary-precision integer to `prec` bits.
    pub fn from_bigint(x: &BigInt, prec: usize) -> Self {
        let (sign, digits) = x.to_u32_digits();
        let base = BigFloat::from_u64(1u64 << 32, prec);
        let mut acc = BigFloat::from_u8(0, prec);
        for d in digits.iter().rev() {
            acc = acc.mul(&base, prec, RM).add(&BigFloat::from_u32(*d, prec), prec, RM);
        }
        if sign == Sign::Minus {
            acc.inv_sign();
        }
        Self::wrap(acc, prec)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: usize) -> Self {
        Self::from_bigint(num, prec + 8).div_at(&Self::from_bigint(den, prec + 8), prec)
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        Self::from_ratio(q.numer(), q.denom(), prec)
    }

    /// The dyadic rational `mantissa / 2^shift`, exact when `prec` covers the mantissa.
    pub fn from_dyadic(mantissa: &BigInt, shift: u32, prec: usize) -> Self {
        let m = Self::from_bigint(mantissa, prec);
        let two = BigFloat::from_u8(2, prec);
        let scale = two.powi(shift as usize, prec, RM);
        Self::wrap(m.v.div(&scale, prec, RM), prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn with_precision(&self, prec: usize) -> Self {
        let mut v = self.v.clone();
        v.set_precision(prec, RM).expect("precision change");
        Self::wrap(v, prec)
    }

    fn div_at(&self, other: &Real, prec: usize) -> Real {
        Self::wrap(self.v.div(&other.v, prec, RM), prec)
    }

    pub fn abs(&self) -> Real {
        Self::wrap(self.v.abs(), self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn powi(&self, n: u64) -> Real {
        if n == 0 {
            return Real::one(self.prec);
        }
        Self::wrap(self.v.powi(n as usize, self.prec, RM), self.prec)
    }

    /// `self^e` for `self > 0`.
    pub fn powf(&self, e: &Real) -> Real {
        let prec = self.prec.max(e.prec);
        if e.is_zero() {
            return Real::one(prec);
        }
        let v = with_consts(|cc| self.v.pow(&e.v, prec, RM, cc));
        Self::wrap(v, prec)
    }

    pub fn sqrt(&self) -> Real {
        Self::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn ln(&self) -> Real {
        let v = with_consts(|cc| self.v.ln(self.prec, RM, cc));
        Self::wrap(v, self.prec)
    }

    pub fn exp(&self) -> Real {
        let v = with_consts(|cc| self.v.exp(self.prec, RM, cc));
        Self::wrap(v, self.prec)
    }

    pub fn sin(&self) -> Real {
        let v = with_consts(|cc| self.v.sin(self.prec, RM, cc));
        Self::wrap(v, self.prec)
    }

    pub fn cos(&self) -> Real {
        let v = with_consts(|cc| self.v.cos(self.prec, RM, cc));
        Self::wrap(v, self.prec)
    }

    pub fn pi(prec: usize) -> Real {
        let v = with_consts(|cc| cc.pi(prec, RM));
        Self::wrap(v, prec)
    }

    pub fn max(self, other: Real) -> Real {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Real) -> Real {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_sci_string().parse().unwrap_or(f64::NAN)
    }

    /// Greatest integer not exceeding `self`.
    pub fn floor_int(&self) -> BigInt {
        let f = self.v.floor();
        let s = with_consts(|cc| f.format(Radix::Dec, RM, cc)).unwrap_or_default();
        let (digits, exp, neg) = parse_sci(&s);
        if digits.is_empty() {
            return BigInt::zero();
        }
        let exp = exp.max(-1);
        let take = (exp + 1) as usize;
        let mut int_digits: String = digits.chars().take(take).collect();
        while int_digits.len() < take {
            int_digits.push('0');
        }
        let v: BigInt = int_digits.parse().unwrap_or_default();
        if neg {
            -v
        } else {
            v
        }
    }

    fn to_sci_string(&self) -> String {
        with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }

    /// Positional decimal rendering with `digits` significant digits, no exponent.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let s = self.to_sci_string();
        let (mant, exp, neg) = parse_sci(&s);
        if mant.chars().all(|c| c == '0') {
            return "0".to_string();
        }
        let (rounded, exp) = round_digits(&mant, exp, digits);
        let body = place_point(&rounded, exp);
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }
}

/// Splits astro-float's `d.ddd e±x` output into (digit string, exponent, negative).
fn parse_sci(s: &str) -> (String, i64, bool) {
    let (neg, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (m, e) = match s.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    let (int_part, frac_part) = m.split_once('.').unwrap_or((m, ""));
    let mut digits: String = format!("{int_part}{frac_part}");
    let mut exp = e + int_part.len() as i64 - 1;
    let lead = digits.chars().take_while(|&c| c == '0').count();
    if lead == digits.len() {
        return (String::new(), 0, neg);
    }
    digits.drain(..lead);
    exp -= lead as i64;
    (digits, exp, neg)
}

/// Rounds a digit string (value d.ddd × 10^exp) half-to-even to `n` digits.
fn round_digits(mant: &str, exp: i64, n: usize) -> (Vec<u8>, i64) {
    let mut d: Vec<u8> = mant.bytes().map(|b| b - b'0').collect();
    if d.len() <= n {
        d.resize(n, 0);
        return (d, exp);
    }
    let rest = d.split_off(n);
    let round_up = match rest[0].cmp(&5) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => rest[1..].iter().any(|&x| x != 0) || d[n - 1] % 2 == 1,
    };
    let mut exp = exp;
    if round_up {
        let mut i = n;
        loop {
            if i == 0 {
                d.insert(0, 1);
                d.truncate(n);
                exp += 1;
                break;
            }
            i -= 1;
            if d[i] == 9 {
                d[i] = 0;
            } else {
                d[i] += 1;
                break;
            }
        }
    }
    (d, exp)
}

fn place_point(d: &[u8], exp: i64) -> String {
    let digits: String = d.iter().map(|x| (x + b'0') as char).collect();
    let n = digits.len() as i64;
    let s = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if exp + 1 >= n {
        format!("{}{}", digits, "0".repeat((exp + 1 - n) as usize))
    } else {
        let (a, b) = digits.split_at((exp + 1) as usize);
        format!("{a}.{b}")
    };
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        t.to_string()
    } else {
        s
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({}, {} bits)", self.to_decimal_string(OUTPUT_DIGITS), self.prec)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(OUTPUT_DIGITS))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let prec = self.prec.max(rhs.prec);
                Real::wrap(self.v.$inner(&rhs.v, prec, RM), prec)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(BigFloat::neg(&self.v), self.prec)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(BigFloat::neg(&self.v), self.prec)
    }
}
