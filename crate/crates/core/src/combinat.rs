//! Exact integer number theory: Möbius, divisors, Bezout representatives and
//! binomials divided by a prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};

/// Möbius function by trial division.
pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(invalid("mobius(0) is undefined"));
    }
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return Ok(0);
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(invalid("divisors(0) is undefined"));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn gcd_all(values: impl IntoIterator<Item = u64>) -> u64 {
    values.into_iter().fold(0, gcd)
}

/// Solution of `x·alpha − y·beta = g'` with `g' = gcd(alpha, beta)`, `x > 0`
/// and the smallest admissible `y ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BezoutSolution {
    pub x: u64,
    pub y: u64,
    pub alpha: u64,
    pub beta: u64,
    pub g_prime: u64,
}

impl BezoutSolution {
    pub fn check(&self) -> bool {
        let lhs = self.x as i128 * self.alpha as i128 - self.y as i128 * self.beta as i128;
        lhs == self.g_prime as i128
            && self.g_prime == gcd(self.alpha, self.beta)
            && self.x > 0
            && self.x * self.alpha <= self.g_prime + self.beta * self.alpha
            && self.y <= self.alpha
    }
}

pub fn bezout_min_y(alpha: u64, beta: u64) -> Result<BezoutSolution> {
    if alpha == 0 || beta == 0 {
        return Err(invalid("bezout_min_y needs alpha, beta >= 1"));
    }
    let ext = (alpha as i128).extended_gcd(&(beta as i128));
    let g = ext.gcd;
    // alpha·s + beta·t = g, so y ≡ −t (mod alpha/g).
    let period = alpha as i128 / g;
    let y = (-ext.y).rem_euclid(period);
    let x = (g + y * beta as i128) / alpha as i128;
    debug_assert_eq!(x * alpha as i128 - y * beta as i128, g);
    Ok(BezoutSolution { x: x as u64, y: y as u64, alpha, beta, g_prime: g as u64 })
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Generalised binomial `C(r, k)` for a big non-negative integer `r`.
pub fn binomial_big(r: &BigInt, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= r - BigInt::from(i);
        acc /= i + 1;
    }
    acc
}

/// `C(p^k, j) / p` for `1 ≤ j ≤ p^k − 1`.
pub fn binom_div_p(p: u64, k: u32, j: u64) -> Result<BigInt> {
    if k == 0 {
        return Err(invalid("binom_div_p needs k >= 1"));
    }
    let pk = p.checked_pow(k).ok_or_else(|| invalid(format!("{p}^{k} overflows")))?;
    if j == 0 || j >= pk {
        return Err(invalid(format!("j = {j} outside 1..{pk}")));
    }
    let c = binomial(pk, j);
    let (q, r) = c.div_rem(&BigInt::from(p));
    if !r.is_zero() {
        return Err(Error::Internal(format!("C({pk},{j}) not divisible by {p}")));
    }
    Ok(q)
}

pub fn is_odd_prime(p: u64) -> bool {
    p > 2 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}
