//! Characteristic polynomials of generator sets, exact Newton power sums and
//! certified root profiles.
//!
//! The dominant root φ is located by bisection on dyadic rationals with the
//! sign of the polynomial decided in exact integer arithmetic, so the stored
//! enclosure is a proof and not an estimate. The remaining roots come from an
//! Aberth iteration in [`Real`] arithmetic and are only used for |ψ|.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinat::gcd_all;
use crate::error::{invalid, Error, Result};
use crate::real::Real;

/// Minimum working precision for every real-valued computation.
pub const DEFAULT_MIN_PRECISION: usize = 128;

/// Relative tolerance deciding whether a root lies on the circle |z| = φ.
pub const MODULUS_TIE_TOLERANCE: f64 = 1e-8;

/// Working precision of the simultaneous root iteration; φ never depends on it.
pub const ABERTH_PRECISION: usize = 256;

const ABERTH_MAX_ITERATIONS: usize = 2000;

/// Degrees `q_1 < … < q_ℓ` with multiplicities `m_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    pairs: Vec<(u32, u32)>,
    g: u32,
}

impl GeneratorSet {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(invalid("generator set must be non-empty"));
        }
        if pairs.iter().any(|&(q, m)| q == 0 || m == 0) {
            return Err(invalid("degrees and multiplicities must be positive"));
        }
        if pairs.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(invalid("degrees must be strictly increasing"));
        }
        let g = gcd_all(pairs.iter().map(|&(q, _)| q as u64)) as u32;
        Ok(GeneratorSet { pairs, g })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// gcd of the degrees.
    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn top_degree(&self) -> u32 {
        self.pairs.last().map(|p| p.0).unwrap_or(0)
    }

    pub fn total_generators(&self) -> u64 {
        self.pairs.iter().map(|&(_, m)| m as u64).sum()
    }

    /// The two-generator set `{(q,1),(q+1,1)}` of `L(x, dx)` with `|dx| = q`.
    pub fn acyclic_pair(q: u32) -> Result<Self> {
        Self::new(vec![(q, 1), (q + 1, 1)])
    }
}

impl fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(q, m)| format!("{q}:{m}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for GeneratorSet {
    type Err = Error;

    /// Parses `q:m,q:m,…`; a bare `q` means multiplicity 1.
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (q, m) = match part.split_once(':') {
                Some((q, m)) => (q.trim(), m.trim()),
                None => (part, "1"),
            };
            let q: u32 = q.parse().map_err(|_| invalid(format!("bad degree '{q}'")))?;
            let m: u32 = m.parse().map_err(|_| invalid(format!("bad multiplicity '{m}'")))?;
            pairs.push((q, m));
        }
        pairs.sort_unstable();
        GeneratorSet::new(pairs)
    }
}

/// Monic integer polynomial, coefficients stored from `z^0` upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonicIntPoly {
    coeffs: Vec<BigInt>,
}

impl MonicIntPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(invalid("polynomial degree must be at least 1"));
        }
        if !coeffs.last().is_some_and(|c| c.is_one()) {
            return Err(invalid("polynomial must be monic"));
        }
        Ok(MonicIntPoly { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Sign of `P(m / 2^shift)`, decided exactly.
    fn sign_at_dyadic(&self, m: &BigInt, shift: u32) -> i32 {
        // 2^{shift·k} P(m/2^shift) = Σ c_i m^i 2^{shift (k - i)}
        let k = self.degree();
        let mut total = BigInt::zero();
        let mut m_pow = BigInt::one();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                total += (c * &m_pow) << (shift as usize * (k - i));
            }
            m_pow *= m;
        }
        sign_of(&total)
    }

    pub fn eval_real(&self, x: &Real) -> Real {
        let prec = x.precision();
        let mut acc = Real::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &acc * x + Real::from_bigint(c, prec);
        }
        acc
    }

    fn eval_with_derivative(&self, z: &Complex) -> (Complex, Complex) {
        // sparse: powers of z are built only at the nonzero coefficients
        let prec = z.re.precision();
        let mut p = Complex::zero(prec).add_real(&Real::from_bigint(&self.coeffs[0], prec));
        let mut dp = Complex::zero(prec);
        let mut pw = Complex { re: Real::one(prec), im: Real::zero(prec) };
        let mut e = 0usize;
        for (i, c) in self.coeffs.iter().enumerate().skip(1).filter(|(_, c)| !c.is_zero()) {
            pw = pw.mul(&z.powi((i - 1 - e) as u64));
            e = i - 1;
            let c = Real::from_bigint(c, prec);
            dp = dp.add(&pw.scale(&(&c * Real::from_u64(i as u64, prec))));
            p = p.add(&pw.mul(z).scale(&c));
        }
        (p, dp)
    }

    /// True for `z^k − Σ c_i z^i` with `c_i ≥ 0` and `c_0 ≥ 1`.
    fn is_single_sign_change(&self) -> bool {
        let k = self.degree();
        self.coeffs[..k].iter().all(|c| !c.is_positive()) && self.coeffs[0].is_negative()
    }
}

impl fmt::Display for MonicIntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coef = if mag.is_one() && i > 0 { String::new() } else { mag.to_string() };
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{coef}z")?,
                _ => write!(f, "{coef}z^{i}")?,
            }
        }
        Ok(())
    }
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    }
}

/// `z^{q_ℓ} − Σ_i m_i z^{q_ℓ − q_i}`, the reciprocal of `1 − Σ m_i z^{q_i}`.
pub fn char_poly(gen: &GeneratorSet) -> MonicIntPoly {
    let k = gen.top_degree() as usize;
    let mut coeffs = vec![BigInt::zero(); k + 1];
    coeffs[k] = BigInt::one();
    for &(q, m) in gen.pairs() {
        coeffs[k - q as usize] -= BigInt::from(m);
    }
    MonicIntPoly { coeffs }
}

/// Power sums `S_1..S_N` of the roots, by Newton's identities.
pub fn newton_sums(poly: &MonicIntPoly, n: usize) -> Vec<BigInt> {
    let k = poly.degree();
    let a = poly.coeffs();
    let mut s: Vec<BigInt> = Vec::with_capacity(n);
    for m in 1..=n {
        // S_m + a_{k-1} S_{m-1} + … + a_{k-m+1} S_1 + m a_{k-m} = 0   (m ≤ k)
        // S_m + a_{k-1} S_{m-1} + … + a_0 S_{m-k} = 0                 (m > k)
        let mut acc = BigInt::zero();
        for i in 1..m.min(k + 1) {
            acc += &a[k - i] * &s[m - i - 1];
        }
        if m <= k {
            acc += &a[k - m] * BigInt::from(m);
        }
        s.push(-acc);
    }
    s
}

/// Approximation of a complex root plus `|P(η)|` at that approximation.
#[derive(Debug, Clone)]
pub struct ComplexRoot {
    pub re: Real,
    pub im: Real,
    pub residual: Real,
}

impl ComplexRoot {
    pub fn modulus(&self) -> Real {
        (&self.re * &self.re + &self.im * &self.im).sqrt()
    }
}

/// A dyadic enclosure `[lo, hi] / 2^shift` of the dominant root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub shift: u32,
}

#[derive(Debug, Clone)]
pub struct RootProfile {
    pub phi: Real,
    pub phi_lo: Real,
    pub phi_hi: Real,
    pub enclosure: DyadicInterval,
    /// Largest modulus strictly below φ; `None` when every root has modulus φ.
    pub psi_abs: Option<Real>,
    pub g: u32,
    pub roots: Vec<ComplexRoot>,
    pub precision_bits: usize,
    pub degree: usize,
}

impl RootProfile {
    /// |ψ| with the convention that an absent ψ contributes nothing.
    pub fn psi_or_zero(&self) -> Real {
        self.psi_abs.clone().unwrap_or_else(|| Real::zero(self.precision_bits))
    }

    /// `|ψ|^e`, or 0 when ψ is absent.
    pub fn psi_pow(&self, e: u64) -> Real {
        match &self.psi_abs {
            Some(psi) => psi.powi(e),
            None => Real::zero(self.precision_bits),
        }
    }

    pub fn max_residual(&self) -> Real {
        self.roots.iter().map(|r| r.residual.clone()).fold(Real::zero(self.precision_bits), Real::max)
    }
}

/// Precision needed so that `φ^n_max` still carries 64 correct bits.
pub fn required_precision(gen: &GeneratorSet, n_max: u64, min_bits: usize) -> usize {
    let phi_upper = coarse_phi_upper(&char_poly(gen));
    let growth = (n_max as f64 * phi_upper.log2()).ceil().max(0.0) as usize;
    min_bits.max(64).max(growth + 64)
}

/// A cheap upper bound on φ from f64 bisection, padded outward.
fn coarse_phi_upper(poly: &MonicIntPoly) -> f64 {
    let c: Vec<f64> = poly.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::MAX)).collect();
    let eval = |x: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
    let (mut lo, mut hi) = (0.0f64, 1.0 + c.iter().map(|x| x.abs()).fold(0.0, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi * (1.0 + 1e-9) + 1e-12
}

/// Certified φ plus all complex roots of a polynomial from [`char_poly`].
pub fn root_profile(poly: &MonicIntPoly, g: u32, precision_bits: usize) -> Result<RootProfile> {
    if precision_bits < 64 {
        return Err(invalid("precision_bits must be at least 64"));
    }
    if g == 0 || !poly.degree().is_multiple_of(g as usize) {
        return Err(invalid(format!("g = {g} does not divide the degree {}", poly.degree())));
    }
    if !poly.is_single_sign_change() {
        return Err(invalid(format!("{poly} is not of the form z^k - sum c_i z^i with c_0 >= 1")));
    }
    let enclosure = bisect_phi(poly, precision_bits as u32);
    let work = precision_bits + 32;
    let phi_lo = Real::from_dyadic(&enclosure.lo, enclosure.shift, work);
    let phi_hi = Real::from_dyadic(&enclosure.hi, enclosure.shift, work);
    let phi = Real::from_dyadic(&(&enclosure.lo + &enclosure.hi), enclosure.shift + 1, work);

    let roots = aberth_roots(poly, &phi)?;
    let k = poly.degree();
    let tol = Real::from_f64(MODULUS_TIE_TOLERANCE, precision_bits);
    let mut on_circle = Vec::new();
    let mut psi_abs: Option<Real> = None;
    for r in &roots {
        let m = r.modulus().with_precision(precision_bits);
        if ((&m - &phi).abs() / &phi) <= tol {
            on_circle.push(r);
        } else {
            psi_abs = Some(match psi_abs {
                Some(prev) => prev.max(m),
                None => m,
            });
        }
    }
    if on_circle.len() != g as usize {
        return Err(Error::RootStructureViolation(format!(
            "{} roots of {poly} have modulus phi, expected g = {g}",
            on_circle.len()
        )));
    }
    // (η/φ)^g must be 1 for every root on the circle.
    let unity_tol = Real::from_f64(1e-6, precision_bits);
    for r in &on_circle {
        let z = Complex { re: &r.re / &phi, im: &r.im / &phi };
        let zg = z.powi(g as u64);
        let dist = (&(&zg.re - Real::one(precision_bits)).abs() + &zg.im.abs()).with_precision(precision_bits);
        if dist > unity_tol {
            return Err(Error::RootStructureViolation(format!(
                "root {}+{}i of {poly} is not phi times a {g}-th root of unity",
                r.re, r.im
            )));
        }
    }
    if let Some(psi) = &psi_abs {
        if psi >= &phi {
            return Err(Error::RootStructureViolation(format!("|psi| = {psi} is not below phi = {phi}")));
        }
    }
    if phi_lo < Real::one(work) && phi_hi < Real::one(work) {
        return Err(Error::RootStructureViolation(format!("phi = {phi} is below 1")));
    }
    Ok(RootProfile { phi, phi_lo, phi_hi, enclosure, psi_abs, g, roots, precision_bits, degree: k })
}

/// Profile of `char_poly(gen)` at the precision needed for exponents up to `n_max`.
pub fn profile_for(gen: &GeneratorSet, n_max: u64, min_bits: usize) -> Result<RootProfile> {
    let bits = required_precision(gen, n_max, min_bits);
    root_profile(&char_poly(gen), gen.g(), bits)
}

fn bisect_phi(poly: &MonicIntPoly, bits: u32) -> DyadicInterval {
    let bound: BigInt = BigInt::one() + poly.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
    let mut lo = BigInt::zero();
    let mut hi = bound;
    let mut shift = 0u32;
    // until (hi - lo) / 2^shift <= 2^-bits
    while (&hi - &lo) << bits as usize > BigInt::one() << shift as usize {
        lo <<= 1usize;
        hi <<= 1usize;
        shift += 1;
        let mid: BigInt = (&lo + &hi) >> 1usize;
        match poly.sign_at_dyadic(&mid, shift) {
            s if s < 0 => lo = mid,
            s if s > 0 => hi = mid,
            _ => {
                // exact dyadic root: widen symmetrically at a finer scale
                let extra = (bits + 1).saturating_sub(shift) + 1;
                let mid = mid << extra as usize;
                shift += extra;
                lo = &mid - 1;
                hi = &mid + 1;
                break;
            }
        }
    }
    debug_assert!(poly.sign_at_dyadic(&lo, shift) < 0);
    debug_assert!(poly.sign_at_dyadic(&hi, shift) > 0);
    DyadicInterval { lo, hi, shift }
}

#[derive(Clone, Debug)]
struct Complex {
    re: Real,
    im: Real,
}

impl Complex {
    fn zero(prec: usize) -> Self {
        Complex { re: Real::zero(prec), im: Real::zero(prec) }
    }

    fn add(&self, o: &Complex) -> Complex {
        Complex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &Complex) -> Complex {
        Complex { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn add_real(&self, r: &Real) -> Complex {
        Complex { re: &self.re + r, im: self.im.clone() }
    }

    fn mul(&self, o: &Complex) -> Complex {
        Complex { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    fn div(&self, o: &Complex) -> Complex {
        let d = o.norm_sqr();
        Complex { re: (&self.re * &o.re + &self.im * &o.im) / &d, im: (&self.im * &o.re - &self.re * &o.im) / &d }
    }

    fn scale(&self, r: &Real) -> Complex {
        Complex { re: &self.re * r, im: &self.im * r }
    }

    fn powi(&self, mut n: u64) -> Complex {
        let prec = self.re.precision();
        let mut acc = Complex { re: Real::one(prec), im: Real::zero(prec) };
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl std::ops::Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, o: &Complex) -> Complex {
        Complex::add(self, o)
    }
}

/// Independent Newton refinement of each starting point; `None` if any stalls or two roots merge.
fn newton_polish(poly: &MonicIntPoly, z: &[Complex], stop: &Real) -> Option<Vec<Complex>> {
    let mut out = Vec::with_capacity(z.len());
    for z0 in z {
        let prec = z0.re.precision();
        let one = Real::one(prec);
        let mut zi = z0.clone();
        let mut converged = false;
        for _ in 0..64 {
            let (p, dp) = poly.eval_with_derivative(&zi);
            if p.norm_sqr().is_zero() {
                converged = true;
                break;
            }
            if dp.norm_sqr().is_zero() {
                return None;
            }
            let step = p.div(&dp);
            zi = zi.sub(&step);
            if step.abs() / one.clone().max(zi.abs()) <= *stop {
                converged = true;
                break;
            }
        }
        if !converged {
            return None;
        }
        out.push(zi);
    }
    let approx: Vec<Complex64> = out.iter().map(|c| Complex64::new(c.re.to_f64(), c.im.to_f64())).collect();
    for i in 0..approx.len() {
        for j in i + 1..approx.len() {
            if (approx[i] - approx[j]).norm() <= 1e-9 * approx[i].norm().max(1.0) {
                return None;
            }
        }
    }
    Some(out)
}

fn circle_offset(j: usize, k: usize) -> f64 {
    0.05 * (j as f64 + 1.0) / k as f64
}

/// Double-precision Aberth pass used as a starting point; `None` where it produced non-finite values.
fn aberth_f64(poly: &MonicIntPoly, phi: f64) -> Vec<Option<Complex64>> {
    let k = poly.degree();
    let coeffs: Vec<f64> = poly.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    let mut z: Vec<Complex64> = (0..k)
        .map(|j| {
            let angle = std::f64::consts::TAU * j as f64 / k as f64 + 0.4;
            Complex64::from_polar(phi * (1.0 + circle_offset(j, k)), angle)
        })
        .collect();
    for _ in 0..ABERTH_MAX_ITERATIONS {
        let mut max_step = 0.0f64;
        for i in 0..k {
            let (p, dp) = eval(z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..k).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (1.0 - ratio * sum);
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            z[i] -= step;
        }
        if !max_step.is_finite() || max_step < 1e-11 {
            break;
        }
    }
    z.into_iter().map(|c| (c.re.is_finite() && c.im.is_finite()).then_some(c)).collect()
}

/// Simultaneous Aberth–Ehrlich iteration, warm-started in double precision.
fn aberth_roots(poly: &MonicIntPoly, phi: &Real) -> Result<Vec<ComplexRoot>> {
    let k = poly.degree();
    let prec = ABERTH_PRECISION;
    let one = Real::one(prec);
    let two_pi = Real::pi(prec) * Real::from_i64(2, prec);
    let start = aberth_f64(poly, phi.to_f64());
    let mut z: Vec<Complex> = (0..k)
        .map(|j| match start[j] {
            Some(c) => Complex { re: Real::from_f64(c.re, prec), im: Real::from_f64(c.im, prec) },
            None => {
                let angle = &two_pi * Real::from_i64(j as i64, prec) / Real::from_i64(k as i64, prec)
                    + Real::from_f64(0.4, prec);
                let radius = phi.with_precision(prec) * (&one + Real::from_f64(circle_offset(j, k), prec));
                Complex { re: &radius * angle.cos(), im: &radius * angle.sin() }
            }
        })
        .collect();

    let stop = Real::from_f64(2f64.powi(24 - prec as i32), prec);
    let polished = if start.iter().all(Option::is_some) { newton_polish(poly, &z, &stop) } else { None };
    let aberth_needed = polished.is_none();
    if let Some(p) = polished {
        z = p;
    }
    for _ in 0..if aberth_needed { ABERTH_MAX_ITERATIONS } else { 0 } {
        let mut max_step = Real::zero(prec);
        for i in 0..k {
            let (p, dp) = poly.eval_with_derivative(&z[i]);
            if p.norm_sqr().is_zero() {
                continue;
            }
            let ratio = p.div(&dp);
            let mut sum = Complex::zero(prec);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let diff = z[i].sub(zj);
                    sum = sum.add(&Complex { re: one.clone(), im: Real::zero(prec) }.div(&diff));
                }
            }
            let denom = Complex { re: one.clone(), im: Real::zero(prec) }.sub(&ratio.mul(&sum));
            let step = ratio.div(&denom);
            let scale = one.clone().max(z[i].abs());
            max_step = max_step.max(step.abs() / scale);
            z[i] = z[i].sub(&step);
        }
        if max_step <= stop {
            break;
        }
    }

    let mut roots = Vec::with_capacity(k);
    for zi in z {
        let (p, _) = poly.eval_with_derivative(&zi);
        let residual = p.abs();
        let allowed = Real::from_f64(1e-9, prec) * (&one + zi.abs()).powi(k as u64);
        if residual > allowed {
            return Err(Error::NumericFailure(format!(
                "root approximation {}+{}i of {poly} has residual {residual} above {allowed}",
                zi.re, zi.im
            )));
        }
        roots.push(ComplexRoot { re: zi.re, im: zi.im, residual });
    }
    roots.sort_by(|a, b| {
        b.modulus()
            .partial_cmp(&a.modulus())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(roots)
}
