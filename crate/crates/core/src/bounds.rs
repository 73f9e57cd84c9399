//! Explicit lower and upper bounds, evaluated with certified root data.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::charpoly::{profile_for, GeneratorSet, RootProfile, DEFAULT_MIN_PRECISION};
use crate::combinat::{gcd, is_odd_prime};
use crate::error::{invalid, Error, Result};
use crate::real::Real;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Constants for the homology-route bounds, built from `z^{q+1} − z − 1`.
#[derive(Debug, Clone)]
pub struct HomologyBoundParams {
    pub q: u32,
    pub p: u64,
    pub phi: Real,
    pub psi_abs: Real,
    pub c: Real,
    pub kappa: Real,
    pub c1: Real,
    pub c2: Real,
    pub profile: RootProfile,
    sqrt_phi: Real,
}

impl HomologyBoundParams {
    /// `n_max` is the largest degree the caller intends to evaluate at.
    pub fn new(q: u32, p: u64, n_max: u64, min_bits: usize) -> Result<Self> {
        if q < 2 {
            return Err(invalid(format!("q must be at least 2, got {q}")));
        }
        if !is_odd_prime(p) {
            return Err(invalid(format!("p = {p} is not an odd prime")));
        }
        let gen = GeneratorSet::acyclic_pair(q)?;
        let profile = profile_for(&gen, n_max, min_bits)?;
        let prec = profile.precision_bits;
        let phi = profile.phi.clone();
        let psi_abs = profile
            .psi_abs
            .clone()
            .ok_or_else(|| Error::Internal(format!("z^{} - z - 1 has no second modulus", q + 1)))?;
        let one = Real::one(prec);
        let lower = Real::from_u64(2, prec).powf(&Real::from_ratio(&1.into(), &(q + 1).into(), prec));
        let upper = &one + &Real::from_ratio(&1.into(), &q.into(), prec);
        if !(lower < phi && phi < upper) {
            return Err(Error::Internal(format!("phi = {phi} outside (2^(1/(q+1)), 1 + 1/q) for q = {q}")));
        }
        let qq = Real::from_u64(q as u64 + 2, prec);
        let c = Real::from_u64(2, prec) * &qq * (&one + &phi);
        let kappa = Real::from_u64(q as u64 + 1, prec) * (&one + &(&one / &psi_abs));
        let c1 = Real::from_u64(2, prec) * &qq * phi.powf(&Real::from_ratio(&2.into(), &p.into(), prec));
        let sqrt_phi = phi.sqrt();
        let c2 = &qq * (&one + &(&one / &sqrt_phi));
        Ok(HomologyBoundParams { q, p, phi, psi_abs, c, kappa, c1, c2, profile, sqrt_phi })
    }

    pub fn precision_bits(&self) -> usize {
        self.profile.precision_bits
    }

    fn prec(&self) -> usize {
        self.phi.precision()
    }

    /// `(1 − (N/(N−1))/φ)·φ^N/N`
    fn main_term(&self, n: u64) -> Result<Real> {
        if n < 2 {
            return Err(invalid(format!("N must be at least 2, got {n}")));
        }
        let prec = self.prec();
        let ratio = Real::from_ratio(&n.into(), &(n - 1).into(), prec);
        let lead = Real::one(prec) - ratio / &self.phi;
        Ok(lead * self.phi.powi(n) / Real::from_u64(n, prec))
    }

    /// `(1 − (N/(N−1))/φ)(1/N)φ^N − cNφ^{N/2} − κ|ψ|^N`
    pub fn f_q(&self, n: u64) -> Result<Real> {
        let main = self.main_term(n)?;
        let middle = &self.c * Real::from_u64(n, self.prec()) * self.sqrt_phi.powi(n);
        Ok(main - middle - &self.kappa * self.psi_abs.powi(n))
    }

    /// Lower bound on the rank of the boundaries in degree `N`; the same expression as [`Self::f_q`].
    pub fn boundary_lower(&self, n: u64) -> Result<Real> {
        self.f_q(n)
    }

    /// `c1·N·φ^{N/p}`
    pub fn sigma_upper(&self, n: u64) -> Real {
        let prec = self.prec();
        if n == 0 {
            return Real::zero(prec);
        }
        let e = Real::from_ratio(&n.into(), &self.p.into(), prec);
        &self.c1 * Real::from_u64(n, prec) * self.phi.powf(&e)
    }

    /// `(1 − (N/(N−1))/φ)(1/N)φ^N − κ|ψ|^N − c2·φ^{N/2}`
    pub fn bbar_lower(&self, n: u64) -> Result<Real> {
        let main = self.main_term(n)?;
        Ok(main - &self.kappa * self.psi_abs.powi(n) - &self.c2 * self.sqrt_phi.powi(n))
    }

    /// `(1 − 1/φ)·φ^N/N`, the large-`N` shape of `f_q`.
    pub fn asymptotic_main(&self, n: u64) -> Real {
        let prec = self.prec();
        let one = Real::one(prec);
        (&one - &(&one / &self.phi)) * self.phi.powi(n) / Real::from_u64(n, prec)
    }

    /// `(1 − 2^{−1/(q+1)})·2^{N/(q+1)}/N`
    pub fn two_power_main(&self, n: u64) -> Real {
        let prec = self.prec();
        let one = Real::one(prec);
        let two = Real::from_u64(2, prec);
        let inv = Real::from_ratio(&1.into(), &(self.q + 1).into(), prec);
        let base = two.powf(&inv);
        (&one - &(&one / &base)) * two.powf(&Real::from_ratio(&n.into(), &(self.q + 1).into(), prec))
            / Real::from_u64(n, prec)
    }

    /// Smallest `N` in `2..=n_hi` with `f_q(N) > 0`.
    pub fn first_positive(&self, n_hi: u64) -> Result<Option<u64>> {
        for n in 2..=n_hi {
            if self.f_q(n)?.is_positive() {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// Smallest `N₀` such that `f_q(N) ≥ (1 − ε)(1 − 1/φ)φ^N/N` for every `N` in `N₀..=n_hi`.
    pub fn asymptotic_threshold(&self, epsilon: &Real, n_hi: u64) -> Result<Option<u64>> {
        let scale = Real::one(self.prec()) - epsilon;
        let mut threshold = None;
        for n in (2..=n_hi).rev() {
            if self.f_q(n)? >= &scale * self.asymptotic_main(n) {
                threshold = Some(n);
            } else {
                break;
            }
        }
        Ok(threshold)
    }
}

/// `f_q(N)` at the precision needed for degree `N`.
pub fn f_q(q: u32, n: u64, p: u64) -> Result<Real> {
    HomologyBoundParams::new(q, p, n, DEFAULT_MIN_PRECISION)?.f_q(n)
}

pub fn boundary_lower(q: u32, n: u64, p: u64) -> Result<Real> {
    HomologyBoundParams::new(q, p, n, DEFAULT_MIN_PRECISION)?.boundary_lower(n)
}

pub fn sigma_upper(q: u32, p: u64, n: u64) -> Result<Real> {
    Ok(HomologyBoundParams::new(q, p, n, DEFAULT_MIN_PRECISION)?.sigma_upper(n))
}

/// The `p` argument only enters `c1`, which this bound does not use.
pub fn bbar_lower(q: u32, n: u64) -> Result<Real> {
    HomologyBoundParams::new(q, 3, n, DEFAULT_MIN_PRECISION)?.bbar_lower(n)
}

#[derive(Debug, Clone)]
pub struct RankWindow {
    pub center: Real,
    pub half_width: Real,
    pub lower: Real,
    pub upper: Real,
}

impl RankWindow {
    /// Containment with `slack` relative to `max(|center|, half_width, 1)`.
    pub fn contains(&self, value: &Real, slack: f64) -> bool {
        let prec = self.center.precision();
        let scale = self.center.abs().max(self.half_width.clone()).max(Real::one(prec));
        let pad = Real::from_f64(slack, prec) * scale;
        &self.lower - &pad <= *value && *value <= &self.upper + &pad
    }
}

/// Window `(g/N)φ^N ± ((q_ℓ/N)|ψ|^N + gφ^{N/2} + q_ℓ|ψ|^{N/2})` around `rank(L_N)`.
pub fn rank_window_with(gen: &GeneratorSet, profile: &RootProfile, n: u64) -> Result<RankWindow> {
    let g = gen.g() as u64;
    if n == 0 || !n.is_multiple_of(g) {
        return Err(invalid(format!("g = {g} does not divide N = {n}")));
    }
    let prec = profile.precision_bits.max(profile.phi.precision());
    let ql = Real::from_u64(gen.top_degree() as u64, prec);
    let nn = Real::from_u64(n, prec);
    let gg = Real::from_u64(g, prec);
    let center = &gg / &nn * profile.phi.powi(n);
    let sqrt_phi = profile.phi.sqrt();
    let mut half_width = &gg * sqrt_phi.powi(n);
    if let Some(psi) = &profile.psi_abs {
        half_width = half_width + &ql / &nn * psi.powi(n) + &ql * psi.sqrt().powi(n);
    }
    let lower = &center - &half_width;
    let upper = &center + &half_width;
    Ok(RankWindow { center, half_width, lower, upper })
}

pub fn rank_window(gen: &GeneratorSet, n: u64) -> Result<RankWindow> {
    let profile = profile_for(gen, n, DEFAULT_MIN_PRECISION)?;
    rank_window_with(gen, &profile, n)
}

/// Which constant closes the threshold in Condition (*).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConditionReading {
    /// `… + r(conn+2) + 1`, the form matching `b`; used everywhere.
    #[default]
    PlusOne,
    /// `… + r(conn+2) − 1`, kept only for comparison.
    MinusOne,
}

impl fmt::Display for ConditionReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionReading::PlusOne => "+1",
            ConditionReading::MinusOne => "-1",
        })
    }
}

fn check_space(p: u64, conn: u64, dim: u64, min_gap: u64) -> Result<()> {
    if !is_odd_prime(p) {
        return Err(invalid(format!("p = {p} is not an odd prime")));
    }
    if dim < conn + min_gap {
        return Err(invalid(format!("dim = {dim} must be at least conn + {min_gap}")));
    }
    Ok(())
}

/// `(1/(2(p−1)))·[(r − 1)N + r(conn+2) ± 1]` with `r = (dim+1)/(conn+1)`.
///
/// `dim = conn` is accepted here and gives a threshold independent of `N`.
pub fn condition_threshold(p: u64, conn: u64, dim: u64, n: u64, reading: ConditionReading) -> Result<BigRational> {
    check_space(p, conn, dim, 0)?;
    let r = rat(dim as i64 + 1, conn as i64 + 1);
    let tail = match reading {
        ConditionReading::PlusOne => int(1),
        ConditionReading::MinusOne => int(-1),
    };
    let inner = (&r - int(1)) * int(n as i64) + &r * int(conn as i64 + 2) + tail;
    Ok(inner / int(2 * (p as i64 - 1)))
}

pub fn condition_star(p: u64, conn: u64, dim: u64, n: u64, j: u64) -> Result<bool> {
    Ok(int(j as i64) > condition_threshold(p, conn, dim, n, ConditionReading::PlusOne)?)
}

/// Least `j ≥ 0` satisfying Condition (*).
pub fn min_j(p: u64, conn: u64, dim: u64, n: u64) -> Result<u64> {
    min_j_with(p, conn, dim, n, ConditionReading::PlusOne)
}

pub fn min_j_with(p: u64, conn: u64, dim: u64, n: u64, reading: ConditionReading) -> Result<u64> {
    let t = condition_threshold(p, conn, dim, n, reading)?;
    if t.is_negative() {
        return Ok(0);
    }
    let f: BigInt = t.floor().to_integer() + 1;
    f.to_u64().ok_or_else(|| invalid("threshold overflows u64"))
}

/// Brute-force proof that the dimension sets `S_i` cover every `g′`-multiple in a range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageCertificate {
    pub alpha: u64,
    pub beta: u64,
    pub n: u64,
    pub g_prime: u64,
    pub min_s: u64,
    pub big_b: BigRational,
    /// First covered value, `⌈min(S_n) + B⌉` rounded up to a multiple of `g′`.
    pub start: u64,
    pub cap: u64,
    /// Exclusive upper end of the index window `n ≤ i < n + β(β+1)`.
    pub i_end: u64,
    witnesses: Vec<u64>,
}

impl CoverageCertificate {
    /// `(i, j)` with `value = iα + jβ`, for a `g′`-multiple in `[start, cap]`.
    pub fn witness(&self, value: u64) -> Option<(u64, u64)> {
        if value < self.start || value > self.cap || !value.is_multiple_of(self.g_prime) {
            return None;
        }
        let i = self.witnesses[((value - self.start) / self.g_prime) as usize];
        Some((i, (value - i * self.alpha) / self.beta))
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// Re-checks every witness against the definition of `S_i`.
    pub fn verify(&self, a: &BigRational, b: &BigRational) -> bool {
        self.witnesses.iter().enumerate().all(|(k, &i)| {
            let v = self.start + k as u64 * self.g_prime;
            let Some(rest) = v.checked_sub(i * self.alpha) else { return false };
            rest % self.beta == 0
                && int((rest / self.beta) as i64) > a * int(i as i64) + b
                && (self.n..self.i_end).contains(&i)
        })
    }
}

/// Least `j ≥ 0` with `j > a·i + b`.
fn least_j(a: &BigRational, b: &BigRational, i: u64) -> u64 {
    let t = a * int(i as i64) + b;
    if t.is_negative() {
        0
    } else {
        (t.floor().to_integer() + BigInt::from(1)).to_u64().expect("small threshold")
    }
}

/// Verifies that each `g′`-multiple in `[min(S_n) + B, cap]` lies in some `S_i`, `n ≤ i < n + β(β+1)`,
/// where `S_i = {iα + jβ : j ≥ 0, j > a·i + b}` and `B = β²(α + a(1+β)) + β`.
pub fn bezout_cover(
    alpha: u64,
    beta: u64,
    a: &BigRational,
    b: &BigRational,
    n: u64,
    cap: u64,
) -> Result<CoverageCertificate> {
    if alpha == 0 || beta == 0 {
        return Err(invalid("alpha and beta must be positive"));
    }
    if !a.is_positive() {
        return Err(invalid("a must be positive"));
    }
    let g_prime = gcd(alpha, beta);
    let min_s = n * alpha + least_j(a, b, n) * beta;
    let big_b = int((beta * beta) as i64) * (int(alpha as i64) + a * int(1 + beta as i64)) + int(beta as i64);
    let lo = (int(min_s as i64) + &big_b).ceil().to_integer().to_u64().ok_or_else(|| invalid("bound overflow"))?;
    let start = lo.div_ceil(g_prime) * g_prime;
    let i_end = n + beta * (beta + 1);
    let slots = if cap >= start { ((cap - start) / g_prime + 1) as usize } else { 0 };
    let mut witnesses = vec![u64::MAX; slots];
    for i in n..i_end {
        let mut v = i * alpha + least_j(a, b, i) * beta;
        if v < start {
            v += (start - v).div_ceil(beta) * beta;
        }
        while v <= cap {
            let k = ((v - start) / g_prime) as usize;
            if witnesses[k] == u64::MAX {
                witnesses[k] = i;
            }
            v += beta;
        }
    }
    if let Some(k) = witnesses.iter().position(|&w| w == u64::MAX) {
        return Err(Error::CoverageViolation { value: start + k as u64 * g_prime, n });
    }
    Ok(CoverageCertificate { alpha, beta, n, g_prime, min_s, big_b, start, cap, i_end, witnesses })
}

/// Constants of the K-theory route for a space with the given connectivity and dimension.
#[derive(Debug, Clone)]
pub struct KTheoryParams {
    pub p: u64,
    pub gen: GeneratorSet,
    pub conn: u64,
    pub dim: u64,
    pub g: u64,
    pub g_prime: u64,
    /// `(dim+1)/(conn+1)`
    pub ratio: BigRational,
    pub a: BigRational,
    pub b: BigRational,
    pub big_b: BigRational,
    /// `θ` exactly as printed in the source's table of constants.
    pub theta: BigRational,
    /// `8(p−1)² − (2(p−1)(b+1) + B)/(g·ratio)`, the value the floor argument actually yields.
    pub theta_consistent: BigRational,
    pub tau_const: Real,
    pub profile: RootProfile,
}

impl KTheoryParams {
    /// `m_max` is the largest degree the caller will evaluate at.
    pub fn new(p: u64, gen: GeneratorSet, conn: u64, dim: u64, m_max: u64, min_bits: usize) -> Result<Self> {
        check_space(p, conn, dim, 1)?;
        let g = gen.g() as u64;
        let g_prime = gcd(g, 2 * (p - 1));
        let two_pm1 = int(2 * (p as i64 - 1));
        let ratio = rat(dim as i64 + 1, conn as i64 + 1);
        let a = int(g as i64) / &two_pm1 * (&ratio - int(1));
        let b = (&ratio * int(conn as i64 + 2) + int(1)) / &two_pm1;
        let pm1 = int(p as i64 - 1);
        let eight = int(8) * &pm1 * &pm1;
        let big_b = int(4) * &pm1 * &pm1 * (int(g as i64) + &a * (int(1) + &two_pm1)) + &two_pm1;
        let gr = int(g as i64) * &ratio;
        let theta = &eight - &two_pm1 * (&b + int(1) + &big_b) / &gr;
        let offset = &two_pm1 * (&b + int(1)) + &big_b;
        let theta_consistent = &eight - &offset / &gr;
        let profile = profile_for(&gen, m_max, min_bits)?;
        let prec = profile.precision_bits.max(profile.phi.precision());
        let exponent = -(int(g as i64) + &offset / &ratio);
        let tau_const = profile.phi.powf(&Real::from_rational(&exponent, prec));
        Ok(KTheoryParams {
            p,
            gen,
            conn,
            dim,
            g,
            g_prime,
            ratio,
            a,
            b,
            big_b,
            theta,
            theta_consistent,
            tau_const,
            profile,
        })
    }

    fn prec(&self) -> usize {
        self.profile.precision_bits.max(self.profile.phi.precision())
    }

    fn check_degree(&self, m: u64) -> Result<()> {
        if m == 0 || !m.is_multiple_of(self.g_prime) {
            return Err(invalid(format!("M = {m} is not a positive multiple of g' = {}", self.g_prime)));
        }
        Ok(())
    }

    /// Largest `n ≥ 0` with `M ≥ g·ratio·n + 2(p−1)(b+1) + B`, or `None` below threshold.
    pub fn n_of(&self, m: u64) -> Option<u64> {
        let offset = int(2 * (self.p as i64 - 1)) * (&self.b + int(1)) + &self.big_b;
        let x = (int(m as i64) - offset) / (int(self.g as i64) * &self.ratio);
        if x.is_negative() {
            None
        } else {
            x.floor().to_integer().to_u64()
        }
    }

    /// `φ^{M/ratio}`
    fn phi_to_scaled(&self, m: u64) -> Real {
        let e = int(m as i64) / &self.ratio;
        self.profile.phi.powf(&Real::from_rational(&e, self.prec()))
    }

    /// `τ/((1/g)(M/ratio) + θ)·φ^{M/ratio}` for the given `θ`.
    pub fn main_term_with(&self, m: u64, theta: &BigRational) -> Real {
        let denom = int(m as i64) / (&self.ratio * int(self.g as i64)) + theta;
        &self.tau_const / Real::from_rational(&denom, self.prec()) * self.phi_to_scaled(m)
    }

    /// Guaranteed lower bound on `Σ_t rank_{Z/p^t} π_M(ΣX)`.
    pub fn ktheory_lower(&self, m: u64) -> Result<KTheoryBound> {
        self.check_degree(m)?;
        let prec = self.prec();
        let Some(n) = self.n_of(m) else {
            return Ok(KTheoryBound {
                m,
                n: None,
                bound: Real::zero(prec),
                leading: Real::zero(prec),
                main_term: None,
            });
        };
        let width = 8 * (self.p - 1) * (self.p - 1);
        let phi = &self.profile.phi;
        let top = (n + width) * self.g;
        let leading = phi.powi(n * self.g) / Real::from_u64(n + width, prec);
        let err_phi = Real::from_u64(self.g, prec) * phi.sqrt().powi(top);
        let err_psi = Real::from_u64(self.gen.top_degree() as u64, prec)
            * (Real::from_u64(3, prec) + Real::from_u64(2, prec) * self.profile.psi_pow(top));
        let bound = &leading - err_phi - err_psi;
        let main_term = Some(self.main_term_with(m, &self.theta_consistent));
        Ok(KTheoryBound { m, n: Some(n), bound, leading, main_term })
    }

    /// `φ^{M/ratio} / M^{1+ε}`
    pub fn weak_lower(&self, m: u64, epsilon: &Real) -> Result<Real> {
        self.check_degree(m)?;
        if !epsilon.is_positive() {
            return Err(invalid("epsilon must be positive"));
        }
        let prec = self.prec();
        let mm = Real::from_u64(m, prec);
        Ok(self.phi_to_scaled(m) / mm.powf(&(Real::one(prec) + epsilon)))
    }

    /// Smallest `g′`-multiple `M₁ ≤ m_hi` such that the strong bound is positive on `[M₁, m_hi]`.
    pub fn positivity_threshold(&self, m_hi: u64) -> Result<Option<u64>> {
        let mut found = None;
        let mut m = m_hi - m_hi % self.g_prime;
        while m > 0 {
            if self.ktheory_lower(m)?.bound.is_positive() {
                found = Some(m);
            } else {
                break;
            }
            m -= self.g_prime;
        }
        Ok(found)
    }
}

#[derive(Debug, Clone)]
pub struct KTheoryBound {
    pub m: u64,
    /// `None` when `M` is below the first admissible degree.
    pub n: Option<u64>,
    pub bound: Real,
    /// `φ^{ng}/(n + 8(p−1)²)`
    pub leading: Real,
    /// `τ/((1/g)(M/ratio) + θ)·φ^{M/ratio}` with the consistent `θ`.
    pub main_term: Option<Real>,
}

impl KTheoryBound {
    pub fn below_threshold(&self) -> bool {
        self.n.is_none()
    }
}

/// Which result a report row's bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    RankWindow,
    /// `g ∤ N`, where the rank is exactly zero.
    ExactZero,
    HomologyBoundary,
    SigmaUpper,
    BBarLower,
    KTheoryStrong,
    KTheoryBelowThreshold,
    KTheoryWeak,
}

impl Theorem {
    pub fn tag(&self) -> &'static str {
        match self {
            Theorem::RankWindow => "rank-window",
            Theorem::ExactZero => "exact-zero",
            Theorem::HomologyBoundary => "homology-boundary",
            Theorem::SigmaUpper => "sigma-upper",
            Theorem::BBarLower => "bbar-lower",
            Theorem::KTheoryStrong => "ktheory-strong",
            Theorem::KTheoryBelowThreshold => "ktheory-below-threshold",
            Theorem::KTheoryWeak => "ktheory-weak",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub degree: u64,
    pub bound: Real,
    pub exact_rank: Option<BigInt>,
    pub theorem: Theorem,
    pub precision_bits: usize,
    /// Name/value pairs of the constants behind the bound.
    pub constants: Vec<(String, String)>,
}

impl BoundReport {
    pub fn vacuous(&self) -> bool {
        !self.bound.is_positive()
    }
}
