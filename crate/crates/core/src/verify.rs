//! Runtime invariant suites.
//!
//! Each suite re-derives a property from scratch and reports the first few
//! failures instead of panicking, so the command line can summarise them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{bezout_cover, HomologyBoundParams, KTheoryParams};
use crate::charpoly::{char_poly, newton_sums, profile_for, GeneratorSet, DEFAULT_MIN_PRECISION};
use crate::dgl_fp::{
    basis, subspace_dims_with, DglConfig, FreeLieFp, LetterDifferential, LieElement, WeightedAlphabet,
};
use crate::error::{invalid, Error, Result};
use crate::lie_rank::{babenko_ranks, pbw_ranks};
use crate::real::Real;
use crate::spaces::{lookup, report, Instance, SpaceKind, SpaceParams};

const MAX_REPORTED: usize = 5;
const SEED: u64 = 0x0074_6f72_7369_6f6e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Oracle,
    Basis,
    Differential,
    Cmn,
    Window,
    Newton,
    Boundary,
    Fq,
    Bezout,
    ClosedForms,
    Consistency,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Oracle,
        Suite::Basis,
        Suite::Differential,
        Suite::Cmn,
        Suite::Window,
        Suite::Newton,
        Suite::Boundary,
        Suite::Fq,
        Suite::Bezout,
        Suite::ClosedForms,
        Suite::Consistency,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Basis => "basis",
            Suite::Differential => "differential",
            Suite::Cmn => "cmn",
            Suite::Window => "window",
            Suite::Newton => "newton",
            Suite::Boundary => "boundary",
            Suite::Fq => "fq",
            Suite::Bezout => "bezout",
            Suite::ClosedForms => "closed-forms",
            Suite::Consistency => "consistency",
        }
    }

    pub fn run(&self) -> SuiteOutcome {
        let mut out = SuiteOutcome::new(*self);
        let result = match self {
            Suite::Oracle => oracle(&mut out),
            Suite::Basis => basis_sizes(&mut out),
            Suite::Differential => differential(&mut out),
            Suite::Cmn => cmn(&mut out),
            Suite::Window => window(&mut out),
            Suite::Newton => newton(&mut out),
            Suite::Boundary => boundary(&mut out),
            Suite::Fq => fq(&mut out),
            Suite::Bezout => bezout(&mut out),
            Suite::ClosedForms => closed_forms(&mut out),
            Suite::Consistency => consistency(&mut out),
        };
        if let Err(e) = result {
            out.error = Some(e);
        }
        out
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|suite| suite.key() == s).ok_or_else(|| invalid(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub checks: u64,
    pub failures: Vec<String>,
    pub failure_count: u64,
    /// Set when the suite could not finish.
    pub error: Option<Error>,
}

impl SuiteOutcome {
    fn new(suite: Suite) -> Self {
        SuiteOutcome { suite, checks: 0, failures: Vec::new(), failure_count: 0, error: None }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0 && self.error.is_none()
    }
}

/// Generator sets with at most `max_gens` generators in degrees `1..=max_degree`.
pub fn generator_family(max_gens: u32, max_degree: u32) -> Vec<GeneratorSet> {
    fn rec(start: u32, left: u32, max_degree: u32, cur: &mut Vec<u32>, out: &mut Vec<GeneratorSet>) {
        if !cur.is_empty() {
            let mut pairs: Vec<(u32, u32)> = Vec::new();
            for &d in cur.iter() {
                match pairs.last_mut() {
                    Some((q, m)) if *q == d => *m += 1,
                    _ => pairs.push((d, 1)),
                }
            }
            out.push(GeneratorSet::new(pairs).expect("valid family member"));
        }
        if left == 0 {
            return;
        }
        for d in start..=max_degree {
            cur.push(d);
            rec(d, left - 1, max_degree, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, max_gens, max_degree, &mut Vec::new(), &mut out);
    out
}

fn oracle(out: &mut SuiteOutcome) -> Result<()> {
    let results: Vec<(GeneratorSet, Result<bool>)> = generator_family(3, 5)
        .into_par_iter()
        .map(|gen| {
            let r = babenko_ranks(&gen, 40).and_then(|b| Ok(b == pbw_ranks(&gen, 40)?));
            (gen, r)
        })
        .collect();
    for (gen, r) in results {
        let ok = r?;
        out.check(ok, || format!("babenko and pbw ranks differ for {gen}"));
    }
    Ok(())
}

fn basis_sizes(out: &mut SuiteOutcome) -> Result<()> {
    for (q, p) in [(2, 3), (2, 5), (3, 3), (3, 5)] {
        let r = basis(&WeightedAlphabet::acyclic_pair(q)?, 14, p, DglConfig::default());
        out.check(r.is_ok(), || format!("q={q}, p={p}: {}", r.as_ref().unwrap_err()));
    }
    let odd = WeightedAlphabet::new(vec![("x".into(), 1), ("y".into(), 1)])?;
    let r = basis(&odd, 10, 3, DglConfig::default());
    out.check(r.is_ok(), || format!("two odd letters: {}", r.as_ref().unwrap_err()));
    Ok(())
}

/// `Σ_cyc (−1)^{|a||c|} [a,[b,c]]`
pub fn jacobiator(e: &FreeLieFp, a: &LieElement, b: &LieElement, c: &LieElement) -> Result<LieElement> {
    let p = e.p();
    let sign = |x: &LieElement, y: &LieElement| if x.degree() % 2 == 1 && y.degree() % 2 == 1 { p - 1 } else { 1 };
    let t1 = e.scale(&e.bracket(a, &e.bracket(b, c)?)?, sign(a, c));
    let t2 = e.scale(&e.bracket(b, &e.bracket(c, a)?)?, sign(b, a));
    let t3 = e.scale(&e.bracket(c, &e.bracket(a, b)?)?, sign(c, b));
    Ok(e.add(&e.add(&t1, &t2), &t3))
}

/// Random basis triples with total degree within the engine's range.
pub fn sample_triples(e: &FreeLieFp, count: usize, seed: u64) -> Vec<[usize; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = e.elements().len();
    let limit = e.built_degree();
    let mut triples = Vec::with_capacity(count);
    while triples.len() < count {
        let t = [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)];
        if t.iter().map(|&i| e.elements()[i].degree).sum::<u32>() <= limit {
            triples.push(t);
        }
    }
    triples
}

fn differential(out: &mut SuiteOutcome) -> Result<()> {
    let d = LetterDifferential::acyclic_pair();
    for (q, p) in [(2, 3), (2, 5), (3, 3), (3, 5)] {
        let e = basis(&WeightedAlphabet::acyclic_pair(q)?, 14, p, DglConfig::default())?;
        for idx in 0..e.elements().len() {
            let el = e.basis_element(idx);
            let dd = e.differential(&e.differential(&el, &d)?, &d)?;
            out.check(dd.is_zero(), || format!("q={q}, p={p}: d^2 {} != 0", e.format_basis(idx)));
        }
        for t in sample_triples(&e, 60, SEED ^ (q as u64 * 31 + p)) {
            let [a, b, c] = t.map(|i| e.basis_element(i));
            let j = jacobiator(&e, &a, &b, &c)?;
            out.check(j.is_zero(), || format!("q={q}, p={p}: Jacobi fails on {t:?}"));
        }
    }
    Ok(())
}

fn cmn(out: &mut SuiteOutcome) -> Result<()> {
    let d = LetterDifferential::acyclic_pair();
    let e = basis(&WeightedAlphabet::acyclic_pair(3)?, 12, 3, DglConfig::default())?;
    let x = e.letter(0)?;
    let tau = e.tau(&x, 1, 3, &d)?;
    out.check(tau.degree() == 11 && !tau.is_zero(), || format!("tau_1(x) has degree {}", tau.degree()));
    out.check(e.differential(&tau, &d)?.is_zero(), || "d tau_1(x) != 0".into());
    let sigma = e.sigma(&x, 1, 3, &d)?;
    out.check(sigma.degree() == 10 && !sigma.is_zero(), || format!("sigma_1(x) has degree {}", sigma.degree()));
    out.check(e.differential(&sigma, &d)?.is_zero(), || "d sigma_1(x) != 0".into());
    Ok(())
}

/// Family used by the window and Newton suites, always including a `g = 2` member.
fn analytic_family() -> Vec<GeneratorSet> {
    let mut family = generator_family(3, 5);
    let g2 = GeneratorSet::new(vec![(2, 1), (4, 1)]).expect("valid");
    if !family.contains(&g2) {
        family.push(g2);
    }
    family
}

fn window(out: &mut SuiteOutcome) -> Result<()> {
    let results: Vec<Result<Vec<(GeneratorSet, u64, bool)>>> = analytic_family()
        .into_par_iter()
        .map(|gen| {
            let profile = profile_for(&gen, 60, DEFAULT_MIN_PRECISION)?;
            let ranks = babenko_ranks(&gen, 60)?;
            let g = gen.g() as u64;
            let mut rows = Vec::new();
            for n in (g..=60).step_by(g as usize) {
                let w = crate::bounds::rank_window_with(&gen, &profile, n)?;
                let r = Real::from_bigint(&ranks[n as usize - 1], profile.precision_bits);
                rows.push((gen.clone(), n, w.contains(&r, 1e-6)));
            }
            Ok(rows)
        })
        .collect();
    for rows in results {
        for (gen, n, ok) in rows? {
            out.check(ok, || format!("{gen}: rank in degree {n} outside the window"));
        }
    }
    Ok(())
}

/// Both Newton-growth inequalities for `S_1..S_n_max`; returns failing degrees.
pub fn newton_growth_failures(gen: &GeneratorSet, n_max: u64) -> Result<Vec<u64>> {
    let poly = char_poly(gen);
    let profile = profile_for(gen, n_max, DEFAULT_MIN_PRECISION)?;
    let prec = profile.precision_bits.max(profile.phi.precision());
    let sums = newton_sums(&poly, n_max as usize);
    let g = gen.g() as u64;
    let others = Real::from_u64(poly.degree() as u64 - g, prec);
    let slack = Real::from_f64(1e-6, prec);
    let mut bad = Vec::new();
    for n in 1..=n_max {
        let s = Real::from_bigint(&sums[n as usize - 1], prec);
        let rhs = &others * profile.psi_pow(n);
        let lhs = if n % g == 0 { (Real::from_u64(g, prec) * profile.phi.powi(n) - s).abs() } else { s.abs() };
        if lhs > &rhs + &(&slack * (&rhs + Real::one(prec))) {
            bad.push(n);
        }
    }
    Ok(bad)
}

fn newton(out: &mut SuiteOutcome) -> Result<()> {
    let results: Vec<(GeneratorSet, Result<Vec<u64>>)> = analytic_family()
        .into_par_iter()
        .map(|gen| {
            let r = newton_growth_failures(&gen, 60);
            (gen, r)
        })
        .collect();
    for (gen, r) in results {
        let bad = r?;
        out.check(bad.is_empty(), || format!("{gen}: Newton growth fails at {bad:?}"));
    }
    Ok(())
}

fn boundary(out: &mut SuiteOutcome) -> Result<()> {
    let config = DglConfig { max_degree: 15 };
    for q in [2, 3] {
        let e = basis(&WeightedAlphabet::acyclic_pair(q)?, 15, 3, config)?;
        let dims = subspace_dims_with(&e, &LetterDifferential::acyclic_pair(), 14)?;
        let h = HomologyBoundParams::new(q, 3, 14, DEFAULT_MIN_PRECISION)?;
        for s in dims.iter().filter(|s| s.degree >= 2) {
            let lower = h.boundary_lower(s.degree as u64)?;
            let b = Real::from_u64(s.boundaries as u64, lower.precision());
            out.check(b >= lower, || format!("q={q}: B_{} = {} below {lower}", s.degree, s.boundaries));
        }
    }
    Ok(())
}

fn fq(out: &mut SuiteOutcome) -> Result<()> {
    for q in 2..=100u32 {
        let prec = DEFAULT_MIN_PRECISION;
        let profile = profile_for(&GeneratorSet::acyclic_pair(q)?, 1, prec)?;
        let phi = &profile.phi;
        let margin = Real::from_f64(1e-9, prec);
        let lower = Real::from_u64(2, prec).powf(&Real::from_ratio(&1.into(), &(q + 1).into(), prec));
        let upper = Real::one(prec) + Real::from_ratio(&1.into(), &q.into(), prec);
        out.check(&lower + &margin < *phi && *phi < &upper - &margin, || format!("q={q}: phi = {phi}"));
    }
    let eps = Real::from_f64(0.1, DEFAULT_MIN_PRECISION);
    for q in [2u32, 3, 4] {
        let h = HomologyBoundParams::new(q, 3, 400, DEFAULT_MIN_PRECISION)?;
        let threshold = h.asymptotic_threshold(&eps, 400)?;
        out.check(threshold.is_some(), || format!("q={q}: no threshold up to 400"));
        let scale = Real::one(h.phi.precision()) - &eps;
        for n in threshold.unwrap_or(401)..=400 {
            let f = h.f_q(n)?;
            let mid = &scale * h.asymptotic_main(n);
            let low = &scale * h.two_power_main(n);
            out.check(f >= mid && mid > low, || format!("q={q}: chain fails at N={n}"));
        }
    }
    Ok(())
}

/// The randomized Bezout tuples: `(α, β, a, b, n)` with a cap of `10·(min + B)`.
pub fn bezout_tuples(count: usize, seed: u64) -> Vec<(u64, u64, BigRational, BigRational, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let alpha = rng.gen_range(1..=12u64);
            let beta = rng.gen_range(1..=12u64);
            let den = rng.gen_range(1..=4i64);
            let a = BigRational::new(BigInt::from(rng.gen_range(1..=3 * den)), BigInt::from(den));
            let b = BigRational::new(BigInt::from(rng.gen_range(-10 * den..=10 * den)), BigInt::from(den));
            let n = rng.gen_range(0..=10u64);
            (alpha, beta, a, b, n)
        })
        .collect()
}

fn bezout(out: &mut SuiteOutcome) -> Result<()> {
    let mut tuples = bezout_tuples(100, SEED);
    tuples.push((3, 4, BigRational::new(1.into(), 2.into()), BigRational::from_integer(0.into()), 1));
    for (alpha, beta, a, b, n) in tuples {
        // a cap of zero yields the covering start without checking anything
        let probe = bezout_cover(alpha, beta, &a, &b, n, 0)?;
        let cap = 10 * probe.start;
        let r = bezout_cover(alpha, beta, &a, &b, n, cap);
        let ok = matches!(&r, Ok(c) if c.verify(&a, &b));
        out.check(ok, || format!("alpha={alpha}, beta={beta}, a={a}, b={b}, n={n}: {r:?}"));
    }
    Ok(())
}

fn closed_forms(out: &mut SuiteOutcome) -> Result<()> {
    let prec = DEFAULT_MIN_PRECISION;
    let half = crate::spaces::parse_decimal("0.5")?;
    let golden = (Real::from_u64(3, prec) + Real::from_u64(5, prec).sqrt()) / Real::from_u64(2, prec);
    let tol = Real::from_f64(1e-9, prec);
    let cases =
        [(SpaceKind::Grassmannian, 3u64, 1u64), (SpaceKind::Grassmannian, 5, 2), (SpaceKind::MilnorHypersurface, 2, 3)];
    for (kind, n, second) in cases {
        let params = match kind {
            SpaceKind::Grassmannian => SpaceParams { n: Some(n), k: Some(second), ..Default::default() },
            _ => SpaceParams { n: Some(n), l: Some(second), ..Default::default() },
        };
        let params = SpaceParams { p: Some(3), epsilon: Some(half.clone()), ..params };
        let Instance::KTheory { p, gen, conn, dim, epsilon } = lookup(kind).instantiate(&params)? else {
            return Err(Error::Internal("expected a K-theory instance".into()));
        };
        let k = KTheoryParams::new(p, gen, conn, dim, 1000, prec)?;
        let eps = Real::from_rational(&epsilon, prec);
        let denom = match kind {
            SpaceKind::Grassmannian => 2 * second * (n - second) + 1,
            _ => 2 * (n + second) - 1,
        };
        for m in 1..=500u64 {
            let weak = k.weak_lower(2 * m, &eps)?;
            let closed = golden.powf(&Real::from_ratio(&m.into(), &denom.into(), prec))
                / Real::from_u64(2 * m, prec).powf(&(Real::one(prec) + &eps));
            out.check(((&weak - &closed) / &closed).abs() < tol, || format!("{kind}: m={m}: {weak} vs {closed}"));
        }
    }
    let u = profile_for(lookup(SpaceKind::Unitary).generators.as_ref().expect("generators"), 1, prec)?;
    out.check(u.phi > Real::from_f64(1.19, prec), || format!("phi(z^5-z^2-1) = {}", u.phi));
    out.check(u.phi.powi(3) > Real::from_f64(1.70, prec), || format!("phi^3 = {}", u.phi.powi(3)));
    let gr = profile_for(lookup(SpaceKind::Grassmannian).generators.as_ref().expect("generators"), 1, prec)?;
    out.check(((gr.phi.powi(4) - &golden) / &golden).abs() < tol, || format!("phi^4 = {}", gr.phi.powi(4)));
    Ok(())
}

fn consistency(out: &mut SuiteOutcome) -> Result<()> {
    let moore = lookup(SpaceKind::Moore);
    let params = SpaceParams { q: Some(2), p: Some(3), r: Some(1), ..Default::default() };
    let degrees: Vec<u64> = (2..=14).collect();
    let rows = report(&moore, &params, &degrees)?;
    let e = basis(&WeightedAlphabet::acyclic_pair(2)?, 15, 3, DglConfig { max_degree: 15 })?;
    let dims = subspace_dims_with(&e, &LetterDifferential::acyclic_pair(), 14)?;
    for row in rows {
        let b = dims[row.degree as usize - 1].boundaries;
        let ok = row.bound <= Real::from_u64(b as u64, row.bound.precision());
        out.check(ok, || format!("N={}: report {} above B_N = {b}", row.degree, row.bound));
    }
    Ok(())
}

pub fn run_suites(suites: &[Suite]) -> Vec<SuiteOutcome> {
    suites.iter().map(Suite::run).collect()
}
