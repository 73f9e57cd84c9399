use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use torsion_bounds::bounds::{bezout_cover, rank_window_with, HomologyBoundParams, KTheoryParams};
use torsion_bounds::charpoly::{char_poly, newton_sums, profile_for, GeneratorSet, DEFAULT_MIN_PRECISION};
use torsion_bounds::dgl_fp::{basis, subspace_dims_with, DglConfig, LetterDifferential, WeightedAlphabet};
use torsion_bounds::lie_rank::{babenko_rank, babenko_ranks, pbw_ranks};
use torsion_bounds::real::Real;
use torsion_bounds::spaces::{lookup, parse_decimal, report, Instance, SpaceKind, SpaceParams};
use torsion_bounds::verify::{jacobiator, sample_triples};

const PREC: usize = DEFAULT_MIN_PRECISION;

type Check = Result<String, String>;

/// Name, check, wall-clock limit in seconds.
type Criterion = (&'static str, fn() -> Check, Option<u64>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: torsion_bounds::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn real(x: f64) -> Real {
    Real::from_f64(x, PREC)
}

/// All multisets of at most three degrees in 1..=5.
fn family() -> Vec<GeneratorSet> {
    let mut out = Vec::new();
    for a in 1..=5u32 {
        out.push(vec![a]);
        for b in a..=5 {
            out.push(vec![a, b]);
            for c in b..=5 {
                out.push(vec![a, b, c]);
            }
        }
    }
    out.into_iter()
        .map(|degs| {
            let mut pairs: Vec<(u32, u32)> = Vec::new();
            for d in degs {
                match pairs.last_mut() {
                    Some((q, m)) if *q == d => *m += 1,
                    _ => pairs.push((d, 1)),
                }
            }
            GeneratorSet::new(pairs).unwrap()
        })
        .collect()
}

fn analytic_family() -> Vec<GeneratorSet> {
    let mut f = family();
    f.push(GeneratorSet::new(vec![(2, 1), (4, 1)]).unwrap());
    f
}

fn mobius(n: u64) -> i64 {
    let (mut n, mut sign, mut d) = (n, 1i64, 2u64);
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if n > 1 {
        -sign
    } else {
        sign
    }
}

/// Necklace count: the rank of the free Lie algebra on `m` even generators in word length `n`.
fn witt(m: u64, n: u64) -> BigInt {
    let total: BigInt = (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| BigInt::from(mobius(d)) * BigInt::from(m).pow((n / d) as u32))
        .sum();
    total / BigInt::from(n)
}

fn oracle_equivalence() -> Check {
    let fam = family();
    let bad: Vec<String> = fam
        .par_iter()
        .filter_map(|g| match (babenko_ranks(g, 40), pbw_ranks(g, 40)) {
            (Ok(a), Ok(b)) if a == b => None,
            (a, b) => Some(format!("{g}: {:?} vs {:?}", a.map(|v| v.len()), b.map(|v| v.len()))),
        })
        .collect();
    ensure(bad.is_empty(), || format!("{} sets disagree, first {}", bad.len(), bad[0]))?;
    for m in 1..=3u64 {
        let gen = GeneratorSet::new(vec![(2, m as u32)]).unwrap();
        let ranks = lib(babenko_ranks(&gen, 40))?;
        for n in 1..=20u64 {
            ensure(ranks[(2 * n - 1) as usize] == witt(m, n), || format!("{m} even generators, length {n}"))?;
        }
    }
    Ok(format!("{} generator sets, N <= 40", fam.len()))
}

fn basis_certification() -> Check {
    let mut count = 0;
    for q in [2u32, 3] {
        for p in [3u64, 5] {
            let alphabet = lib(WeightedAlphabet::acyclic_pair(q))?;
            let e = lib(basis(&alphabet, 14, p, DglConfig::default()))?;
            let gen = alphabet.generator_set();
            for n in 1..=14u32 {
                let r = lib(babenko_rank(&gen, n as u64))?;
                ensure(BigInt::from(e.dim(n)) == r, || format!("q={q}, p={p}, n={n}: {} vs {r}", e.dim(n)))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} degree sizes"))
}

fn differential_soundness() -> Check {
    let d = LetterDifferential::acyclic_pair();
    let (mut elements, mut triples) = (0, 0);
    for (q, p) in [(2u32, 3u64), (2, 5), (3, 3), (3, 5)] {
        let e = lib(basis(&lib(WeightedAlphabet::acyclic_pair(q))?, 14, p, DglConfig::default()))?;
        for idx in 0..e.elements().len() {
            let el = e.basis_element(idx);
            let dd = lib(e.differential(&lib(e.differential(&el, &d))?, &d))?;
            ensure(dd.is_zero(), || format!("q={q}, p={p}: d^2 {} != 0", e.format_basis(idx)))?;
            elements += 1;
        }
        for t in sample_triples(&e, 60, 7 + q as u64 * 100 + p) {
            let [a, b, c] = t.map(|i| e.basis_element(i));
            ensure(lib(jacobiator(&e, &a, &b, &c))?.is_zero(), || format!("q={q}, p={p}: Jacobi fails on {t:?}"))?;
            triples += 1;
        }
    }
    ensure(triples >= 200, || format!("only {triples} triples"))?;
    Ok(format!("d^2 on {elements} elements, Jacobi on {triples} triples"))
}

fn cmn_cycles() -> Check {
    let d = LetterDifferential::acyclic_pair();
    let e = lib(basis(&lib(WeightedAlphabet::acyclic_pair(3))?, 12, 3, DglConfig::default()))?;
    let x = lib(e.letter(0))?;
    ensure(x.degree() == 4, || format!("x has degree {}", x.degree()))?;
    let tau = lib(e.tau(&x, 1, 3, &d))?;
    let sigma = lib(e.sigma(&x, 1, 3, &d))?;
    ensure(tau.degree() == 11 && !tau.is_zero(), || format!("tau_1(x) in degree {}", tau.degree()))?;
    ensure(sigma.degree() == 10 && !sigma.is_zero(), || format!("sigma_1(x) in degree {}", sigma.degree()))?;
    ensure(lib(e.differential(&tau, &d))?.is_zero(), || "d tau_1(x) != 0".into())?;
    ensure(lib(e.differential(&sigma, &d))?.is_zero(), || "d sigma_1(x) != 0".into())?;
    Ok("tau_1(x) in degree 11, sigma_1(x) in degree 10".into())
}

fn rank_window() -> Check {
    let fam = analytic_family();
    let counts: Vec<Result<usize, String>> = fam
        .par_iter()
        .map(|gen| {
            let profile = lib(profile_for(gen, 60, PREC))?;
            let ranks = lib(babenko_ranks(gen, 60))?;
            let g = gen.g() as u64;
            let mut n_checked = 0;
            for n in 1..=60u64 {
                if n % g != 0 {
                    ensure(ranks[n as usize - 1] == BigInt::from(0), || {
                        format!("{gen}: nonzero rank off g in degree {n}")
                    })?;
                    continue;
                }
                let w = lib(rank_window_with(gen, &profile, n))?;
                let r = Real::from_bigint(&ranks[n as usize - 1], profile.precision_bits);
                ensure(w.contains(&r, 1e-6), || format!("{gen}: N={n}, rank {r} outside [{}, {}]", w.lower, w.upper))?;
                n_checked += 1;
            }
            Ok(n_checked)
        })
        .collect();
    let mut total = 0;
    for c in counts {
        total += c?;
    }
    Ok(format!("{total} ranks in {} sets", fam.len()))
}

/// Power sums from the Newton identities, coefficients stored from `z^0`.
fn power_sums(coeffs: &[BigInt], n_max: usize) -> Vec<BigInt> {
    let k = coeffs.len() - 1;
    let a = |i: usize| if i <= k { coeffs[k - i].clone() } else { BigInt::from(0) };
    let mut s: Vec<BigInt> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut v = BigInt::from(n as u64) * a(n);
        for i in 1..n.min(k + 1) {
            v += a(i) * &s[n - i - 1];
        }
        s.push(-v);
    }
    s
}

fn newton_growth() -> Check {
    let fam = analytic_family();
    let results: Vec<Result<(), String>> = fam
        .par_iter()
        .map(|gen| {
            let poly = char_poly(gen);
            let sums = power_sums(poly.coeffs(), 60);
            ensure(sums == newton_sums(&poly, 60), || format!("{gen}: power sums differ"))?;
            let profile = lib(profile_for(gen, 60, PREC))?;
            let prec = profile.precision_bits;
            let g = gen.g() as u64;
            let others = Real::from_u64(poly.degree() as u64 - g, prec);
            let psi = profile.psi_abs.clone().unwrap_or_else(|| Real::zero(prec));
            let slack = Real::from_f64(1e-6, prec);
            for n in 1..=60u64 {
                let s = Real::from_bigint(&sums[n as usize - 1], prec);
                let rhs = &others * psi.powi(n);
                let lhs = if n % g == 0 { (Real::from_u64(g, prec) * profile.phi.powi(n) - s).abs() } else { s.abs() };
                ensure(lhs <= &rhs + &(&slack * (&rhs + Real::one(prec))), || format!("{gen}: N={n}"))?;
            }
            Ok(())
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(format!("{} sets including {{(2,1),(4,1)}}, N <= 60", fam.len()))
}

fn boundary_bound() -> Check {
    let mut count = 0;
    for q in [2u32, 3] {
        let e = lib(basis(&lib(WeightedAlphabet::acyclic_pair(q))?, 15, 3, DglConfig { max_degree: 15 }))?;
        let dims = lib(subspace_dims_with(&e, &LetterDifferential::acyclic_pair(), 14))?;
        let h = lib(HomologyBoundParams::new(q, 3, 14, PREC))?;
        for n in 2..=14usize {
            let s = &dims[n - 1];
            if let Some(above) = dims.get(n) {
                ensure(above.dim == above.cycles + s.boundaries, || format!("q={q}: rank-nullity fails at {n}"))?;
            }
            let lower = lib(h.boundary_lower(n as u64))?;
            ensure(Real::from_u64(s.boundaries as u64, lower.precision()) >= lower, || {
                format!("q={q}: B_{n} = {} below {lower}", s.boundaries)
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} degrees, all bounds vacuous (negative)"))
}

/// Sign of the characteristic polynomial of `{x: q+1, y: q}` in double precision.
fn acyclic_sign(q: u32, z: f64) -> f64 {
    (z.powi(q as i32 + 1) - z - 1.0).signum()
}

fn fq_properties() -> Check {
    for q in 2..=100u32 {
        let phi = lib(profile_for(&lib(GeneratorSet::acyclic_pair(q))?, 1, PREC))?.phi;
        let lo = 2f64.powf(1.0 / (q as f64 + 1.0));
        let hi = 1.0 + 1.0 / q as f64;
        ensure(real(lo + 1e-9) < phi && phi < real(hi - 1e-9), || format!("q={q}: phi = {phi}"))?;
        ensure(acyclic_sign(q, lo) < 0.0 && acyclic_sign(q, hi) > 0.0, || format!("q={q}: bracket signs"))?;
    }
    let eps = real(0.1);
    let mut found = Vec::new();
    for (q, expected) in [(2u32, 118u64), (3, 179), (4, 244)] {
        let h = lib(HomologyBoundParams::new(q, 3, 400, PREC))?;
        let n0 = lib(h.asymptotic_threshold(&eps, 400))?.ok_or(format!("q={q}: no threshold up to 400"))?;
        ensure(n0 == expected, || format!("q={q}: N0 = {n0}, expected {expected}"))?;
        let scale = Real::one(h.precision_bits()) - &eps;
        for n in n0..=400 {
            let f = lib(h.f_q(n))?;
            let mid = &scale * h.asymptotic_main(n);
            let low = &scale * h.two_power_main(n);
            ensure(f >= mid && mid > low, || format!("q={q}: chain fails at N={n}"))?;
        }
        found.push(format!("q={q}: N0={n0}"));
    }
    Ok(format!("phi bracket for q <= 100; {}", found.join(", ")))
}

fn in_some_s(v: u64, alpha: u64, beta: u64, a: &BigRational, b: &BigRational, n: u64) -> bool {
    let i_end = n + beta * (beta + 1);
    (n..i_end).any(|i| {
        v >= i * alpha && (v - i * alpha).is_multiple_of(beta) && {
            let j = BigRational::from_integer(BigInt::from((v - i * alpha) / beta));
            j > a * BigRational::from_integer(BigInt::from(i)) + b
        }
    })
}

fn bezout_tuples(count: usize) -> Vec<(u64, u64, BigRational, BigRational, u64)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xbe20);
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    (0..count)
        .map(|_| {
            let den = rng.gen_range(1..=4i64);
            (
                rng.gen_range(1..=12),
                rng.gen_range(1..=12),
                r(rng.gen_range(1..=3 * den), den),
                r(rng.gen_range(-10 * den..=10 * den), den),
                rng.gen_range(0..=10),
            )
        })
        .collect()
}

fn bezout_coverage() -> Check {
    let mut tuples = bezout_tuples(100);
    tuples.push((3, 4, BigRational::new(1.into(), 2.into()), BigRational::from_integer(0.into()), 1));
    let mut values = 0usize;
    for (alpha, beta, a, b, n) in &tuples {
        let probe = lib(bezout_cover(*alpha, *beta, a, b, *n, 0))?;
        let cap = 10 * probe.start.max(1);
        let cert = lib(bezout_cover(*alpha, *beta, a, b, *n, cap))?;
        let g = cert.g_prime;
        ensure(g == num_integer_gcd(*alpha, *beta), || format!("g' = {g} for {alpha}, {beta}"))?;
        ensure(cert.verify(a, b), || format!("certificate for {alpha},{beta},{a},{b},{n} rejected"))?;
        for v in (cert.start..=cap).filter(|v| v % g == 0) {
            ensure(in_some_s(v, *alpha, *beta, a, b, *n), || format!("{v} uncovered for {alpha},{beta},{a},{b},{n}"))?;
            values += 1;
        }
    }
    Ok(format!("{} tuples, {values} values brute-forced", tuples.len()))
}

fn num_integer_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn closed_forms() -> Check {
    let golden = (Real::from_u64(3, PREC) + Real::from_u64(5, PREC).sqrt()) / Real::from_u64(2, PREC);
    let tol = real(1e-9);
    let half = lib(parse_decimal("0.5"))?;
    let cases =
        [(SpaceKind::Grassmannian, 3u64, 1u64), (SpaceKind::Grassmannian, 5, 2), (SpaceKind::MilnorHypersurface, 2, 3)];
    for (kind, n, second) in cases {
        let base = SpaceParams { p: Some(3), n: Some(n), epsilon: Some(half.clone()), ..Default::default() };
        let (params, denom) = match kind {
            SpaceKind::Grassmannian => (SpaceParams { k: Some(second), ..base }, 2 * second * (n - second) + 1),
            _ => (SpaceParams { l: Some(second), ..base }, 2 * (n + second) - 1),
        };
        let Instance::KTheory { p, gen, conn, dim, .. } = lib(lookup(kind).instantiate(&params))? else {
            return Err(format!("{kind}: not a K-theory space"));
        };
        let k = lib(KTheoryParams::new(p, gen, conn, dim, 1000, PREC))?;
        let eps = real(0.5);
        for m in 1..=500u64 {
            let weak = lib(k.weak_lower(2 * m, &eps))?;
            let closed = golden.powf(&Real::from_ratio(&m.into(), &denom.into(), PREC))
                / Real::from_u64(2 * m, PREC).powf(&real(1.5));
            ensure(((&weak - &closed) / &closed).abs() < tol, || format!("{kind} n={n}: m={m}: {weak} vs {closed}"))?;
        }
    }
    let u = lib(profile_for(&GeneratorSet::new(vec![(3, 1), (5, 1)]).unwrap(), 1, PREC))?.phi;
    ensure(u.to_f64() > 1.19, || format!("phi(z^5-z^2-1) = {u}"))?;
    ensure(u.powi(3).to_f64() > 1.70, || format!("phi^3 = {}", u.powi(3)))?;
    let gr = lib(profile_for(&GeneratorSet::new(vec![(2, 1), (4, 1)]).unwrap(), 1, PREC))?.phi;
    ensure(((gr.powi(4) - &golden) / &golden).abs() < tol, || format!("phi^4 = {}", gr.powi(4)))?;
    Ok(format!("weak bounds for 3 spaces, m <= 500; phi(z^5-z^2-1) = {}", u.to_decimal_string(12)))
}

fn consistency() -> Check {
    let params = SpaceParams { q: Some(2), p: Some(3), r: Some(1), ..Default::default() };
    let degrees: Vec<u64> = (2..=14).collect();
    let rows = lib(report(&lookup(SpaceKind::Moore), &params, &degrees))?;
    ensure(rows.len() == degrees.len(), || format!("{} rows", rows.len()))?;
    let e = lib(basis(&lib(WeightedAlphabet::acyclic_pair(2))?, 15, 3, DglConfig { max_degree: 15 }))?;
    let dims = lib(subspace_dims_with(&e, &LetterDifferential::acyclic_pair(), 14))?;
    for row in &rows {
        let b = dims[row.degree as usize - 1].boundaries;
        ensure(row.bound <= Real::from_u64(b as u64, row.bound.precision()), || {
            format!("N={}: {} > B_N = {b}", row.degree, row.bound)
        })?;
    }
    Ok(format!("{} report rows below brute-force B_N", rows.len()))
}

fn run_cli(args: &[&str], threads: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_torsion-bounds"));
    cmd.args(args).env_remove("TORSION_BOUNDS_PRECISION");
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} exited with {}", out.status))?;
    Ok(out.stdout)
}

fn determinism() -> Check {
    let invocations: [&[&str]; 4] = [
        &["report", "--space", "moore", "--q", "2", "--p", "3", "--r", "1", "--upto", "60"],
        &["report", "--space", "unitary", "--p", "3", "--n", "3", "--upto", "120", "--format", "csv"],
        &["lie-rank", "--degrees", "2:1,3:1", "--upto", "60"],
        &["lie-rank", "--degrees", "2:1,4:1", "--upto", "40", "--format", "json"],
    ];
    for args in invocations {
        let first = run_cli(args, None)?;
        let second = run_cli(args, None)?;
        let serial = run_cli(args, Some("1"))?;
        ensure(!first.is_empty(), || format!("{args:?}: empty output"))?;
        ensure(first == second && first == serial, || format!("{args:?}: outputs differ"))?;
    }
    Ok(format!("{} invocations, 3 runs each", invocations.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("oracle equivalence", oracle_equivalence, Some(10)),
        ("basis certification", basis_certification, Some(60)),
        ("differential soundness", differential_soundness, Some(60)),
        ("CMN cycle property", cmn_cycles, None),
        ("rank window", rank_window, None),
        ("Newton growth", newton_growth, None),
        ("boundary bound", boundary_bound, None),
        ("f_q properties", fq_properties, None),
        ("Bezout coverage", bezout_coverage, Some(30)),
        ("closed forms", closed_forms, None),
        ("report vs brute force", consistency, None),
        ("determinism", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(s)) if elapsed > Duration::from_secs(s) => Err(format!("took {elapsed:.1?}, limit {s} s")),
            (o, _) => o,
        };
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {:<24} {status}  {:>8.2?}  {detail}", i + 1, name, elapsed);
    }
    println!("{}/12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
