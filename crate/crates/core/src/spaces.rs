//! Example spaces and their guaranteed torsion lower-bound tables.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::bounds::{BoundReport, ConditionReading, HomologyBoundParams, KTheoryParams, Theorem};
use crate::charpoly::{GeneratorSet, DEFAULT_MIN_PRECISION};
use crate::combinat::is_odd_prime;
use crate::error::{invalid, Error, Result};
use crate::real::{Real, OUTPUT_DIGITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Moore space `P^{q+1}(p^r)`.
    Moore,
    /// `ΣK(Z/p^r, q−1)`.
    SuspendedEilenbergMacLane,
    /// `ΣGr_k(C^n)`.
    Grassmannian,
    /// `ΣH_{n,ℓ}`, Milnor hypersurface.
    MilnorHypersurface,
    /// `ΣU(n)`.
    Unitary,
    /// `ΣSU(n)`.
    SpecialUnitary,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 6] = [
        SpaceKind::Moore,
        SpaceKind::SuspendedEilenbergMacLane,
        SpaceKind::Grassmannian,
        SpaceKind::MilnorHypersurface,
        SpaceKind::Unitary,
        SpaceKind::SpecialUnitary,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            SpaceKind::Moore => "moore",
            SpaceKind::SuspendedEilenbergMacLane => "eilenberg-maclane",
            SpaceKind::Grassmannian => "grassmannian",
            SpaceKind::MilnorHypersurface => "milnor",
            SpaceKind::Unitary => "unitary",
            SpaceKind::SpecialUnitary => "special-unitary",
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let kind = match s.as_str() {
            "moore" => SpaceKind::Moore,
            "eilenberg-maclane" | "em" | "k" => SpaceKind::SuspendedEilenbergMacLane,
            "grassmannian" | "gr" => SpaceKind::Grassmannian,
            "milnor" | "h" => SpaceKind::MilnorHypersurface,
            "unitary" | "u" => SpaceKind::Unitary,
            "special-unitary" | "su" => SpaceKind::SpecialUnitary,
            _ => return Err(invalid(format!("unknown space '{s}'"))),
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Homology,
    KTheory,
}

/// One catalog family. Connectivity and dimension may depend on the family parameters.
#[derive(Debug, Clone)]
pub struct SpaceEntry {
    pub kind: SpaceKind,
    pub name: &'static str,
    pub route: Route,
    /// Sphere-wedge generators for the K-theory route.
    pub generators: Option<GeneratorSet>,
    /// Parameter names the family needs.
    pub parameters: &'static [&'static str],
    pub note: &'static str,
}

pub fn catalog() -> Vec<SpaceEntry> {
    let s3s5 = GeneratorSet::new(vec![(2, 1), (4, 1)]).expect("valid");
    let s4s6 = GeneratorSet::new(vec![(3, 1), (5, 1)]).expect("valid");
    vec![
        SpaceEntry {
            kind: SpaceKind::Moore,
            name: "P^{q+1}(p^r)",
            route: Route::Homology,
            generators: None,
            parameters: &["q", "p", "r"],
            note: "rank_{Z/p^r} pi_{N+1} >= f_q(N)",
        },
        SpaceEntry {
            kind: SpaceKind::SuspendedEilenbergMacLane,
            name: "Sigma K(Z/p^r, q-1)",
            route: Route::Homology,
            generators: None,
            parameters: &["q", "p", "r"],
            note: "rank_{Z/p^r} pi_N >= f_q(N)",
        },
        SpaceEntry {
            kind: SpaceKind::Grassmannian,
            name: "Sigma Gr_k(C^n)",
            route: Route::KTheory,
            generators: Some(s3s5.clone()),
            parameters: &["n", "k", "p", "epsilon"],
            note: "S^3 v S^5 -> Sigma Gr_k(C^n); conn 1, dim 2k(n-k); n >= 3, 0 < k < n",
        },
        SpaceEntry {
            kind: SpaceKind::MilnorHypersurface,
            name: "Sigma H_{n,l}",
            route: Route::KTheory,
            generators: Some(s3s5),
            parameters: &["n", "l", "p", "epsilon"],
            note: "S^3 v S^5 -> Sigma H_{n,l}; conn 1, dim 2(n+l-1); n >= 2, l >= 3",
        },
        SpaceEntry {
            kind: SpaceKind::Unitary,
            name: "Sigma U(n)",
            route: Route::KTheory,
            generators: Some(s4s6.clone()),
            parameters: &["n", "p", "epsilon"],
            note: "S^3 v S^5 -> U(n); conn 0, dim n^2; n >= 3",
        },
        SpaceEntry {
            kind: SpaceKind::SpecialUnitary,
            name: "Sigma SU(n)",
            route: Route::KTheory,
            generators: Some(s4s6),
            parameters: &["n", "p", "epsilon"],
            note: "S^3 v S^5 -> SU(n); conn 2, dim n^2 - 1; n >= 3",
        },
    ]
}

pub fn lookup(kind: SpaceKind) -> SpaceEntry {
    catalog().into_iter().find(|s| s.kind == kind).expect("every kind is catalogued")
}

/// Values for a family's parameters; unused ones stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpaceParams {
    pub q: Option<u32>,
    pub p: Option<u64>,
    pub r: Option<u32>,
    pub n: Option<u64>,
    pub k: Option<u64>,
    pub l: Option<u64>,
    pub epsilon: Option<BigRational>,
}

/// Parses a plain decimal such as `0.1`, `2`, or `-1.25` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || invalid(format!("'{s}' is not a decimal number"));
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    let v = BigRational::new(num, den);
    Ok(if neg { -v } else { v })
}

/// A catalog family with its parameters fixed.
#[derive(Debug, Clone)]
pub enum Instance {
    Homology {
        q: u32,
        p: u64,
        r: u32,
        /// Homotopy degree minus `N` for the row at `N`.
        shift: u64,
    },
    KTheory {
        p: u64,
        gen: GeneratorSet,
        conn: u64,
        dim: u64,
        epsilon: BigRational,
    },
}

fn need<T: Clone>(v: &Option<T>, name: &str, kind: SpaceKind) -> Result<T> {
    v.clone().ok_or_else(|| Error::ParameterMismatch(format!("{kind} needs parameter {name}")))
}

fn mismatch(msg: String) -> Error {
    Error::ParameterMismatch(msg)
}

impl SpaceEntry {
    pub fn instantiate(&self, params: &SpaceParams) -> Result<Instance> {
        let kind = self.kind;
        let used: Vec<&str> = [
            ("q", params.q.is_some()),
            ("p", params.p.is_some()),
            ("r", params.r.is_some()),
            ("n", params.n.is_some()),
            ("k", params.k.is_some()),
            ("l", params.l.is_some()),
            ("epsilon", params.epsilon.is_some()),
        ]
        .into_iter()
        .filter(|(_, set)| *set)
        .map(|(name, _)| name)
        .collect();
        if let Some(extra) = used.iter().find(|name| !self.parameters.contains(name)) {
            return Err(mismatch(format!("{kind} does not take parameter {extra}")));
        }
        let p = need(&params.p, "p", kind)?;
        if !is_odd_prime(p) {
            return Err(mismatch(format!("p = {p} is not an odd prime")));
        }
        match self.route {
            Route::Homology => {
                let q = need(&params.q, "q", kind)?;
                let r = need(&params.r, "r", kind)?;
                if q < 2 {
                    return Err(mismatch(format!("q = {q} must be at least 2")));
                }
                if r < 1 {
                    return Err(mismatch("r must be at least 1".into()));
                }
                let shift = if kind == SpaceKind::Moore { 1 } else { 0 };
                Ok(Instance::Homology { q, p, r, shift })
            }
            Route::KTheory => {
                let epsilon = need(&params.epsilon, "epsilon", kind)?;
                if !epsilon.is_positive() {
                    return Err(mismatch("epsilon must be positive".into()));
                }
                let n = need(&params.n, "n", kind)?;
                let (conn, dim) = match kind {
                    SpaceKind::Grassmannian => {
                        let k = need(&params.k, "k", kind)?;
                        if n < 3 || k == 0 || k >= n {
                            return Err(mismatch(format!("Gr_k(C^n) needs n >= 3 and 0 < k < n, got n={n}, k={k}")));
                        }
                        (1, 2 * k * (n - k))
                    }
                    SpaceKind::MilnorHypersurface => {
                        let l = need(&params.l, "l", kind)?;
                        if n < 2 || l < 3 {
                            return Err(mismatch(format!("H_(n,l) needs n >= 2 and l >= 3, got n={n}, l={l}")));
                        }
                        (1, 2 * (n + l - 1))
                    }
                    SpaceKind::Unitary | SpaceKind::SpecialUnitary => {
                        if n < 3 {
                            return Err(mismatch(format!("n = {n} must be at least 3")));
                        }
                        if kind == SpaceKind::Unitary {
                            (0, n * n)
                        } else {
                            (2, n * n - 1)
                        }
                    }
                    SpaceKind::Moore | SpaceKind::SuspendedEilenbergMacLane => unreachable!("homology route"),
                };
                let gen = self.generators.clone().expect("K-theory entries carry generators");
                Ok(Instance::KTheory { p, gen, conn, dim, epsilon })
            }
        }
    }
}

impl Instance {
    /// Step between admissible report degrees.
    pub fn degree_step(&self) -> u64 {
        match self {
            Instance::Homology { .. } => 1,
            Instance::KTheory { p, gen, .. } => crate::combinat::gcd(gen.g() as u64, 2 * (p - 1)),
        }
    }

    /// Smallest admissible report degree.
    pub fn first_degree(&self) -> u64 {
        match self {
            Instance::Homology { .. } => 2,
            Instance::KTheory { .. } => self.degree_step(),
        }
    }

    /// Admissible degrees in `lo..=hi`, ascending.
    pub fn degrees_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        let step = self.degree_step();
        let first = lo.max(self.first_degree()).div_ceil(step) * step;
        (first..=hi).step_by(step as usize).collect()
    }
}

fn fmt_real(x: &Real) -> String {
    x.to_decimal_string(OUTPUT_DIGITS)
}

fn fmt_rat(x: &BigRational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Bound rows for `degrees` in ascending order; K-theory instances give a strong and a weak row per degree.
pub fn report(space: &SpaceEntry, params: &SpaceParams, degrees: &[u64]) -> Result<Vec<BoundReport>> {
    report_with_precision(space, params, degrees, DEFAULT_MIN_PRECISION)
}

pub fn report_with_precision(
    space: &SpaceEntry,
    params: &SpaceParams,
    degrees: &[u64],
    min_bits: usize,
) -> Result<Vec<BoundReport>> {
    let instance = space.instantiate(params)?;
    if degrees.is_empty() {
        return Ok(Vec::new());
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(mismatch("report degrees must be strictly increasing".into()));
    }
    let top = *degrees.last().expect("non-empty");
    match instance {
        Instance::Homology { q, p, r, shift } => {
            if degrees[0] < 2 {
                return Err(mismatch("homology rows start at N = 2".into()));
            }
            let h = HomologyBoundParams::new(q, p, top, min_bits)?;
            let shared = vec![
                ("q".to_string(), q.to_string()),
                ("p".to_string(), p.to_string()),
                ("r".to_string(), r.to_string()),
                ("s".to_string(), r.to_string()),
                ("phi".to_string(), fmt_real(&h.phi)),
                ("psi_abs".to_string(), fmt_real(&h.psi_abs)),
                ("c".to_string(), fmt_real(&h.c)),
                ("kappa".to_string(), fmt_real(&h.kappa)),
            ];
            degrees
                .par_iter()
                .map(|&n| {
                    let mut constants = shared.clone();
                    constants.push(("homotopy_degree".to_string(), (n + shift).to_string()));
                    Ok(BoundReport {
                        degree: n,
                        bound: h.f_q(n)?,
                        exact_rank: None,
                        theorem: Theorem::HomologyBoundary,
                        precision_bits: h.precision_bits(),
                        constants,
                    })
                })
                .collect()
        }
        Instance::KTheory { p, gen, conn, dim, epsilon } => {
            let k = KTheoryParams::new(p, gen, conn, dim, top, min_bits)?;
            if let Some(bad) = degrees.iter().find(|&&m| m == 0 || m % k.g_prime != 0) {
                return Err(mismatch(format!("degree {bad} is not a positive multiple of g' = {}", k.g_prime)));
            }
            let prec = k.profile.precision_bits;
            let eps = Real::from_rational(&epsilon, prec);
            let shared = vec![
                ("p".to_string(), p.to_string()),
                ("conn".to_string(), conn.to_string()),
                ("dim".to_string(), dim.to_string()),
                ("g".to_string(), k.g.to_string()),
                ("g_prime".to_string(), k.g_prime.to_string()),
                ("phi".to_string(), fmt_real(&k.profile.phi)),
                ("a".to_string(), fmt_rat(&k.a)),
                ("b".to_string(), fmt_rat(&k.b)),
                ("B".to_string(), fmt_rat(&k.big_b)),
                ("theta".to_string(), fmt_rat(&k.theta)),
                ("theta_consistent".to_string(), fmt_rat(&k.theta_consistent)),
                ("tau".to_string(), fmt_real(&k.tau_const)),
                ("condition_star".to_string(), ConditionReading::PlusOne.to_string()),
            ];
            let pairs: Vec<Result<[BoundReport; 2]>> = degrees
                .par_iter()
                .map(|&m| {
                    let strong = k.ktheory_lower(m)?;
                    let mut constants = shared.clone();
                    match strong.n {
                        Some(n) => constants.push(("n".to_string(), n.to_string())),
                        None => constants.push(("n".to_string(), "below-threshold".to_string())),
                    }
                    if let Some(main) = &strong.main_term {
                        constants.push(("main_term".to_string(), fmt_real(main)));
                    }
                    let theorem =
                        if strong.below_threshold() { Theorem::KTheoryBelowThreshold } else { Theorem::KTheoryStrong };
                    let strong_row = BoundReport {
                        degree: m,
                        bound: strong.bound,
                        exact_rank: None,
                        theorem,
                        precision_bits: prec,
                        constants,
                    };
                    let mut weak_constants = shared.clone();
                    weak_constants.push(("epsilon".to_string(), fmt_rat(&epsilon)));
                    let weak_row = BoundReport {
                        degree: m,
                        bound: k.weak_lower(m, &eps)?,
                        exact_rank: None,
                        theorem: Theorem::KTheoryWeak,
                        precision_bits: prec,
                        constants: weak_constants,
                    };
                    Ok([strong_row, weak_row])
                })
                .collect();
            let mut rows = Vec::with_capacity(2 * degrees.len());
            for pair in pairs {
                rows.extend(pair?);
            }
            Ok(rows)
        }
    }
}
