mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use torsion_bounds::bounds::{
    bezout_cover, rank_window_with, BoundReport, HomologyBoundParams, KTheoryParams, Theorem,
};
use torsion_bounds::charpoly::{char_poly, profile_for, root_profile, GeneratorSet, DEFAULT_MIN_PRECISION};
use torsion_bounds::dgl_fp::{basis, subspace_dims_with, DglConfig, LetterDifferential, WeightedAlphabet};
use torsion_bounds::lie_rank::babenko_ranks;
use torsion_bounds::real::{Real, OUTPUT_DIGITS};
use torsion_bounds::spaces::{lookup, parse_decimal, report_with_precision, Instance, Route, SpaceKind, SpaceParams};
use torsion_bounds::verify::{Suite, SuiteOutcome};
use torsion_bounds::Error;

use output::{csv_table, emit, render_rows, Format, Row};

const PRECISION_ENV: &str = "TORSION_BOUNDS_PRECISION";

#[derive(Parser)]
#[command(name = "torsion-bounds", version, about = "Free graded Lie algebra ranks and explicit torsion lower bounds")]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact ranks of the free graded Lie algebra on a generator set.
    LieRank(LieRankArgs),
    /// Certified root profile of the characteristic polynomial.
    Roots(RootsArgs),
    /// Homology-route or K-theory-route bounds over a degree range.
    Bound(BoundArgs),
    /// Brute-force coverage certificate for the dimension sets.
    Bezout(BezoutArgs),
    /// Cycles, boundaries and homology of L(x, dx) over F_p.
    Dgl(DglArgs),
    /// Bound table for a catalogued space.
    Report(ReportArgs),
    /// Run invariant suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct LieRankArgs {
    /// Generator degrees with multiplicities, e.g. 2:1,3:1.
    #[arg(long)]
    degrees: GeneratorSet,
    #[arg(long, default_value_t = 1)]
    from: u64,
    #[arg(long)]
    upto: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Add the rank window columns to CSV output.
    #[arg(long)]
    window: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Args)]
struct RootsArgs {
    #[arg(long)]
    degrees: GeneratorSet,
    /// Precision of φ in bits.
    #[arg(long)]
    precision: Option<usize>,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HomologyQuantity {
    /// f_q(N), the boundary lower bound.
    F,
    /// Upper bound on dim σ_N.
    Sigma,
    /// Lower bound on dim B̄_N.
    Bbar,
}

#[derive(Args)]
#[command(group(ArgGroup::new("route").required(true).args(["homology", "ktheory"])))]
struct BoundArgs {
    #[arg(long)]
    homology: bool,
    #[arg(long)]
    ktheory: bool,
    /// Homology route: the Moore space parameter q.
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long, value_enum, default_value_t = HomologyQuantity::F)]
    which: HomologyQuantity,
    /// K-theory route: sphere-wedge generator degrees.
    #[arg(long)]
    degrees: Option<GeneratorSet>,
    #[arg(long)]
    conn: Option<u64>,
    #[arg(long)]
    dim: Option<u64>,
    #[arg(long, default_value = "0.5")]
    epsilon: String,
    #[arg(long)]
    from: Option<u64>,
    #[arg(long)]
    upto: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct BezoutArgs {
    #[arg(long)]
    alpha: u64,
    #[arg(long)]
    beta: u64,
    /// Slope, as a fraction (1/2) or decimal (0.5).
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    cap: u64,
    /// Print every witness as CSV instead of the summary.
    #[arg(long)]
    witnesses: bool,
}

#[derive(Args)]
struct DglArgs {
    #[arg(long)]
    q: u32,
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long)]
    upto: u32,
    /// Largest degree the basis may be built to (needs upto + 1).
    #[arg(long, default_value_t = 15)]
    max_degree: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ReportArgs {
    /// moore, eilenberg-maclane, grassmannian, milnor, unitary, special-unitary
    #[arg(long)]
    space: SpaceKind,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    l: Option<u64>,
    /// Exponent slack of the weak K-theory bound; defaults to 0.5 for K-theory spaces.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    from: Option<u64>,
    #[arg(long)]
    upto: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated suites, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::ParameterMismatch(_) | Error::DegreeLimitExceeded { .. } => 1,
        Error::NumericFailure(_) => 3,
        Error::Internal(_)
        | Error::RootStructureViolation(_)
        | Error::DimensionMismatch { .. }
        | Error::OracleInconsistency(_)
        | Error::CoverageViolation { .. } => 2,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::invalid(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::invalid(format!("json error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn min_bits() -> CliResult<usize> {
    match std::env::var(PRECISION_ENV) {
        Err(_) => Ok(DEFAULT_MIN_PRECISION),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(bits) if bits >= 64 => Ok(bits),
            _ => Err(Failure::invalid(format!("{PRECISION_ENV} must be an integer >= 64, got '{v}'"))),
        },
    }
}

fn fmt_real(x: &Real) -> String {
    x.to_decimal_string(OUTPUT_DIGITS)
}

/// Twenty significant digits, scientific when the magnitude is far from 1.
fn sci(x: &Real) -> String {
    let v = x.to_f64();
    if v == 0.0 || (1e-6..1e12).contains(&v.abs()) {
        x.to_decimal_string(20)
    } else {
        format!("{v:.16e}")
    }
}

fn parse_rational(s: &str) -> CliResult<BigRational> {
    if s.contains('/') {
        BigRational::from_str(s.trim()).map_err(|_| Failure::invalid(format!("'{s}' is not a fraction")))
    } else {
        Ok(parse_decimal(s)?)
    }
}

fn check_range(from: u64, upto: u64) -> CliResult<()> {
    if from > upto {
        return Err(Failure::invalid(format!("--from {from} exceeds --upto {upto}")));
    }
    Ok(())
}

fn lie_rank(args: &LieRankArgs) -> CliResult<String> {
    let from = args.from.max(1);
    check_range(from, args.upto)?;
    let gen = &args.degrees;
    let ranks = babenko_ranks(gen, args.upto)?;
    let degrees: Vec<u64> = (from..=args.upto).collect();
    let needs_window = args.format == Format::Json || args.window;
    let windows = if needs_window {
        let profile = profile_for(gen, args.upto, min_bits()?)?;
        let g = gen.g() as u64;
        degrees
            .par_iter()
            .map(|&n| {
                if n % g == 0 {
                    rank_window_with(gen, &profile, n).map(|w| Some((w, profile.precision_bits)))
                } else {
                    Ok(None)
                }
            })
            .collect::<torsion_bounds::Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let rank = |n: u64| ranks[n as usize - 1].to_string();
    match args.format {
        Format::Csv => {
            let mut header = vec!["N", "rank"];
            if args.window {
                header.extend(["window_lower", "window_upper"]);
            }
            let rows: Vec<Vec<String>> = degrees
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    let mut row = vec![n.to_string(), rank(n)];
                    if args.window {
                        match &windows[i] {
                            Some((w, _)) => row.extend([fmt_real(&w.lower), fmt_real(&w.upper)]),
                            None => row.extend(["0".to_string(), "0".to_string()]),
                        }
                    }
                    row
                })
                .collect();
            Ok(csv_table(&header, &rows)?)
        }
        Format::Json => {
            let rows: Vec<Row> = degrees
                .iter()
                .zip(&windows)
                .map(|(&n, w)| {
                    let exact = Some(ranks[n as usize - 1].clone());
                    let report = match w {
                        Some((w, bits)) => BoundReport {
                            degree: n,
                            bound: w.lower.clone(),
                            exact_rank: exact,
                            theorem: Theorem::RankWindow,
                            precision_bits: *bits,
                            constants: Vec::new(),
                        },
                        None => BoundReport {
                            degree: n,
                            bound: Real::zero(DEFAULT_MIN_PRECISION),
                            exact_rank: exact,
                            theorem: Theorem::ExactZero,
                            precision_bits: 0,
                            constants: Vec::new(),
                        },
                    };
                    Row::from(&report)
                })
                .collect();
            Ok(render_rows(&rows, Format::Json)?)
        }
    }
}

#[derive(Serialize)]
struct RootJson {
    re: String,
    im: String,
    modulus: String,
    residual: String,
}

#[derive(Serialize)]
struct RootsJson {
    polynomial: String,
    g: u32,
    phi: String,
    phi_lo: String,
    phi_hi: String,
    psi_abs: Option<String>,
    precision_bits: usize,
    roots: Vec<RootJson>,
}

fn roots(args: &RootsArgs) -> CliResult<String> {
    let bits = match args.precision {
        Some(b) => b,
        None => min_bits()?,
    };
    let poly = char_poly(&args.degrees);
    let profile = root_profile(&poly, args.degrees.g(), bits)?;
    let json = RootsJson {
        polynomial: poly.to_string(),
        g: profile.g,
        phi: fmt_real(&profile.phi),
        phi_lo: fmt_real(&profile.phi_lo),
        phi_hi: fmt_real(&profile.phi_hi),
        psi_abs: profile.psi_abs.as_ref().map(fmt_real),
        precision_bits: profile.precision_bits,
        roots: profile
            .roots
            .iter()
            .map(|r| RootJson {
                re: sci(&r.re),
                im: sci(&r.im),
                modulus: r.modulus().to_decimal_string(20),
                residual: format!("{:.3e}", r.residual.to_f64()),
            })
            .collect(),
    };
    if args.format == TextFormat::Json {
        return Ok(serde_json::to_string_pretty(&json)? + "\n");
    }
    let mut s = String::new();
    writeln!(s, "polynomial     {}", json.polynomial).ok();
    writeln!(s, "g              {}", json.g).ok();
    writeln!(s, "phi            {}", json.phi).ok();
    writeln!(s, "enclosure      [{}, {}]", json.phi_lo, json.phi_hi).ok();
    writeln!(s, "psi_abs        {}", json.psi_abs.as_deref().unwrap_or("absent")).ok();
    writeln!(s, "precision_bits {}", json.precision_bits).ok();
    writeln!(s, "roots").ok();
    for r in &json.roots {
        let sign = if r.im.starts_with('-') { "" } else { "+" };
        writeln!(s, "  {} {sign}{} i  |z| = {}  residual {}", r.re, r.im, r.modulus, r.residual).ok();
    }
    Ok(s)
}

fn bound(args: &BoundArgs) -> CliResult<String> {
    let bits = min_bits()?;
    let reports: Vec<BoundReport> = if args.homology {
        let q = args.q.ok_or_else(|| Failure::invalid("--homology needs --q"))?;
        if args.degrees.is_some() || args.conn.is_some() || args.dim.is_some() {
            return Err(Failure::invalid("--degrees, --conn and --dim belong to --ktheory"));
        }
        let first = if args.which == HomologyQuantity::Sigma { 0 } else { 2 };
        let from = args.from.unwrap_or(first).max(first);
        check_range(from, args.upto)?;
        let h = HomologyBoundParams::new(q, args.p, args.upto, bits)?;
        (from..=args.upto)
            .into_par_iter()
            .map(|n| {
                let (bound, theorem) = match args.which {
                    HomologyQuantity::F => (h.f_q(n)?, Theorem::HomologyBoundary),
                    HomologyQuantity::Sigma => (h.sigma_upper(n), Theorem::SigmaUpper),
                    HomologyQuantity::Bbar => (h.bbar_lower(n)?, Theorem::BBarLower),
                };
                Ok(BoundReport {
                    degree: n,
                    bound,
                    exact_rank: None,
                    theorem,
                    precision_bits: h.precision_bits(),
                    constants: Vec::new(),
                })
            })
            .collect::<torsion_bounds::Result<Vec<_>>>()?
    } else {
        if args.q.is_some() {
            return Err(Failure::invalid("--q belongs to --homology"));
        }
        let gen = args.degrees.clone().ok_or_else(|| Failure::invalid("--ktheory needs --degrees"))?;
        let conn = args.conn.ok_or_else(|| Failure::invalid("--ktheory needs --conn"))?;
        let dim = args.dim.ok_or_else(|| Failure::invalid("--ktheory needs --dim"))?;
        let epsilon = parse_decimal(&args.epsilon)?;
        let k = KTheoryParams::new(args.p, gen, conn, dim, args.upto, bits)?;
        let step = k.g_prime;
        let from = args.from.unwrap_or(step).max(1);
        check_range(from, args.upto)?;
        let eps = Real::from_rational(&epsilon, k.profile.precision_bits);
        let degrees: Vec<u64> = (from.div_ceil(step) * step..=args.upto).step_by(step as usize).collect();
        let pairs = degrees
            .par_iter()
            .map(|&m| {
                let strong = k.ktheory_lower(m)?;
                let theorem =
                    if strong.below_threshold() { Theorem::KTheoryBelowThreshold } else { Theorem::KTheoryStrong };
                let row = |bound, theorem| BoundReport {
                    degree: m,
                    bound,
                    exact_rank: None,
                    theorem,
                    precision_bits: k.profile.precision_bits,
                    constants: Vec::new(),
                };
                Ok([row(strong.bound, theorem), row(k.weak_lower(m, &eps)?, Theorem::KTheoryWeak)])
            })
            .collect::<torsion_bounds::Result<Vec<_>>>()?;
        pairs.into_iter().flatten().collect()
    };
    let rows: Vec<Row> = reports.iter().map(Row::from).collect();
    Ok(render_rows(&rows, args.format)?)
}

fn bezout(args: &BezoutArgs) -> CliResult<String> {
    let a = parse_rational(&args.a)?;
    let b = parse_rational(&args.b)?;
    let cert = bezout_cover(args.alpha, args.beta, &a, &b, args.n, args.cap)?;
    if !cert.verify(&a, &b) {
        return Err(Failure { code: 2, message: "certificate failed re-verification".into() });
    }
    if args.witnesses {
        let rows: Vec<Vec<String>> = (cert.start..=cert.cap)
            .step_by(cert.g_prime as usize)
            .filter_map(|v| cert.witness(v).map(|(i, j)| vec![v.to_string(), i.to_string(), j.to_string()]))
            .collect();
        return Ok(csv_table(&["value", "i", "j"], &rows)?);
    }
    let mut s = String::new();
    writeln!(s, "g_prime   {}", cert.g_prime).ok();
    writeln!(s, "min_s     {}", cert.min_s).ok();
    writeln!(s, "B         {}", cert.big_b).ok();
    writeln!(s, "start     {}", cert.start).ok();
    writeln!(s, "cap       {}", cert.cap).ok();
    writeln!(s, "i_range   [{}, {})", cert.n, cert.i_end).ok();
    writeln!(s, "covered   {}", cert.len()).ok();
    writeln!(s, "status    verified").ok();
    Ok(s)
}

#[derive(Serialize)]
struct DglRow {
    degree: u32,
    dim: usize,
    cycles: usize,
    boundaries: usize,
    homology: usize,
    boundary_lower: Option<String>,
}

fn dgl(args: &DglArgs) -> CliResult<String> {
    if args.upto == 0 {
        return Err(Failure::invalid("--upto must be at least 1"));
    }
    let alphabet = WeightedAlphabet::acyclic_pair(args.q)?;
    let config = DglConfig { max_degree: args.max_degree };
    let engine = basis(&alphabet, args.upto + 1, args.p, config)?;
    let dims = subspace_dims_with(&engine, &LetterDifferential::acyclic_pair(), args.upto)?;
    let h =
        if args.q >= 2 { Some(HomologyBoundParams::new(args.q, args.p, args.upto as u64, min_bits()?)?) } else { None };
    let rows = dims
        .iter()
        .map(|s| {
            let lower = match &h {
                Some(h) if s.degree >= 2 => Some(fmt_real(&h.boundary_lower(s.degree as u64)?)),
                _ => None,
            };
            Ok(DglRow {
                degree: s.degree,
                dim: s.dim,
                cycles: s.cycles,
                boundaries: s.boundaries,
                homology: s.homology,
                boundary_lower: lower,
            })
        })
        .collect::<torsion_bounds::Result<Vec<_>>>()?;
    match args.format {
        Format::Json => Ok(serde_json::to_string_pretty(&rows)? + "\n"),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.degree.to_string(),
                        r.dim.to_string(),
                        r.cycles.to_string(),
                        r.boundaries.to_string(),
                        r.homology.to_string(),
                        r.boundary_lower.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            Ok(csv_table(&["N", "dim", "cycles", "boundaries", "homology", "boundary_lower"], &body)?)
        }
    }
}

fn report(args: &ReportArgs) -> CliResult<String> {
    let entry = lookup(args.space);
    let epsilon = match (&args.epsilon, entry.route) {
        (Some(e), _) => Some(parse_decimal(e)?),
        (None, Route::KTheory) => Some(parse_decimal("0.5")?),
        (None, Route::Homology) => None,
    };
    let params = SpaceParams { q: args.q, p: args.p, r: args.r, n: args.n, k: args.k, l: args.l, epsilon };
    let instance = entry.instantiate(&params)?;
    let from = args.from.unwrap_or_else(|| instance.first_degree());
    check_range(from, args.upto)?;
    if matches!(instance, Instance::Homology { .. }) && from < 2 {
        return Err(Failure::invalid("homology reports start at N = 2"));
    }
    let degrees = instance.degrees_in(from, args.upto);
    let reports = report_with_precision(&entry, &params, &degrees, min_bits()?)?;
    let rows: Vec<Row> = reports.iter().map(Row::from).collect();
    Ok(render_rows(&rows, args.format)?)
}

fn verify(args: &VerifyArgs) -> CliResult<(String, u8)> {
    let suites: Vec<Suite> = if args.suite.trim() == "all" {
        Suite::ALL.to_vec()
    } else {
        args.suite.split(',').map(|s| s.trim().parse::<Suite>()).collect::<torsion_bounds::Result<_>>()?
    };
    let outcomes: Vec<SuiteOutcome> = suites.iter().map(Suite::run).collect();
    let mut s = String::new();
    writeln!(s, "{:<14} {:>7} {:>9}  status", "suite", "checks", "failures").ok();
    let mut code = 0u8;
    for o in &outcomes {
        let status = match (&o.error, o.failure_count) {
            (Some(_), _) => "error",
            (None, 0) => "pass",
            _ => "FAIL",
        };
        writeln!(s, "{:<14} {:>7} {:>9}  {status}", o.suite.key(), o.checks, o.failure_count).ok();
        for f in &o.failures {
            writeln!(s, "    {f}").ok();
        }
        if let Some(e) = &o.error {
            writeln!(s, "    {e}").ok();
            code = code.max(match exit_code(e) {
                3 => 3,
                _ => 2,
            });
        } else if o.failure_count > 0 {
            code = code.max(2);
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    writeln!(s, "{passed}/{} suites passed", outcomes.len()).ok();
    Ok((s, code))
}

fn run(cli: Cli) -> CliResult<u8> {
    let (text, code) = match &cli.command {
        Command::LieRank(a) => (lie_rank(a)?, 0),
        Command::Roots(a) => (roots(a)?, 0),
        Command::Bound(a) => (bound(a)?, 0),
        Command::Bezout(a) => (bezout(a)?, 0),
        Command::Dgl(a) => (dgl(a)?, 0),
        Command::Report(a) => (report(a)?, 0),
        Command::Verify(a) => verify(a)?,
    };
    emit(&text, cli.out.as_deref())?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
