//! `revprimes` — constant tables, verification suites and sieve experiments
//! for primes with almost-prime digit reverses.
//!
//! Exit codes: 0 success, 1 verification/certification failure, 2 usage
//! error, 3 resource budget exceeded.

mod report;
mod verify;

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Format, RunReport, Value};
use revprimes::constants::{self, ConstantsError};
use revprimes::digits::Base;
use revprimes::expsums::{self, ExpSumSpec, Weight};
use revprimes::fourier::RationalAngle;
use revprimes::kernel;
use revprimes::sieve::{self, PrimeBlock, SieveError};

#[derive(Parser)]
#[command(name = "revprimes", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Randomization seed for the verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Parallelism width (defaults to the number of logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for cached per-block prime lists.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Print floats at full precision in CSV output.
    #[arg(long, global = true)]
    full_precision: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce the per-base constant tables (η, κ, ζ, ε, u, ι, ξ₀, Ω, Ω̃).
    Tables {
        #[arg(value_parser = clap::value_parser!(u32).range(2..=16))]
        b_min: u32,
        #[arg(value_parser = clap::value_parser!(u32).range(2..=16))]
        b_max: u32,
    },
    /// Run a randomized property suite.
    Verify {
        /// digits | kernel | fourier | sieve | expsums | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, value_enum, default_value_t = SizeArg::Small)]
        size: SizeArg,
    },
    /// Reversible/almost-prime census over one block of primes.
    Census {
        b: u32,
        lambda: u32,
        /// Bound on Ω(R_λ(p)); unbounded when omitted.
        #[arg(long)]
        omega_max: Option<u32>,
        /// Lower bound for P⁻(R_λ(p)).
        #[arg(long, default_value_t = 2)]
        z: u64,
    },
    /// Bombieri–Vinogradov-style deviation statistic.
    Bv {
        b: u32,
        /// Comma-separated digit lengths, e.g. 5,6,7,8.
        #[arg(long, value_delimiter = ',')]
        lambdas: Vec<u32>,
        #[arg(long, default_value_t = 50)]
        d_max: u64,
    },
    /// One Λ-weighted exponential sum Σ w(n) e(h·R_λ(n)/d).
    Expsum {
        b: u32,
        lambda: u32,
        h: i64,
        d: u64,
        #[arg(long, value_enum, default_value_t = WeightArg::Vonmangoldt)]
        weight: WeightArg,
        /// Upper limit t (defaults to b^λ).
        #[arg(long)]
        t: Option<u64>,
    },
    /// Parameter sweeps emitting (parameters, value, reference shape) rows.
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long, default_value_t = 2)]
        b: u32,
        #[arg(long, default_value_t = 12)]
        lambda_min: u32,
        #[arg(long, default_value_t = 20)]
        lambda_max: u32,
        #[arg(long, default_value_t = 1)]
        h: i64,
        #[arg(long, default_value_t = 3)]
        d: u64,
        /// Type I sums: length of the outer variable (μ).
        #[arg(long, default_value_t = 2)]
        mu: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SizeArg {
    Small,
    Medium,
    Large,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Vonmangoldt,
    Unit,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    /// |Σ Λ(n) e(hR_λ(n)/d)| across λ.
    Expsum,
    /// S_I(h/d, λ, μ) against its decay shape.
    Type1,
}

enum CliError {
    Failure(String),
    Budget(String),
}

impl From<SieveError> for CliError {
    fn from(e: SieveError) -> Self {
        match e {
            SieveError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<ConstantsError> for CliError {
    fn from(e: ConstantsError) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let started = Instant::now();
    let result = run(&cli);
    match result {
        Ok(mut report) => {
            report.wall_time_s = started.elapsed().as_secs_f64();
            let format = match cli.global.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            let io_result = match &cli.global.out {
                Some(path) => match File::create(path) {
                    Ok(mut f) => report.write(&mut f, format, cli.global.full_precision),
                    Err(e) => {
                        eprintln!("error: cannot create {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                },
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    let r = report.write(&mut lock, format, cli.global.full_precision);
                    lock.flush().ok();
                    r
                }
            };
            if let Err(e) = io_result {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<RunReport, CliError> {
    match &cli.command {
        Command::Tables { b_min, b_max } => cmd_tables(*b_min, *b_max, &cli.global),
        Command::Verify { suite, size } => cmd_verify(suite, *size, cli.global.seed),
        Command::Census {
            b,
            lambda,
            omega_max,
            z,
        } => cmd_census(*b, *lambda, *omega_max, *z, &cli.global),
        Command::Bv { b, lambdas, d_max } => cmd_bv(*b, lambdas, *d_max, &cli.global),
        Command::Expsum {
            b,
            lambda,
            h,
            d,
            weight,
            t,
        } => cmd_expsum(*b, *lambda, *h, *d, *weight, *t),
        Command::Sweep {
            kind,
            b,
            lambda_min,
            lambda_max,
            h,
            d,
            mu,
        } => cmd_sweep(*kind, *b, *lambda_min, *lambda_max, *h, *d, *mu),
    }
}

fn new_base(b: u32) -> Result<Base, CliError> {
    Base::new(b).map_err(|e| CliError::Failure(e.to_string()))
}

fn cmd_tables(b_min: u32, b_max: u32, global: &GlobalArgs) -> Result<RunReport, CliError> {
    if b_min > b_max {
        return Err(CliError::Failure(format!(
            "b_min {b_min} exceeds b_max {b_max}"
        )));
    }
    let mut report = RunReport::new("tables");
    report.param("b_min", b_min).param("b_max", b_max);
    let records = constants::constants_table(b_min, b_max)?;
    for rec in records {
        report.warnings.extend(rec.warnings.iter().cloned());
        let mut row: report::Row = vec![
            ("b", Value::UInt(u64::from(rec.base.get()))),
            ("eta", Value::Float(rec.eta)),
            ("kappa", Value::UInt(rec.kappa_b)),
            ("zeta_1", Value::Float(rec.zeta_1)),
            ("zeta_kappa", Value::Float(rec.zeta_kappa)),
            ("eps", Value::Float(rec.eps_b)),
            ("u", Value::Float(rec.u_b)),
            ("iota", Value::Float(rec.iota_b)),
            ("xi0", Value::Str(constants::xi0_truncated(rec.xi0))),
        ];
        if global.full_precision || matches!(global.format, FormatArg::Json) {
            row.push(("xi0_full", Value::Float(rec.xi0)));
        }
        row.push(("omega", Value::UInt(rec.omega_b)));
        row.push(("omega_tilde", Value::UInt(rec.omega_tilde)));
        report.rows.push(row);
    }
    Ok(report)
}

fn cmd_verify(suite: &str, size: SizeArg, seed: u64) -> Result<RunReport, CliError> {
    let size = match size {
        SizeArg::Small => verify::Size::Small,
        SizeArg::Medium => verify::Size::Medium,
        SizeArg::Large => verify::Size::Large,
    };
    let Some(results) = verify::run_suite(suite, seed, size) else {
        // Unknown suite names are usage errors; exit through the same code
        // clap uses.
        eprintln!(
            "error: unknown suite '{suite}' (expected digits, kernel, fourier, sieve, expsums or all)"
        );
        std::process::exit(2);
    };
    let mut report = RunReport::new("verify");
    report.param("suite", suite).param("seed", seed);
    let mut any_failed = false;
    for r in &results {
        any_failed |= !r.passed();
        report.rows.push(vec![
            ("suite", Value::Str(r.suite.to_string())),
            ("check", Value::Str(r.check.to_string())),
            ("instances", Value::UInt(r.instances as u64)),
            ("failures", Value::UInt(r.failures as u64)),
            (
                "status",
                Value::Str(if r.passed() { "pass" } else { "FAIL" }.into()),
            ),
            (
                "counterexample",
                Value::Str(r.detail.clone().unwrap_or_default()),
            ),
        ]);
    }
    if any_failed {
        let failing: Vec<String> = results
            .iter()
            .filter(|r| !r.passed())
            .map(|r| {
                format!(
                    "{}::{} ({} failures; first: {})",
                    r.suite,
                    r.check,
                    r.failures,
                    r.detail.clone().unwrap_or_default()
                )
            })
            .collect();
        return Err(CliError::Failure(format!(
            "verification failed: {}",
            failing.join("; ")
        )));
    }
    Ok(report)
}

fn block_with_cache(
    base: Base,
    lambda: u32,
    cache_dir: &Option<PathBuf>,
) -> Result<PrimeBlock, CliError> {
    if let Some(dir) = cache_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Failure(format!("cache dir: {e}")))?;
        let path = dir.join(format!("primes_b{}_l{lambda}.rvlprm", base.get()));
        if path.exists() {
            if let Some(primes) = sieve::read_prime_cache(&path, base, lambda)? {
                return Ok(PrimeBlock::from_primes(base, lambda, primes)?);
            }
        }
        let block = PrimeBlock::new(base, lambda)?;
        sieve::write_prime_cache(&path, base, lambda, block.primes())?;
        return Ok(block);
    }
    Ok(PrimeBlock::new(base, lambda)?)
}

fn cmd_census(
    b: u32,
    lambda: u32,
    omega_max: Option<u32>,
    z: u64,
    global: &GlobalArgs,
) -> Result<RunReport, CliError> {
    let base = new_base(b)?;
    let mut report = RunReport::new("census");
    report
        .param("b", b)
        .param("lambda", lambda)
        .param(
            "omega_max",
            omega_max.map_or("inf".to_string(), |v| v.to_string()),
        )
        .param("z", z);
    let block = block_with_cache(base, lambda, &global.cache_dir)?;
    let rows = block.census(omega_max, z)?;
    let mut totals = (0u64, 0u64, 0u64, 0u64, 0u64);
    for r in &rows {
        totals.0 += r.primes;
        totals.1 += r.reversible;
        totals.2 += r.omega_le;
        totals.3 += r.pminus_ge;
        totals.4 += r.both;
        report.rows.push(vec![
            ("kind", Value::Str("class".into())),
            ("i", Value::UInt(u64::from(r.i))),
            ("coprime_class", Value::Bool(r.coprime_class)),
            ("primes", Value::UInt(r.primes)),
            ("reversible", Value::UInt(r.reversible)),
            ("omega_le", Value::UInt(r.omega_le)),
            ("pminus_ge", Value::UInt(r.pminus_ge)),
            ("both", Value::UInt(r.both)),
        ]);
    }
    // c(λ) = reversible·λ²/b^λ, the shape statistic of the upper-bound
    // theorem for true reversible primes.
    let c_lambda =
        totals.1 as f64 * (lambda as f64).powi(2) / base.as_f64().powi(lambda as i32);
    report.rows.push(vec![
        ("kind", Value::Str("total".into())),
        ("i", Value::UInt(0)),
        ("coprime_class", Value::Bool(true)),
        ("primes", Value::UInt(totals.0)),
        ("reversible", Value::UInt(totals.1)),
        ("omega_le", Value::UInt(totals.2)),
        ("pminus_ge", Value::UInt(totals.3)),
        ("both", Value::UInt(totals.4)),
    ]);
    report.rows.push(vec![
        ("kind", Value::Str("c_lambda".into())),
        ("i", Value::UInt(0)),
        ("coprime_class", Value::Bool(true)),
        ("primes", Value::UInt(totals.0)),
        ("reversible", Value::UInt(totals.1)),
        ("omega_le", Value::Float(c_lambda)),
        ("pminus_ge", Value::Float(0.0)),
        ("both", Value::Float(0.0)),
    ]);
    Ok(report)
}

fn cmd_bv(b: u32, lambdas: &[u32], d_max: u64, global: &GlobalArgs) -> Result<RunReport, CliError> {
    let base = new_base(b)?;
    if lambdas.is_empty() {
        return Err(CliError::Failure("need at least one λ".into()));
    }
    let mut report = RunReport::new("bv");
    report
        .param("b", b)
        .param(
            "lambdas",
            lambdas
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(","),
        )
        .param("d_max", d_max);
    for &lambda in lambdas {
        let block = block_with_cache(base, lambda, &global.cache_dir)?;
        let bv = block.bv_statistic(d_max)?;
        report.rows.push(vec![
            ("kind", Value::Str("lambda_total".into())),
            ("lambda", Value::UInt(u64::from(lambda))),
            ("d", Value::UInt(0)),
            ("admissible", Value::Bool(true)),
            ("pi", Value::UInt(bv.pi_total)),
            ("sup_num", Value::UInt(0)),
            ("value", Value::Float(bv.total)),
            ("normalized", Value::Float(bv.normalized)),
        ]);
        for dev in &bv.per_d {
            report.rows.push(vec![
                ("kind", Value::Str("per_d".into())),
                ("lambda", Value::UInt(u64::from(lambda))),
                ("d", Value::UInt(dev.d)),
                ("admissible", Value::Bool(dev.admissible)),
                ("pi", Value::UInt(bv.pi_total)),
                ("sup_num", Value::UInt(dev.sup_num)),
                ("value", Value::Float(dev.sup)),
                (
                    "normalized",
                    Value::Float(if bv.pi_total > 0 {
                        dev.sup / bv.pi_total as f64
                    } else {
                        0.0
                    }),
                ),
            ]);
        }
    }
    Ok(report)
}

fn cmd_expsum(
    b: u32,
    lambda: u32,
    h: i64,
    d: u64,
    weight: WeightArg,
    t: Option<u64>,
) -> Result<RunReport, CliError> {
    let base = new_base(b)?;
    let angle = RationalAngle::new(h, d).map_err(|e| CliError::Failure(e.to_string()))?;
    let hi = base
        .pow_u64(lambda)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let lo = base
        .pow_u64(lambda - 1)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let t = t.unwrap_or(hi);
    let spec = ExpSumSpec {
        base,
        lambda,
        angle,
        t,
        weight: match weight {
            WeightArg::Vonmangoldt => Weight::VonMangoldt,
            WeightArg::Unit => Weight::Unit,
        },
    };
    let value = expsums::lambda_exp_sum(&spec).map_err(|e| match e {
        expsums::ExpSumError::Sieve(s) => CliError::from(s),
        expsums::ExpSumError::CapExceeded { .. } => CliError::Budget(e.to_string()),
        other => CliError::Failure(other.to_string()),
    })?;
    let trivial = match weight {
        WeightArg::Vonmangoldt => expsums::chebyshev_psi_range(lo, t),
        WeightArg::Unit => (t - lo) as f64,
    };
    let mut report = RunReport::new("expsum");
    report
        .param("b", b)
        .param("lambda", lambda)
        .param("angle", angle)
        .param("t", t);
    report.rows.push(vec![
        ("b", Value::UInt(u64::from(b))),
        ("lambda", Value::UInt(u64::from(lambda))),
        ("h", Value::UInt(angle.h())),
        ("d", Value::UInt(angle.d())),
        ("t", Value::UInt(t)),
        ("re", Value::Float(value.re)),
        ("im", Value::Float(value.im)),
        ("abs", Value::Float(value.norm())),
        ("trivial_bound", Value::Float(trivial)),
    ]);
    Ok(report)
}

fn cmd_sweep(
    kind: SweepKind,
    b: u32,
    lambda_min: u32,
    lambda_max: u32,
    h: i64,
    d: u64,
    mu: u32,
) -> Result<RunReport, CliError> {
    let base = new_base(b)?;
    let angle = RationalAngle::new(h, d).map_err(|e| CliError::Failure(e.to_string()))?;
    if lambda_min > lambda_max {
        return Err(CliError::Failure("lambda_min exceeds lambda_max".into()));
    }
    let mut report = RunReport::new("sweep");
    report
        .param("kind", if matches!(kind, SweepKind::Expsum) { "expsum" } else { "type1" })
        .param("b", b)
        .param("angle", angle);
    match kind {
        SweepKind::Expsum => {
            for lambda in lambda_min..=lambda_max {
                let hi = base
                    .pow_u64(lambda)
                    .map_err(|e| CliError::Failure(e.to_string()))?;
                let spec = ExpSumSpec {
                    base,
                    lambda,
                    angle,
                    t: hi,
                    weight: Weight::VonMangoldt,
                };
                let value = expsums::lambda_exp_sum(&spec)
                    .map_err(|e| CliError::Failure(e.to_string()))?;
                let scale = base.as_f64().powi(lambda as i32);
                report.rows.push(vec![
                    ("lambda", Value::UInt(u64::from(lambda))),
                    ("abs", Value::Float(value.norm())),
                    ("abs_over_b_lambda", Value::Float(value.norm() / scale)),
                ]);
            }
        }
        SweepKind::Type1 => {
            let eta = kernel::eta(base);
            let upsilon = kernel::upsilon(base);
            let upsilon_prime = kernel::upsilon_prime(base);
            for lambda in lambda_min..=lambda_max {
                let value = expsums::type_i_sum(base, lambda, mu, &angle)
                    .map_err(|e| CliError::Failure(e.to_string()))?;
                let beta1 = f64::from(mu) / f64::from(lambda);
                let bf = base.as_f64();
                let shape = bf.powf(beta1 * (1.0 + 2.0 * eta) * f64::from(lambda))
                    + bf.powf(
                        (1.0 - upsilon / (d as f64).max(upsilon_prime).ln())
                            * f64::from(lambda),
                    );
                report.rows.push(vec![
                    ("lambda", Value::UInt(u64::from(lambda))),
                    ("mu", Value::UInt(u64::from(mu))),
                    ("d", Value::UInt(angle.d())),
                    ("lhs", Value::Float(value)),
                    ("rhs_shape", Value::Float(shape)),
                    ("ratio", Value::Float(value / shape)),
                ]);
            }
        }
    }
    Ok(report)
}
