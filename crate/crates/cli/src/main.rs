mod format;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use format::Format;
use sterr::bounds::{delta_k_riemann, DeltaCache, CACHE_ENV};
use sterr::constants::TABLE_M;
use sterr::kernel::delta_x;
use sterr::logint::{epsilon, li, li_n, li_star, LogPoint};
use sterr::numerics::{decimal_digits, FAST_BITS, MAX_BITS};
use sterr::verify::{compute_table, run_all, TableSource, VerifyConfig, REGISTRY};
use sterr::{Enclosure, Error, PrecisionConfig, Real};

const DEFAULT_CACHE: &str = "sterr-delta-cache.csv";

#[derive(Debug, Parser)]
#[command(
    name = "sterr",
    version,
    about = "Certified bounds on the Stieltjes approximation error of li(x)"
)]
struct Cli {
    /// Working precision in bits (53 selects the f64 fast path).
    #[arg(long, global = true, default_value_t = 192,
          value_parser = clap::value_parser!(u32).range(i64::from(FAST_BITS)..=i64::from(MAX_BITS)))]
    precision: u32,

    /// Delta cache file.
    #[arg(long, global = true, env = CACHE_ENV, default_value = DEFAULT_CACHE)]
    cache: PathBuf,

    /// Worker threads; defaults to the hardware parallelism.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one function and print its value or enclosure.
    Eval(EvalArgs),
    /// Compute Riemann records for Δ_k and add them to the cache.
    Sweep(SweepArgs),
    /// Emit a recomputed table.
    Table(TableArgs),
    /// Run verification checks; exits 1 if any fails.
    Verify(VerifyArgs),
    /// Inspect or prune the cache.
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Function {
    Li,
    LiN,
    LiStar,
    Epsilon,
    Delta,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(value_enum)]
    function: Function,
    /// Argument x as a decimal literal.
    #[arg(long, conflicts_with = "x_exp", allow_hyphen_values = true)]
    x: Option<String>,
    /// Argument given as ln x, so that x = e^t exactly.
    #[arg(long = "x-exp", allow_hyphen_values = true)]
    x_exp: Option<String>,
    /// Number of terms for li_n.
    #[arg(long)]
    n: Option<u64>,
    /// Index k for delta.
    #[arg(long, conflicts_with_all = ["x", "x_exp"])]
    k: Option<u64>,
    /// Subintervals for delta.
    #[arg(long = "M", default_value_t = TABLE_M, value_parser = clap::value_parser!(u64).range(2..))]
    m: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long = "k-max", value_parser = clap::value_parser!(u64).range(2..=1_000_000))]
    k_max: u64,
    #[arg(long = "M", default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(2..))]
    m: u64,
    /// Comma-separated subset of 2..=k_max.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
    id: u8,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Precision of the k = 2..=1000 sweep behind tables 1 and 3.
    #[arg(long = "sweep-precision", default_value_t = FAST_BITS)]
    sweep_precision: u32,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Run every registered check (the default).
    #[arg(long, conflicts_with = "check")]
    all: bool,
    /// Run only the named check; repeatable.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(REGISTRY))]
    check: Vec<String>,
    #[arg(long = "k-max", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
    k_max: u64,
    /// Subintervals of the sweep behind the band, positivity and monotonicity checks.
    #[arg(long = "M", default_value_t = TABLE_M, value_parser = clap::value_parser!(u64).range(2..))]
    m: u64,
    #[arg(long = "sweep-precision", default_value_t = FAST_BITS)]
    sweep_precision: u32,
    #[arg(long = "grid-density", default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    grid_density: u64,
    #[arg(long = "skip-tables")]
    skip_tables: bool,
    /// Emit JSON lines instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum CacheCommand {
    /// Summarize the cache by precision and M.
    Inspect,
    /// Remove records matching every given filter.
    Prune {
        #[arg(long = "M")]
        m: Option<u64>,
        #[arg(long = "bits")]
        bits: Option<u32>,
        /// Remove records with k above this value.
        #[arg(long = "k-above")]
        k_above: Option<u64>,
        /// Remove everything.
        #[arg(long, conflicts_with_all = ["m", "bits", "k_above"])]
        all: bool,
    },
}

enum Failure {
    Checks,
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain { .. } | Error::Range { .. } => 2,
        Error::Dependency(_) | Error::CacheFormat { .. } | Error::Io(_) => 3,
    }
}

fn point(args: &EvalArgs, bits: u32) -> Result<LogPoint, Failure> {
    match (&args.x, &args.x_exp) {
        (Some(x), None) => Ok(LogPoint::from_value(Real::parse(x, bits)?)?),
        (None, Some(t)) => Ok(LogPoint::from_exponent(Real::parse(t, bits)?)?),
        _ => Err(Failure::Usage("give exactly one of --x or --x-exp".into())),
    }
}

/// `⌈p·log₁₀2⌉`, the digits printed by `eval`.
fn eval_digits(bits: u32) -> usize {
    (f64::from(bits) * std::f64::consts::LOG10_2).ceil() as usize
}

fn print_enclosure(e: &Enclosure, digits: usize) {
    println!("{}", e.lo().to_fixed_string(digits));
    println!("{}", e.hi().to_fixed_string(digits));
}

fn eval(args: &EvalArgs, cfg: &PrecisionConfig) -> Result<(), Failure> {
    let bits = cfg.bits();
    let digits = eval_digits(bits);
    let value = match args.function {
        Function::Li => li(&point(args, bits)?, cfg)?,
        Function::LiN => {
            let n = args
                .n
                .ok_or_else(|| Failure::Usage("li_n needs --n".into()))?;
            li_n(&point(args, bits)?, n, cfg)?
        }
        Function::LiStar => li_star(&point(args, bits)?, cfg)?,
        Function::Epsilon => epsilon(&point(args, bits)?, cfg)?,
        Function::Delta => {
            let enc = match args.k {
                Some(k) => delta_k_riemann(k, args.m, cfg)?.enclosure()?,
                None => delta_x(&point(args, bits)?, args.m, cfg)?,
            };
            print_enclosure(&enc, digits);
            return Ok(());
        }
    };
    println!("{}", value.to_fixed_string(digits));
    Ok(())
}

fn sweep(args: &SweepArgs, cfg: &PrecisionConfig, cache_path: &Path) -> Result<(), Failure> {
    let ks: Vec<u64> = match &args.only {
        Some(only) => {
            if let Some(bad) = only.iter().find(|&&k| k < 2 || k > args.k_max) {
                return Err(Failure::Usage(format!(
                    "--only value {bad} is outside 2..={}",
                    args.k_max
                )));
            }
            only.clone()
        }
        None => (2..=args.k_max).collect(),
    };
    let mut cache = DeltaCache::load(cache_path)?;
    let added = cache.fill(&ks, args.m, cfg)?;
    if added > 0 {
        cache.save(cache_path)?;
    }
    let mut total = Real::zero(cfg.bits());
    for &k in &ks {
        let rec = cache
            .get(k, args.m, cfg.bits())
            .expect("record was just filled");
        total = total.add_dir(&rec.width(), sterr::numerics::Dir::Up);
    }
    println!(
        "{added} new records ({} requested, {} in cache); accumulated δ = {}",
        ks.len(),
        cache.len(),
        total.to_sci_string(18)
    );
    Ok(())
}

fn table(args: &TableArgs, cfg: &PrecisionConfig, cache_path: &Path) -> Result<(), Failure> {
    let cache = DeltaCache::load(cache_path)?;
    let src = TableSource {
        cache: &cache,
        sweep_bits: args.sweep_precision,
        cfg: *cfg,
    };
    let t = compute_table(args.id, &src)?;
    print!(
        "{}",
        format::render(&t, args.format, eval_digits(cfg.bits()))?
    );
    Ok(())
}

fn verify(args: &VerifyArgs, cfg: &PrecisionConfig, cache_path: &Path) -> Result<(), Failure> {
    let config = VerifyConfig {
        precision: *cfg,
        sweep_bits: args.sweep_precision,
        sweep_m: args.m,
        k_max: args.k_max,
        grid_density: args.grid_density,
        skip_tables: args.skip_tables,
        only: (!args.all && !args.check.is_empty()).then(|| args.check.clone()),
        ..VerifyConfig::default()
    };
    let mut cache = DeltaCache::load(cache_path)?;
    let before = cache.len();
    let report = run_all(&config, &mut cache)?;
    if cache.len() != before {
        cache.save(cache_path)?;
    }
    if args.json {
        print!("{}", report.to_json_lines());
    } else {
        print!("{}", report.to_text());
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn cache_cmd(cmd: &CacheCommand, cache_path: &Path) -> Result<(), Failure> {
    let mut cache = DeltaCache::load(cache_path)?;
    match cmd {
        CacheCommand::Inspect => {
            println!("{}: {} records", cache_path.display(), cache.len());
            for (bits, m, count) in cache.groups() {
                let ks: Vec<u64> = cache
                    .records()
                    .filter(|r| r.precision_bits == bits && r.m == m)
                    .map(|r| r.k)
                    .collect();
                let lo = ks.iter().min().copied().unwrap_or(0);
                let hi = ks.iter().max().copied().unwrap_or(0);
                println!(
                    "  {bits} bits ({} digits), M = {m}: {count} records, k in {lo}..={hi}",
                    decimal_digits(bits)
                );
            }
        }
        CacheCommand::Prune {
            m,
            bits,
            k_above,
            all,
        } => {
            if !all && m.is_none() && bits.is_none() && k_above.is_none() {
                return Err(Failure::Usage(
                    "prune needs --all or at least one of --M, --bits, --k-above".into(),
                ));
            }
            let removed = cache.retain(|r| {
                let matches = *all
                    || (m.is_none_or(|m| r.m == m)
                        && bits.is_none_or(|b| r.precision_bits == b)
                        && k_above.is_none_or(|k| r.k > k));
                !matches
            });
            cache.save(cache_path)?;
            println!("removed {removed} records, {} remain", cache.len());
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let cfg = PrecisionConfig::new(cli.precision)?;
    match &cli.command {
        Command::Eval(args) => eval(args, &cfg),
        Command::Sweep(args) => sweep(args, &cfg, &cli.cache),
        Command::Table(args) => table(args, &cfg, &cli.cache),
        Command::Verify(args) => verify(args, &cfg, &cli.cache),
        Command::Cache(cmd) => cache_cmd(cmd, &cli.cache),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
