//! Command-line front end: exact permanents and Hamiltonian-cycle counts,
//! cross-algorithm verification, and a benchmark CSV emitter.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use permhc::error::Error;
use permhc::evaluator::CountMode;
use permhc::field::FieldCtx;
use permhc::io::{field_for, parse_matrix_str, MatrixFile};
use permhc::matrix::{IntMatrix, Matrix};
use permhc::oracles::{
    hc_brute, hc_dp, hc_int_oracle, per_brute, per_int_oracle, per_ryser, BRUTE_CAP,
};
use permhc::pipeline::{
    count_ff, count_int, estimate_cost, CountIntOptions, CountOptions, ResidueMode,
};
use permhc::ring::IntRing;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::io::{Read, Write};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "permhc",
    about = "Exact permanents and Hamiltonian-cycle counts over the integers and finite fields",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Brute,
    Ryser,
    Dp,
    Subexp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Per,
    Hc,
}

#[derive(Args)]
struct CountArgs {
    /// Compute over F_Q (prime power); entries are reduced mod the
    /// characteristic. Without this flag the count is over the integers.
    #[arg(long)]
    field: Option<u64>,
    #[arg(long, value_enum, default_value_t = Algo::Auto)]
    algo: Algo,
    /// Cofactor override for the subexponential pipeline.
    #[arg(long)]
    b: Option<u64>,
    /// Enforce the analysis-side parameter bounds (q >= n^2+1, large b).
    #[arg(long)]
    strict: bool,
    /// Matrix file; `-` or absent reads standard input.
    file: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Permanent of a square matrix.
    Per(CountArgs),
    /// Hamiltonian-cycle polynomial of a square matrix.
    Hc(CountArgs),
    /// Cross-checks independent algorithms on random matrices.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        field: Option<u64>,
    },
    /// Times the counting algorithms and writes a CSV.
    Bench {
        /// Comma-separated list of matrix sizes.
        #[arg(long)]
        sizes: String,
        /// Output CSV path.
        #[arg(long)]
        csv: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Adds pipeline rows over this field.
        #[arg(long)]
        field: Option<u64>,
    },
    /// Prints the entropy-based cost estimate for a parameter choice.
    Params {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        b: u64,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
}

fn main() {
    if let Ok(v) = std::env::var("PERMHC_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Internal(_) => 3,
                _ => 2,
            };
            std::process::exit(code);
        }
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Per(args) => run_count(CountMode::Per, args),
        Command::Hc(args) => run_count(CountMode::Hc, args),
        Command::Verify { n, trials, seed, field } => run_verify(n, trials, seed, field),
        Command::Bench { sizes, csv, seed, field } => run_bench(&sizes, &csv, seed, field),
        Command::Params { n, b, mode } => {
            let mode = match mode {
                ModeArg::Per => CountMode::Per,
                ModeArg::Hc => CountMode::Hc,
            };
            let report = estimate_cost(n, b, mode)?;
            println!("{report}");
            Ok(0)
        }
    }
}

fn read_matrix(file: &Option<String>) -> Result<MatrixFile, Error> {
    let src = match file.as_deref() {
        None | Some("-") => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
        Some(path) => std::fs::read_to_string(path)?,
    };
    parse_matrix_str(&src)
}

fn run_count(mode: CountMode, args: CountArgs) -> Result<i32, Error> {
    let mf = read_matrix(&args.file)?;
    let field_q = args.field.or(mf.field);
    match field_q {
        Some(q) => {
            let ctx = field_for(q)?;
            let m = mf.to_field_matrix(&ctx);
            let opts = CountOptions { strict: args.strict, b: args.b, ..Default::default() };
            let value = match (mode, args.algo) {
                (_, Algo::Brute) => match mode {
                    CountMode::Per => per_brute(&ctx, &m, BRUTE_CAP)?,
                    CountMode::Hc => hc_brute(&ctx, &m, BRUTE_CAP)?,
                },
                (CountMode::Per, Algo::Ryser) => per_ryser(&ctx, &m),
                (CountMode::Hc, Algo::Dp) => hc_dp(&ctx, &m),
                (CountMode::Per, Algo::Dp) => {
                    return Err(Error::Unsupported("--algo dp applies to hc only".into()))
                }
                (CountMode::Hc, Algo::Ryser) => {
                    return Err(Error::Unsupported("--algo ryser applies to per only".into()))
                }
                (_, Algo::Subexp) => {
                    let (v, stats) = count_ff(&ctx, &m, mode, &opts)?;
                    eprintln!(
                        "subexp: q={} ell={} b={} k={} r={} instances={} queries={}",
                        stats.base_q, stats.ell, stats.b, stats.k, stats.r,
                        stats.instances, stats.queries
                    );
                    v
                }
                (_, Algo::Auto) => {
                    if m.n() <= 6 {
                        match mode {
                            CountMode::Per => per_brute(&ctx, &m, 6)?,
                            CountMode::Hc => hc_brute(&ctx, &m, 6)?,
                        }
                    } else if m.n() <= 24 {
                        match mode {
                            CountMode::Per => per_ryser(&ctx, &m),
                            CountMode::Hc => hc_dp(&ctx, &m),
                        }
                    } else {
                        count_ff(&ctx, &m, mode, &opts)?.0
                    }
                }
            };
            println!("{}", ctx.format_elem(&value));
        }
        None => {
            let m = mf.to_int_matrix();
            let value: BigInt = match args.algo {
                Algo::Brute => match mode {
                    CountMode::Per => per_brute(&IntRing, &m, BRUTE_CAP)?,
                    CountMode::Hc => hc_brute(&IntRing, &m, BRUTE_CAP)?,
                },
                Algo::Ryser => {
                    if mode != CountMode::Per {
                        return Err(Error::Unsupported("--algo ryser applies to per only".into()));
                    }
                    per_int_oracle(&m)?
                }
                Algo::Dp => {
                    if mode != CountMode::Hc {
                        return Err(Error::Unsupported("--algo dp applies to hc only".into()));
                    }
                    hc_int_oracle(&m)?
                }
                Algo::Auto => count_int(&m, mode, &CountIntOptions::default())?.0,
                Algo::Subexp => {
                    let opts = CountIntOptions {
                        residues: ResidueMode::Subexp,
                        ff: CountOptions { strict: args.strict, b: args.b, ..Default::default() },
                        ..Default::default()
                    };
                    let (v, stats) = count_int(&m, mode, &opts)?;
                    eprintln!("subexp: primes={:?}", stats.primes);
                    v
                }
            };
            println!("{value}");
        }
    }
    Ok(0)
}

fn random_int_matrix(rng: &mut ChaCha12Rng, n: usize) -> IntMatrix {
    Matrix::from_fn(n, |_, _| BigInt::from(rng.gen_range(-9i64..=9)))
}

fn run_verify(n: usize, trials: u64, seed: u64, field: Option<u64>) -> Result<i32, Error> {
    if n == 0 {
        return Err(Error::Dimension("--n must be at least 1".into()));
    }
    let field_desc = field.map_or("-".to_string(), |q| q.to_string());
    println!("verify n={n} trials={trials} seed={seed} field={field_desc}");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let ctx = field.map(field_for).transpose()?;
    let mut failures = 0u64;
    for trial in 0..trials {
        match &ctx {
            Some(ctx) => {
                let m = permhc::matrix::FieldMatrix::random(ctx, &mut rng, n);
                let ryser = per_ryser(ctx, &m);
                let dp = hc_dp(ctx, &m);
                let mut bad = false;
                if n <= BRUTE_CAP {
                    bad |= per_brute(ctx, &m, BRUTE_CAP)? != ryser;
                    bad |= hc_brute(ctx, &m, BRUTE_CAP)? != dp;
                }
                if n <= 6 {
                    let opts = CountOptions::default();
                    bad |= count_ff(ctx, &m, CountMode::Per, &opts)?.0 != ryser;
                    bad |= count_ff(ctx, &m, CountMode::Hc, &opts)?.0 != dp;
                }
                if bad {
                    failures += 1;
                    println!("MISMATCH at trial {trial}:");
                    print_field_matrix(ctx, &m);
                }
            }
            None => {
                let m = random_int_matrix(&mut rng, n);
                let ryser = per_int_oracle(&m)?;
                let dp = hc_int_oracle(&m)?;
                let mut bad = false;
                if n <= BRUTE_CAP {
                    bad |= per_brute(&IntRing, &m, BRUTE_CAP)? != ryser;
                    bad |= hc_brute(&IntRing, &m, BRUTE_CAP)? != dp;
                }
                let crt = count_int(&m, CountMode::Per, &CountIntOptions::default())?.0;
                bad |= crt != ryser;
                let crt_hc = count_int(&m, CountMode::Hc, &CountIntOptions::default())?.0;
                bad |= crt_hc != dp;
                if bad {
                    failures += 1;
                    println!("MISMATCH at trial {trial}:");
                    print_int_matrix(&m);
                }
            }
        }
    }
    if failures == 0 {
        println!("per cross-checks: OK ({trials} trials)");
        println!("hc cross-checks: OK ({trials} trials)");
        println!("verify: OK");
        Ok(0)
    } else {
        println!("verify: {failures} mismatching trials");
        Ok(1)
    }
}

fn print_int_matrix(m: &IntMatrix) {
    println!("{}", m.n());
    for i in 0..m.n() {
        let row: Vec<String> = (0..m.n()).map(|j| m.get(i, j).to_string()).collect();
        println!("{}", row.join(" "));
    }
}

fn print_field_matrix(ctx: &FieldCtx, m: &permhc::matrix::FieldMatrix) {
    println!("{}", m.n());
    for i in 0..m.n() {
        let row: Vec<String> = (0..m.n()).map(|j| ctx.format_elem(m.get(i, j))).collect();
        println!("{}", row.join(" "));
    }
}

fn run_bench(sizes: &str, csv_path: &str, seed: u64, field: Option<u64>) -> Result<i32, Error> {
    let sizes: Vec<usize> = sizes
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse { line: 0, msg: format!("bad size `{s}`") })
        })
        .collect::<Result<_, _>>()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = String::from("algo,n,q,b,wall_ns,field_ops,queries\n");
    let mut rows = 0usize;
    for &n in &sizes {
        if n == 0 || n > 24 {
            return Err(Error::Dimension(format!("bench sizes must be 1..=24, got {n}")));
        }
        let m = random_int_matrix(&mut rng, n);
        // Ryser over the integers: n 2^n ring operations by construction.
        let t = Instant::now();
        let _ = per_int_oracle(&m)?;
        let wall = t.elapsed().as_nanos();
        let ops = (n as u64) << n;
        out.push_str(&format!("ryser,{n},0,0,{wall},{ops},0\n"));
        rows += 1;
        let t = Instant::now();
        let _ = hc_int_oracle(&m)?;
        let wall = t.elapsed().as_nanos();
        let ops = ((n * n) as u64) << n;
        out.push_str(&format!("dp,{n},0,0,{wall},{ops},0\n"));
        rows += 1;
        if let Some(q) = field {
            let ctx = field_for(q)?;
            let fm = MatrixFile {
                n,
                entries: (0..n)
                    .map(|i| (0..n).map(|j| m.get(i, j).clone()).collect())
                    .collect(),
                field: Some(q),
            }
            .to_field_matrix(&ctx);
            for mode in [CountMode::Per, CountMode::Hc] {
                let t = Instant::now();
                let (_, stats) = count_ff(&ctx, &fm, mode, &CountOptions::default())?;
                let wall = t.elapsed().as_nanos();
                out.push_str(&format!(
                    "subexp-{},{n},{q},{},{wall},{},{}\n",
                    mode.name(),
                    stats.b,
                    stats.series_mults,
                    stats.queries
                ));
                rows += 1;
            }
        }
    }
    let mut f = std::fs::File::create(csv_path)?;
    f.write_all(out.as_bytes())?;
    println!("bench: wrote {rows} rows to {csv_path}");
    Ok(0)
}
