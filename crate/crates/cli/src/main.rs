//! `rklat`: generate instances, run verification suites, and evaluate
//! single lattice computations, all in exact rational arithmetic.
//!
//! Exit codes: 0 when everything passed, 1 when a property failed (a
//! counterexample was emitted), 2 on usage or input errors.

mod commands;
mod instance;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{ComputeArgs, OutputFormat};
use rklat_core::error::Error;

#[derive(Parser)]
#[command(name = "rklat", version, about = "Exact vector-lattice and operator-lattice toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a deterministic random instance file.
    Gen(GenArgs),
    /// Run a verification suite against an instance.
    Check(CheckArgs),
    /// Evaluate a single computation on instance objects.
    Compute(ComputeCliArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of atoms.
    #[arg(long, default_value_t = 2)]
    atoms: usize,
    /// Domain module dimension.
    #[arg(long = "dim-x", default_value_t = 3)]
    dim_x: usize,
    /// Codomain module dimension.
    #[arg(long = "dim-y", default_value_t = 2)]
    dim_y: usize,
    /// Denominator cap for random rationals.
    #[arg(long = "denom-cap", default_value_t = 16)]
    denom_cap: u32,
    /// Generation seed (RKLAT_SEED overrides).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Instance path, or "-" for stdin.
    #[arg(long)]
    instance: String,
    /// Suite name; see README for the list.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    /// Campaign seed. Defaults to the instance's first seed entry;
    /// RKLAT_SEED overrides everything.
    #[arg(long)]
    seed: Option<u64>,
    /// Grid denominator for set-level checks.
    #[arg(long, default_value_t = 4)]
    subdiv: u32,
    /// Denominator cap for random instances drawn during the campaign.
    #[arg(long = "denom-cap", default_value_t = 16)]
    denom_cap: u32,
    /// Cone map id (or rule name) for the extension suite.
    #[arg(long = "cone-map")]
    cone_map: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ComputeCliArgs {
    /// Instance path, or "-" for stdin.
    #[arg(long)]
    instance: String,
    /// One of: sup, inf, pos, neg, abs, extend, freudenthal, support, cmp-idem.
    #[arg(long)]
    what: String,
    /// Operator id (or cone map id for extend).
    #[arg(long)]
    op: Option<String>,
    /// Second operator id for sup and inf.
    #[arg(long)]
    op2: Option<String>,
    /// Scalar-algebra element as comma-separated rationals, one per atom.
    #[arg(long)]
    value: Option<String>,
    /// Second element for cmp-idem.
    #[arg(long)]
    value2: Option<String>,
    /// Grid level for freudenthal.
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Take the upper approximant instead of the lower one.
    #[arg(long, default_value_t = false)]
    upper: bool,
    /// Validation samples for extend.
    #[arg(long, default_value_t = 8)]
    samples: usize,
    /// Validation seed for extend. Defaults to the instance's first seed
    /// entry; RKLAT_SEED overrides everything.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn env_seed() -> Option<u64> {
    std::env::var("RKLAT_SEED").ok()?.trim().parse().ok()
}

fn read_instance(path: &str) -> Result<instance::Instance, Error> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::InvalidInput(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))?
    };
    instance::parse(&text)
}

fn exit_for(err: &Error) -> ExitCode {
    if err.is_input_error() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn run_gen(args: &GenArgs) -> ExitCode {
    let seed = env_seed().unwrap_or(args.seed);
    let file = match commands::build_instance(args.atoms, args.dim_x, args.dim_y, args.denom_cap, seed)
    {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = commands::instance_json(&file);
    match &args.out {
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                ExitCode::from(2)
            }
        },
    }
}

fn run_check(args: &CheckArgs) -> ExitCode {
    let inst = match read_instance(&args.instance) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    let seed = env_seed()
        .or(args.seed)
        .or_else(|| inst.seeds.first().copied())
        .unwrap_or(42);
    match commands::run_check(
        &inst,
        &args.suite,
        args.trials,
        seed,
        args.subdiv,
        args.denom_cap,
        args.cone_map.as_deref(),
    ) {
        Ok(report) => {
            println!("{}", commands::render_report(&report, args.format.into()));
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn run_compute(args: &ComputeCliArgs) -> ExitCode {
    let inst = match read_instance(&args.instance) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    let seed = env_seed()
        .or(args.seed)
        .or_else(|| inst.seeds.first().copied())
        .unwrap_or(0);
    let compute_args = ComputeArgs {
        what: &args.what,
        op: args.op.as_deref(),
        op2: args.op2.as_deref(),
        value: args.value.as_deref(),
        value2: args.value2.as_deref(),
        n: args.n,
        upper: args.upper,
        samples: args.samples,
        seed,
    };
    match commands::run_compute(&inst, &compute_args) {
        Ok(result) => {
            println!("{}", result.render(args.format.into()));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Gen(args) => run_gen(&args),
        Command::Check(args) => run_check(&args),
        Command::Compute(args) => run_compute(&args),
    }
}
