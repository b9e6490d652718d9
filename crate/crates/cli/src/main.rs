//! `endoalg`: batch front end for the engine. Every command prints either a
//! plain-text summary or, with `--json`, a versioned report; the exit code is
//! 0 on success, 1 on a false verdict, 2 on usage or input errors and 3 when a
//! search or enumeration bound is exhausted.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use thiserror::Error;

use endoalg::oracle::DEFAULT_WINDOW_RADIUS;
use endoalg::{EndoConfig, EndoContext, RelationBounds};

use commands::Env;
use report::{Fingerprint, Outcome, Report, SCHEMA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] endoalg::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use endoalg::Error as E;
        match self {
            CliError::Engine(
                E::CapExceeded { .. } | E::CompanionExhausted(_) | E::SaturatedValuation(_) | E::DepthExhausted { .. },
            ) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "endoalg", version, about = "Exact computations in the C*-algebra of an injective endomorphism")]
struct Cli {
    /// Endomorphism config; without it the context is φ(n) = 3n on ℤ.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override `max_depth`.
    #[arg(long, global = true, value_name = "N")]
    depth: Option<u32>,

    /// Oracle window radius.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_WINDOW_RADIUS)]
    window: i64,

    #[arg(long, global = true)]
    json: bool,

    /// Seed for sampled checks.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,

    /// Print the elapsed time to stderr.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normal form of an expression.
    Normalize {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    Mul {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
    },
    Adjoint {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Conditional expectation onto the diagonal.
    Expect {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    Equal {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
    },
    /// Compare normal forms with literal operators on ℓ²(G); with no
    /// expressions, check seeded random words.
    OracleCheck {
        #[arg(allow_hyphen_values = true)]
        exprs: Vec<String>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Size and transversal of G/φⁿ(G).
    Cosets { level: u32 },
    Purity {
        /// Extra sample elements, e.g. `5` or `[1,-2]`.
        extras: Vec<String>,
    },
    /// Orthogonalizing projections for a sum of `qterm(n,h,g,k,h',m)` terms
    /// or any expression.
    Orthogonalize {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Use this exponent instead of the computed one.
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = endoalg::ortho::DEFAULT_COMPANION_BUDGET)]
        budget: usize,
        /// Fix the companions instead of searching, one per class in order.
        #[arg(long = "companion", value_name = "H", allow_hyphen_values = true)]
        companions: Vec<String>,
    },
    /// A point of the cylinder moved by `((g,i),n)`.
    Freeness { element: String, cylinder: String },
    /// An element moving the point `g@N` into the cylinder.
    Orbit { point: String, cylinder: String },
    /// Ore witnesses for two elements of G ⋊ ℕ.
    Ore { left: String, right: String },
    RelationsCheck {
        #[arg(long, default_value_t = RelationBounds::default().elements)]
        elements: usize,
        #[arg(long, default_value_t = RelationBounds::default().max_power)]
        max_power: u32,
    },
    ReportAll,
}

/// `@path` reads a file with one expression per line and `#` comments; the
/// lines are summed. Lines starting with a sign continue the sum as written.
fn source(arg: &str) -> Result<String, CliError> {
    let Some(path) = arg.strip_prefix('@') else {
        return Ok(arg.to_string());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let mut out = String::new();
    for line in text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()) {
        if !out.is_empty() && !line.starts_with(['+', '-']) {
            out.push_str(" +");
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(line);
    }
    Ok(out)
}

fn context(cli: &Cli) -> Result<EndoContext, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            EndoConfig::parse(&text)?
        }
        None => EndoConfig::scalar(3),
    };
    if let Some(d) = cli.depth {
        config = config.with_max_depth(d);
    }
    Ok(EndoContext::new(config)?)
}

fn dispatch(cli: &Cli, env: &Env) -> Result<Outcome, CliError> {
    use Command::*;
    match &cli.command {
        Normalize { expr } => commands::normalize(env, &source(expr)?),
        Mul { left, right } => commands::mul(env, &source(left)?, &source(right)?),
        Adjoint { expr } => commands::adjoint(env, &source(expr)?),
        Expect { expr } => commands::expect(env, &source(expr)?),
        Equal { left, right } => commands::equal(env, &source(left)?, &source(right)?),
        OracleCheck { exprs, samples, max_len } => {
            let exprs = exprs.iter().map(|e| source(e)).collect::<Result<Vec<_>, _>>()?;
            commands::oracle_check(env, &exprs, *samples, *max_len)
        }
        Cosets { level } => commands::cosets(env, *level),
        Purity { extras } => commands::purity(env, extras),
        Orthogonalize { expr, p, budget, companions } => {
            commands::orthogonalize(env, &source(expr)?, *p, *budget, companions)
        }
        Freeness { element, cylinder } => commands::freeness(env, element, cylinder),
        Orbit { point, cylinder } => commands::orbit(env, point, cylinder),
        Ore { left, right } => commands::ore(env, left, right),
        RelationsCheck { elements, max_power } => commands::relations_check(
            env,
            RelationBounds { elements: *elements, max_power: *max_power, ..RelationBounds::default() },
        ),
        ReportAll => commands::report_all(env),
    }
}

fn run(cli: &Cli, argv: &[String]) -> Result<Option<bool>, CliError> {
    let ctx = context(cli)?;
    let env = Env { ctx: &ctx, window: cli.window, seed: cli.seed };
    let outcome = dispatch(cli, &env)?;
    if cli.json {
        let report = Report {
            schema: SCHEMA,
            command: argv,
            context: Fingerprint::of(&ctx),
            result: &outcome.result,
            verdict: outcome.verdict,
        };
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for line in &outcome.text {
            println!("{line}");
        }
    }
    Ok(outcome.verdict)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match run(&cli, &argv) {
        Ok(Some(false)) => 1,
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    if cli.timing {
        eprintln!("elapsed: {} ms", start.elapsed().as_millis());
    }
    ExitCode::from(code)
}
