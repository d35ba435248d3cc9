use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use magnonq_cli::commands::{self, ANALYTIC_NAMES};
use magnonq_cli::error::{CliError, CliResult, ExitStatus};
use magnonq_cli::settings::{self, Command, Override};
use magnonq_cli::{emit, Format, OUT_ENV};
use magnonq_core::Execution;

#[derive(Parser)]
#[command(
    name = "magnonq",
    version,
    about = "Remote magnon/qubit entanglement through a fiber-coupled cavity pair"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Closed-system time evolution and concurrence time series.
    Evolve(Common),
    /// Peak magnon-magnon concurrence over (J, t) with the refined optimum.
    SweepJt(Common),
    /// Peak concurrence of the four pairings versus r_q = g_q / g_m.
    SweepRq(Common),
    /// Non-Markovian decay: pseudomode, QSD ensemble and Lindblad limit.
    Open(Common),
    /// Fiber coupling J versus fiber length.
    Fiber(Common),
    /// Evaluate a closed form, e.g. `analytic cpeak-mm r_q=1`.
    Analytic {
        /// Quantity name followed by key=value arguments.
        #[arg(required = true, num_args = 1..)]
        query: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config; its model sections replace the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $MAGNONQ_OUT, else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// File stem for the outputs (default: the command name).
    #[arg(long)]
    name: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write a gnuplot script.
    #[arg(long)]
    plot: bool,
    /// Run trajectory and sweep loops on one thread.
    #[arg(long)]
    sequential: bool,
    /// Override one config value; `--key=value` is accepted as a shorthand.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<Override>,
}

const FLAGS: &[&str] = &[
    "config",
    "out",
    "name",
    "format",
    "plot",
    "sequential",
    "set",
    "help",
    "version",
];

/// Rewrite `--key=value` for keys that are not flags into `--set key=value`.
fn expand_overrides(args: impl Iterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    for a in args {
        match a.strip_prefix("--").and_then(|s| s.split_once('=')) {
            Some((k, _)) if !FLAGS.contains(&k) => {
                out.push("--set".into());
                out.push(a[2..].to_string());
            }
            _ => out.push(a),
        }
    }
    out
}

fn run(cli: Cli) -> CliResult<ExitStatus> {
    let (outcome, common, explicit_out) = match cli.command {
        Sub::Analytic { mut query, common } => {
            query.extend(common.set.iter().map(|o| format!("{}={}", o.key, o.raw)));
            let o = commands::analytic(&query).map_err(|e| match e {
                CliError::Config(m) if query.is_empty() => {
                    CliError::Config(format!("{m}; valid names: {}", ANALYTIC_NAMES.join(", ")))
                }
                e => e,
            })?;
            let explicit = common.out.is_some() || std::env::var_os(OUT_ENV).is_some();
            (o, common, explicit)
        }
        sub => {
            let (cmd, common) = match sub {
                Sub::Evolve(c) => (Command::Evolve, c),
                Sub::SweepJt(c) => (Command::SweepJt, c),
                Sub::SweepRq(c) => (Command::SweepRq, c),
                Sub::Open(c) => (Command::Open, c),
                Sub::Fiber(c) => (Command::Fiber, c),
                Sub::Analytic { .. } => unreachable!(),
            };
            let text = match &common.config {
                Some(p) => Some(std::fs::read_to_string(p)?),
                None => None,
            };
            let doc = settings::resolve(cmd, text.as_deref(), &common.set)?;
            let exec = if common.sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            (commands::run(cmd, doc, exec)?, common, true)
        }
    };
    for line in &outcome.summary {
        println!("{line}");
    }
    if explicit_out {
        let dir = common
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let stem = common
            .name
            .clone()
            .unwrap_or_else(|| outcome.command.to_string());
        for p in emit(&outcome, &dir, &stem, common.format, common.plot)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(expand_overrides(std::env::args()));
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status().code())
        }
    }
}
