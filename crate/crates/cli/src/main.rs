use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hassett_core::arith::Rational;

mod commands;
mod report;

use commands::{CliError, Suite};
use report::RunReport;

#[derive(Parser)]
#[command(name = "hassett", version)]
#[command(about = "Chambers, divisors and stability on moduli of weighted pointed rational curves")]
struct Cli {
    /// Worker threads for parallel enumeration (output does not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Structured)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the chambers of the weight domain
    Chambers {
        n: usize,
        #[arg(long)]
        count_only: bool,
        /// Histogram by type (n = 5)
        #[arg(long)]
        by_type: bool,
        /// Cache file; defaults to $MODULI_CACHE_DIR/chambers-n{N}.json
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Locate a weight vector such as 1,1,3/10,3/10,3/10
    Classify {
        weights: String,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, value_parser = parse_rational)]
        alpha: Option<Rational>,
        #[arg(long, value_parser = parse_rational)]
        beta: Option<Rational>,
    },
    /// Stability data for a linearisation
    Git {
        weights: String,
        /// List the strictly semistable complement pairs
        #[arg(long)]
        semistable: bool,
        /// Match a typical five-point weight to its chamber
        #[arg(long = "match")]
        match_five: bool,
    },
    /// Hasse diagram of the contraction order
    Dag {
        #[arg(default_value_t = 5)]
        n: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Intersections,
    #[value(name = "eq1")]
    Eq1,
    Theorem,
    #[value(name = "table1")]
    Table1,
    #[value(name = "section5")]
    Section5,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Intersections => Suite::Intersections,
            SuiteArg::Eq1 => Suite::Eq1,
            SuiteArg::Theorem => Suite::Theorem,
            SuiteArg::Table1 => Suite::Table1,
            SuiteArg::Section5 => Suite::Section5,
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    Rational::parse(s).map_err(|e| e.to_string())
}

fn run(command: Command) -> Result<RunReport, CliError> {
    match command {
        Command::Chambers {
            n,
            count_only,
            by_type,
            cache,
        } => commands::chambers(n, count_only, by_type, cache.as_deref()),
        Command::Classify { weights, cache } => commands::classify(&weights, cache.as_deref()),
        Command::Verify { suite, alpha, beta } => commands::verify(suite.into(), alpha, beta),
        Command::Git {
            weights,
            semistable,
            match_five,
        } => commands::git(&weights, semistable, match_five),
        Command::Dag { n, dot } => commands::dag(n, dot.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(report) => {
            let body = match cli.format {
                Format::Structured => report.to_json(),
                Format::Text => report.to_text(),
            };
            print!("{body}");
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
