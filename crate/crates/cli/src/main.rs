use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use apseq_cli::{commands, CliError, Command};

/// Constant arithmetic subsequences, spectra and period graphs of
/// substitutive sequences.
#[derive(Parser, Debug)]
#[command(name = "apseq", version, about)]
struct Cli {
    /// Largest factor length scanned when testing non-periodicity.
    #[arg(long, global = true, default_value_t = apseq::periodicity::DEFAULT_NONPERIODIC_BOUND)]
    bound: usize,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Lengths, properness, primitivity, incidence matrix and seeds.
    Info { input: PathBuf },
    /// Whether the fixed point is periodic, with its minimal period.
    Periodic { input: PathBuf },
    /// Rational part of the spectrum.
    Spectrum { input: PathBuf },
    /// Residues carrying a constant subsequence for one common difference.
    Check {
        input: PathBuf,
        #[arg(long)]
        difference: u64,
    },
    /// Height and letter classes of a constant-length substitution.
    Height { input: PathBuf },
    /// Period graph, optionally written as a DOT file.
    Graph {
        input: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Classification of constant subsequences of the coded fixed point.
    Classify {
        input: PathBuf,
        #[arg(long, default_value_t = apseq::heightgraph::DEFAULT_MAX_LEVEL)]
        max_level: u32,
    },
    /// Constant residues and new essential periods level by level.
    Periods {
        input: PathBuf,
        #[arg(long)]
        max_level: u32,
    },
    /// Brute-force residue scan over a prefix of the coded fixed point.
    Oracle {
        input: PathBuf,
        #[arg(long)]
        difference: u64,
        #[arg(long)]
        length: Option<usize>,
    },
    /// Number of common factors of two fixed points.
    Intersect {
        input: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[arg(long)]
        length: usize,
    },
    /// Factor complexity p(1), ..., p(N).
    Complexity {
        input: PathBuf,
        #[arg(long)]
        max_n: usize,
    },
}

impl Cmd {
    fn split(self) -> (PathBuf, Command) {
        match self {
            Cmd::Info { input } => (input, Command::Info),
            Cmd::Periodic { input } => (input, Command::Periodic),
            Cmd::Spectrum { input } => (input, Command::Spectrum),
            Cmd::Check { input, difference } => (input, Command::Check { difference }),
            Cmd::Height { input } => (input, Command::Height),
            Cmd::Graph { input, dot } => (input, Command::Graph { dot }),
            Cmd::Classify { input, max_level } => (input, Command::Classify { max_level }),
            Cmd::Periods { input, max_level } => (input, Command::Periods { max_level }),
            Cmd::Oracle {
                input,
                difference,
                length,
            } => (input, Command::Oracle { difference, length }),
            Cmd::Intersect {
                input,
                other,
                length,
            } => (input, Command::Intersect { other, length }),
            Cmd::Complexity { input, max_n } => (input, Command::Complexity { max_n }),
        }
    }
}

fn execute(cli: Cli) -> Result<String, CliError> {
    let bound = cli.bound;
    if bound == 0 {
        return Err(CliError::Usage("--bound must be positive".into()));
    }
    let (path, command) = cli.command.split();
    let input = commands::load(&path)?;
    let report = commands::run(&input, &command, bound)?;
    serde_json::to_string_pretty(&report).map_err(|e| CliError::Internal(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("apseq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
