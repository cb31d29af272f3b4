use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use raag_cli::{run, Builtin, Command, Format, InputSource, RunConfig};

/// Certify the R-infinity property for right-angled Artin groups of small graphs.
#[derive(Parser)]
#[command(name = "raag", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format: json or text.
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// File of graph6 or `n; u-v, ...` lines; `-` reads stdin.
    #[arg(long, conflicts_with = "builtin")]
    input: Option<PathBuf>,
    /// cycle(n), complete(n), edgeless(n), complete_multipartite(a,b,..) or petersen.
    #[arg(long)]
    builtin: Option<Builtin>,
}

impl InputArgs {
    fn source(self) -> InputSource {
        match (self.input, self.builtin) {
            (_, Some(b)) => InputSource::Builtin(b),
            (Some(p), None) if p.as_os_str() == "-" => InputSource::Stdin,
            (Some(p), None) => InputSource::File(p),
            (None, None) => InputSource::Stdin,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// One certificate per input graph.
    Certify(InputArgs),
    /// Every isomorphism class up to --max-n vertices.
    Enumerate {
        #[arg(long)]
        max_n: usize,
        /// Certify each class and tally the verdicts.
        #[arg(long)]
        certify: bool,
    },
    /// Lyndon elements of one length, with their bracketings.
    Lyndon {
        #[arg(long)]
        length: usize,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Ranks of the lower central series quotients.
    Ranks {
        #[arg(long)]
        upto: usize,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Eigenvalue-one witnesses for every signed automorphism.
    Autcheck {
        /// Check every non-complete class up to this many vertices instead of reading input.
        #[arg(long, conflicts_with_all = ["input", "builtin"])]
        max_n: Option<usize>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Trace of iterated maximal-degree deletion.
    Simplify(InputArgs),
}

fn main() -> ExitCode {
    // Usage errors exit 1; status 2 is reserved for undecided graphs.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, input) = match cli.command {
        Cmd::Certify(i) => (Command::Certify, i.source()),
        Cmd::Enumerate { max_n, certify } => {
            (Command::Enumerate { max_n, certify }, InputSource::None)
        }
        Cmd::Lyndon { length, input } => (Command::Lyndon { length }, input.source()),
        Cmd::Ranks { upto, input } => (Command::Ranks { upto }, input.source()),
        Cmd::Autcheck { max_n: Some(m), .. } => {
            (Command::Autcheck { max_n: Some(m) }, InputSource::None)
        }
        Cmd::Autcheck { max_n: None, input } => (Command::Autcheck { max_n: None }, input.source()),
        Cmd::Simplify(i) => (Command::Simplify, i.source()),
    };
    let config = RunConfig {
        command,
        input,
        jobs: cli.jobs,
        out: cli.out,
        format: cli.format,
    };
    match run(&config) {
        Ok(summary) => ExitCode::from(summary.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
