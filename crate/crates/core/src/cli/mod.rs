//! The `kerrpb` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 solver failure, 3 an analytic
//! comparison outside its bound.

pub mod args;
pub mod commands;
pub mod config;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::Parser;

pub use args::{Cli, Command, Format};
pub use commands::{execute, Outcome, Report};
pub use table::{Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Solver {
        context: String,
        #[source]
        source: crate::Error,
    },
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Solver { .. } | CliError::Io(_) => 2,
        }
    }
}

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

fn emit(report: &Report, cmd: &Command) -> io::Result<()> {
    let out = cmd.output();
    let mut sink: Box<dyn Write> = match &out.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    report.table.write(out.format, &mut sink)?;
    sink.flush()
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_with(args: Vec<String>) -> i32 {
    let args = match config::expand_args(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.command.output().jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_SOLVER;
        }
    };
    let result = pool.install(|| execute(&cli.command));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    for note in &report.notes {
        eprintln!("{note}");
    }
    if let Err(e) = emit(&report, &cli.command) {
        eprintln!("error: {}", CliError::from(e));
        return EXIT_SOLVER;
    }
    match report.outcome {
        Outcome::Success => 0,
        Outcome::SolverFailure => EXIT_SOLVER,
        Outcome::Mismatch => EXIT_MISMATCH,
    }
}

pub fn run() -> i32 {
    run_with(
        std::env::args_os()
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
    )
}
