//! The `sampboost` command line.
//!
//! Every command first resolves its flags into a [`config::RunConfig`],
//! writes it to `config-echo.json` in the output directory, and then runs
//! from that value alone. `replay` feeds an echo back through the same path,
//! so a replay reproduces the original artifacts byte for byte.
//!
//! Exit codes: 0 success, 1 I/O failure while writing outputs, 2 invalid
//! configuration, 3 dataset violation, 4 weak-learning violation under the
//! abort policy, 5 a check failed (identity residuals, stability rejection,
//! reconstruction mismatch, corrupt trace).

pub mod args;
mod commands;
pub mod config;
mod resolve;

use std::ffi::OsString;
use std::fmt;
use std::path::Path;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command};
use config::{ConfigEcho, ECHO_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATASET: i32 = 3;
pub const EXIT_WEAK: i32 = 4;
pub const EXIT_CHECK: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<sampboost::Error> for CliError {
    fn from(e: sampboost::Error) -> Self {
        use sampboost::Error as E;
        let code = match &e {
            E::Dataset(_) => EXIT_DATASET,
            E::WeakLearningViolation { .. } => EXIT_WEAK,
            E::Contract(_) => EXIT_CHECK,
            _ => EXIT_CONFIG,
        };
        CliError::new(code, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Serialize)]
struct ErrorReport<'a> {
    schema: u32,
    command: &'a str,
    exit_code: i32,
    error: &'a str,
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &[u8]) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .and_then(|()| std::fs::write(dir.join(name), contents))
        .map_err(|e| CliError::new(EXIT_IO, format!("writing {}: {e}", dir.join(name).display())))
}

pub(crate) fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::new(EXIT_IO, e.to_string()))?;
    text.push('\n');
    write_file(dir, name, text.as_bytes())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let out = cli.out.clone();
    let name = command_name(&cli.command);
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("sampboost {name}: {e}");
            let report = ErrorReport { schema: sampboost::SCHEMA_VERSION, command: name, exit_code: e.code, error: &e.message };
            let _ = write_json(&out, "error.json", &report);
            e.code
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Train(_) => "train",
        Command::Audit(_) => "audit",
        Command::Stability(_) => "stability",
        Command::Curve(_) => "curve",
        Command::Compare(_) => "compare",
        Command::CompressCheck(_) => "compress-check",
        Command::Replay(_) => "replay",
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let run = match cli.command {
        Command::Replay(a) => {
            let text = std::fs::read_to_string(&a.config)
                .map_err(|e| CliError::config(format!("reading {}: {e}", a.config.display())))?;
            let echo: ConfigEcho =
                serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", a.config.display())))?;
            if echo.schema != sampboost::SCHEMA_VERSION {
                return Err(CliError::config(format!("unsupported config echo schema {}", echo.schema)));
            }
            echo.run
        }
        other => resolve::resolve(other)?,
    };
    write_json(&cli.out, ECHO_FILE, &ConfigEcho::new(run.clone()))?;
    commands::run(&run, &cli.out)
}
