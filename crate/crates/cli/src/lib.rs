//! Batch runner for the `limitsets` experiments.
//!
//! ```text
//! limitsets <experiment> [--config FILE] [--key value ...]
//! ```
//!
//! Every `--key` has a config file counterpart (see [`config`]); flags win
//! over the file. Exit codes: 0 on success, 2 for an invalid configuration
//! (with a JSON error on stderr), 3 when reading or writing a file fails.
//! Diagnostics go to stderr at the level named by `LIMITSETS_LOG`
//! (`off`, `info` or `debug`; default `off`).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod run;

use std::ffi::OsString;

use clap::{Arg, ArgAction, Command};
use serde_json::json;

pub use config::{parse_config, parse_periods, RunConfig, Settings};
pub use run::{run, write_atomically};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl From<limitsets::Error> for CliError {
    fn from(e: limitsets::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        let kind = match self {
            CliError::Invalid(_) => "invalid-config",
            CliError::Io(_) => "io",
        };
        json!({ "error": kind, "message": self.to_string() }).to_string()
    }
}

pub const LOG_ENV: &str = "LIMITSETS_LOG";

fn command() -> Command {
    let experiments: Vec<&str> = config::Experiment::ALL.iter().map(|e| e.name()).collect();
    let mut cmd = Command::new("limitsets")
        .about("Limit-set approximation experiments")
        .arg(
            Arg::new("experiment-arg")
                .value_name("EXPERIMENT")
                .help(format!("one of: {}", experiments.join(", ")))
                .num_args(1),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("key = value file; flags override it"),
        );
    for (key, help) in config::KEYS.iter().filter(|(k, _)| *k != "experiment") {
        let mut arg = Arg::new(*key)
            .long(*key)
            .value_name("VALUE")
            .help(*help)
            .action(ArgAction::Set)
            .allow_negative_numbers(true);
        if *key == "output" {
            arg = arg.short('o');
        }
        cmd = cmd.arg(arg);
    }
    cmd
}

/// Merges command-line flags over the optional config file.
pub fn settings_from_args<I, T>(args: I) -> Result<Settings, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = command()
        .try_get_matches_from(args)
        .map_err(|e| match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0)
            }
            _ => CliError::Invalid(e.kind().to_string() + ": " + &first_line(&e.to_string())),
        })?;
    let mut settings = match matches.get_one::<String>("config") {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
            parse_config(&text)?
        }
        None => Settings::new(),
    };
    if let Some(e) = matches.get_one::<String>("experiment-arg") {
        settings.insert("experiment".into(), e.clone());
    }
    for (key, _) in config::KEYS.iter().filter(|(k, _)| *k != "experiment") {
        if let Some(v) = matches.get_one::<String>(key) {
            settings.insert(key.to_string(), v.clone());
        }
    }
    Ok(settings)
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or("").trim().to_string()
}

/// Full entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = settings_from_args(args)
        .and_then(|s| RunConfig::from_settings(&s))
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
