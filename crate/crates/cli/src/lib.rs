//! Command-line pipeline that learns how source-code style relates to
//! test-suite runtime: extract stylometric features from Java files, time
//! the suite across history snapshots, join both into a dataset,
//! cross-validate six regression models, and predict the runtime cost of
//! a candidate working tree.
//!
//! Everything lives in the library so tests can drive the exact code the
//! binary runs. Exit codes: 0 success, 1 operational error (message on
//! stderr), 2 usage error.

pub mod chart;
pub mod commands;
pub mod model_file;
pub mod table;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "testimate",
    version,
    about = "Estimate test-suite runtime from source-code style"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a repository is suitable for data collection.
    Preflight(commands::preflight::Args),
    /// Extract stylometric features from Java sources.
    Extract(commands::extract::Args),
    /// Build and test each configured snapshot, recording wall-clock times.
    Collect(commands::collect::Args),
    /// Join per-file features with measured times into a dataset.
    BuildDataset(commands::build_dataset::Args),
    /// Cross-validate all six regression models and persist the best one.
    Evaluate(commands::evaluate::Args),
    /// Predict suite runtime for the current working tree.
    Predict(commands::predict::Args),
    /// Render an evaluation report as an SVG bar chart.
    Plot(commands::plot::Args),
}

/// Parses arguments from the environment and runs the subcommand,
/// returning the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage problems exit 2; --help and --version print and exit 0.
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Preflight(args) => commands::preflight::run(args),
        Command::Extract(args) => commands::extract::run(args),
        Command::Collect(args) => commands::collect::run(args),
        Command::BuildDataset(args) => commands::build_dataset::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Predict(args) => commands::predict::run(args),
        Command::Plot(args) => commands::plot::run(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::error::ErrorKind;

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        let err = Cli::try_parse_from(["testimate", "foo"]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::InvalidSubcommand);
        assert!(err.use_stderr());
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let err =
            Cli::try_parse_from(["testimate", "plot", "--out", "x", "--bogus"]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::UnknownArgument);
        assert!(err.use_stderr());
    }

    #[test]
    fn help_is_not_an_error() {
        let err = Cli::try_parse_from(["testimate", "--help"]).unwrap_err();
        assert!(!err.use_stderr());
    }

    #[test]
    fn evaluate_defaults_match_the_documented_pipeline() {
        let cli = Cli::try_parse_from(["testimate", "evaluate", "--out", "artifacts"]).unwrap();
        match cli.command {
            Command::Evaluate(args) => {
                assert_eq!(args.k, 10);
                assert_eq!(args.seed, 42);
                assert_eq!(args.group_split, commands::evaluate::GroupSplit::Row);
            }
            _ => panic!("parsed wrong subcommand"),
        }
    }

    #[test]
    fn group_split_accepts_both_documented_values() {
        for value in ["row", "snapshot"] {
            let cli = Cli::try_parse_from([
                "testimate",
                "evaluate",
                "--out",
                "artifacts",
                "--group-split",
                value,
            ])
            .unwrap();
            assert!(matches!(cli.command, Command::Evaluate(_)));
        }
    }
}
