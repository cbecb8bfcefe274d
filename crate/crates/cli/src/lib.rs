//! Command-line driver: compile tasks, build datasets, train, evaluate and
//! verify, each run archived in its own timestamped directory.

pub mod commands;
pub mod config;
pub mod env;
pub mod error;
pub mod run_dir;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use config::ExperimentConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ltlg", version, about = "Co-safe LTL tasks, reward machines and symbol grounding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides, e.g. `seed=3 episodes=2000`.
    #[arg(value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a formula into a minimal Moore machine and its DOT drawing.
    Compile {
        formula: String,
        /// Comma-separated propositions; the Minecraft set by default.
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print `tasks` formulae sampled from the task grammar.
    Sample(ConfigArgs),
    /// Sample, compile and verify a task dataset.
    Dataset(ConfigArgs),
    /// Train a Q-table and a grounder.
    Train(ConfigArgs),
    /// Evaluate a training run on base, `+dep` and `+conj` tasks.
    Eval {
        /// Directory written by `train`.
        #[arg(long)]
        run: PathBuf,
        #[command(flatten)]
        args: ConfigArgs,
    },
    /// Check compiled machines against formula progression.
    Verify(ConfigArgs),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    use commands::*;
    match cli.command {
        Command::Compile { formula, alphabet, out } => print!("{}", compile_cmd(&formula, alphabet.as_deref(), &out)?),
        Command::Sample(a) => print!("{}", sample_cmd(&load_config(a.config.as_deref(), &a.overrides)?)?),
        Command::Dataset(a) => println!("{}", dataset_cmd(&load_config(a.config.as_deref(), &a.overrides)?)?.display()),
        Command::Train(a) => println!("{}", train_cmd(&load_config(a.config.as_deref(), &a.overrides)?)?.display()),
        Command::Eval { run, args } => {
            if args.config.is_some() {
                return Err(CliError::Usage("eval reads the run's own config; pass overrides only".into()));
            }
            let config = eval_config(&run, &args.overrides)?;
            print!("{}", eval_cmd(&run, &config)?);
        }
        Command::Verify(a) => println!("{}", verify_cmd(&load_config(a.config.as_deref(), &a.overrides)?)?),
    }
    Ok(())
}

/// Parses `args` and runs the command, mapping failures to exit statuses:
/// 0 success, 1 usage, 2 verification failure, 3 I/O.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
