use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::Local;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const CONFIG_FILE: &str = "config.txt";
pub const LOG_FILE: &str = "run.log";

/// A fresh `<out_dir>/<timestamp>-<command>` directory holding the config
/// copy and everything the command writes.
pub struct RunDir {
    path: PathBuf,
    log: File,
}

impl RunDir {
    pub fn create(config: &ExperimentConfig, command: &str) -> Result<Self, CliError> {
        let stamp = Local::now().format("%Y%m%d-%H%M%S");
        let base = config.out_dir.join(format!("{stamp}-{command}"));
        let mut path = base.clone();
        let mut n = 1;
        while path.exists() {
            path = PathBuf::from(format!("{}-{n}", base.display()));
            n += 1;
        }
        fs::create_dir_all(&path)?;
        fs::write(path.join(CONFIG_FILE), config.to_key_values().to_string())?;
        let log = File::create(path.join(LOG_FILE))?;
        Ok(Self { path, log })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }

    /// Writes a line to the run log and to stderr.
    pub fn log(&mut self, line: &str) -> Result<(), CliError> {
        eprintln!("{line}");
        self.record(line)
    }

    /// Writes a line to the run log only.
    pub fn record(&mut self, line: &str) -> Result<(), CliError> {
        writeln!(self.log, "{line}")?;
        Ok(())
    }
}
