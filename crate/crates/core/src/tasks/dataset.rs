use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::{sample, TaskConfig, TaskError};
use crate::automata::{self, compile_with, verify_against_progression, CompileOptions, MooreMachine};
use crate::config::KeyValues;
use crate::ltl::{parse, Formula};
use crate::rng;

pub const MANIFEST_FILE: &str = "manifest.tsv";
const CONFIG_FILE: &str = "config.txt";
const MACHINE_DIR: &str = "machines";

#[derive(Debug, Clone, PartialEq)]
pub struct TaskEntry {
    pub formula: Formula,
    pub machine: MooreMachine,
}

/// Sampled formulae with their compiled, minimized and verified machines.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDataset {
    pub config: TaskConfig,
    pub seed: u64,
    pub entries: Vec<TaskEntry>,
}

/// Samples `n` formulae from `config` and compiles them in parallel. Output
/// order follows sampling order, so the result depends only on `seed`.
/// Duplicates are kept.
pub fn build_dataset(config: &TaskConfig, n: usize, seed: u64, opts: CompileOptions) -> Result<TaskDataset, TaskError> {
    if n == 0 {
        return Err(TaskError::InvalidConfig("dataset size must be at least 1".into()));
    }
    let mut r = rng::stream(seed, "tasks");
    let formulae = (0..n)
        .map(|_| sample(config, &mut r))
        .collect::<Result<Vec<_>, _>>()?;
    let entries = formulae
        .into_par_iter()
        .map(|f| compile_checked(&f, config, opts).map(|machine| TaskEntry { formula: f, machine }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TaskDataset {
        config: config.clone(),
        seed,
        entries,
    })
}

fn compile_checked(f: &Formula, config: &TaskConfig, opts: CompileOptions) -> Result<MooreMachine, TaskError> {
    let machine = compile_with(f, &config.alphabet, opts).map_err(|source| TaskError::Compile {
        formula: f.to_string(),
        source,
    })?;
    verify_against_progression(f, &machine).map_err(|d| TaskError::Verification {
        formula: f.to_string(),
        trace: d.trace.iter().map(|&s| config.alphabet.name(s).to_string()).collect(),
    })?;
    Ok(machine)
}

impl TaskDataset {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes `config.txt`, `manifest.tsv` (`formula<TAB>machines/NNNNNN.nrmm`)
    /// and one machine file per entry under `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), TaskError> {
        fs::create_dir_all(dir.join(MACHINE_DIR))?;
        let mut kv = self.config.to_key_values();
        kv.set("seed", self.seed);
        kv.set("count", self.entries.len());
        fs::write(dir.join(CONFIG_FILE), kv.to_string())?;
        let mut manifest = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            let rel = format!("{MACHINE_DIR}/{i:06}.nrmm");
            fs::write(dir.join(&rel), automata::serialize(&e.machine))?;
            manifest.push_str(&format!("{}\t{}\n", e.formula, rel));
        }
        fs::write(dir.join(MANIFEST_FILE), manifest)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, TaskError> {
        let kv = KeyValues::parse(&fs::read_to_string(dir.join(CONFIG_FILE))?)?;
        let config = TaskConfig::from_key_values(&kv)?;
        let seed = kv.require("seed")?;
        let manifest_path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&manifest_path)?;
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| TaskError::Manifest {
                path: format!("{}:{}", manifest_path.display(), i + 1),
                message,
            };
            let (formula_text, rel) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected `formula<TAB>machine-file`".into()))?;
            let formula = parse(formula_text, &config.alphabet).map_err(|e| bad(e.to_string()))?;
            let machine =
                automata::deserialize(&fs::read(dir.join(rel))?).map_err(|e| bad(format!("{rel}: {e}")))?;
            if machine.alphabet() != &config.alphabet {
                return Err(bad(format!("{rel}: alphabet differs from dataset config")));
            }
            entries.push(TaskEntry { formula, machine });
        }
        if let Some(count) = kv.get::<usize>("count")? {
            if count != entries.len() {
                return Err(TaskError::Manifest {
                    path: manifest_path.display().to_string(),
                    message: format!("config says {count} entries, manifest has {}", entries.len()),
                });
            }
        }
        Ok(Self { config, seed, entries })
    }
}
