use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ltl_ground::agent::{
    evaluate, labeled_observations, train_joint, AgentTask, EvalConfig, EvalReport, JointConfig, LabelingMode, QTable,
};
use ltl_ground::automata::{
    compile, compile_with, serialize, to_dot, verify_against_progression, CompileOptions, MooreMachine,
};
use ltl_ground::config::KeyValues;
use ltl_ground::env::{Environment, Labeling};
use ltl_ground::ltl::{parse, Alphabet, Formula};
use ltl_ground::nrm::{write_training_log, Grounder};
use ltl_ground::rng;
use ltl_ground::tasks::{build_dataset, sample, TaskConfig, TaskDataset};
use rand::RngCore;

use crate::config::ExperimentConfig;
use crate::env::AnyEnv;
use crate::error::CliError;
use crate::run_dir::{RunDir, CONFIG_FILE};

pub const MACHINE_FILE: &str = "machine.nrmm";
pub const DOT_FILE: &str = "machine.dot";
pub const QTABLE_FILE: &str = "qtable.json";
pub const GROUNDER_FILE: &str = "grounder.nrmg";
pub const TRAINING_LOG_FILE: &str = "training_log.csv";
pub const EPISODES_FILE: &str = "episodes.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const FORMULAE_FILE: &str = "formulae.txt";
pub const DATASET_DIR: &str = "dataset";

/// Loads `--config` (if any) and applies `key=value` overrides on top.
pub fn load_config(file: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut kv = match file {
        Some(path) => KeyValues::parse(&read(path)?)?,
        None => KeyValues::new(),
    };
    kv.merge(&parse_overrides(overrides)?);
    ExperimentConfig::from_key_values(&kv)
}

fn parse_overrides(overrides: &[String]) -> Result<KeyValues, CliError> {
    Ok(KeyValues::parse(&overrides.join("\n"))?)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Output-verdict counts, e.g. `0 x3, +1 x1, -1 x1`.
fn output_histogram(m: &MooreMachine) -> String {
    let mut counts = [0usize; 3];
    for o in m.outputs() {
        counts[o.index()] += 1;
    }
    format!("0 x{}, +1 x{}, -1 x{}", counts[0], counts[1], counts[2])
}

pub fn compile_cmd(formula: &str, alphabet: Option<&str>, out: &Path) -> Result<String, CliError> {
    let alphabet = match alphabet {
        Some(list) => Alphabet::parse_list(list)?,
        None => TaskConfig::minecraft_alphabet(),
    };
    let f = parse(formula, &alphabet)?;
    let m = compile(&f, &alphabet)?;
    fs::create_dir_all(out)?;
    fs::write(out.join(MACHINE_FILE), serialize(&m))?;
    fs::write(out.join(DOT_FILE), to_dot(&m))?;
    Ok(format!(
        "states: {}\noutputs: {}\nwrote {} and {}\n",
        m.num_states(),
        output_histogram(&m),
        out.join(MACHINE_FILE).display(),
        out.join(DOT_FILE).display()
    ))
}

pub fn sample_cmd(config: &ExperimentConfig) -> Result<String, CliError> {
    let mut run = RunDir::create(config, "sample")?;
    let mut r = rng::stream(config.seed, "sample");
    let mut out = String::new();
    for _ in 0..config.tasks {
        writeln!(out, "{}", sample(&config.task, &mut r)?).expect("write to string");
    }
    fs::write(run.file(FORMULAE_FILE), &out)?;
    run.record(&format!("sampled {} formulae into {}", config.tasks, run.path().display()))?;
    Ok(out)
}

pub fn dataset_cmd(config: &ExperimentConfig) -> Result<PathBuf, CliError> {
    let mut run = RunDir::create(config, "dataset")?;
    let dataset = build_dataset(&config.task, config.tasks, config.seed, CompileOptions::default())?;
    let dir = run.file(DATASET_DIR);
    dataset.save(&dir)?;
    let states: usize = dataset.entries.iter().map(|e| e.machine.num_states()).sum();
    run.record(&format!(
        "{} verified machines ({} states in total) in {}",
        dataset.len(),
        states,
        dir.display()
    ))?;
    Ok(dir)
}

fn training_tasks(config: &ExperimentConfig) -> Result<Vec<AgentTask>, CliError> {
    let dataset = match &config.dataset {
        Some(dir) => {
            if !dir.exists() {
                return Err(CliError::Io(format!("dataset {} not found", dir.display())));
            }
            let d = TaskDataset::load(dir)?;
            if d.config.alphabet != config.task.alphabet {
                return Err(CliError::Usage(format!(
                    "dataset {} uses a different alphabet than the {} environment",
                    dir.display(),
                    config.env
                )));
            }
            d
        }
        None => build_dataset(&config.task, config.tasks, config.seed, CompileOptions::default())?,
    };
    Ok(AgentTask::from_entries(&dataset.entries))
}

fn check_grounder_mode(env: &AnyEnv, mode: LabelingMode) -> Result<(), CliError> {
    if mode == LabelingMode::Grounder && env.observation_dim() == 0 {
        return Err(CliError::Usage(format!(
            "{} has no observations to ground; use mode = oracle",
            env.name()
        )));
    }
    Ok(())
}

pub fn train_cmd(config: &ExperimentConfig) -> Result<PathBuf, CliError> {
    let env = config.build_env()?;
    check_grounder_mode(&env, config.mode)?;
    let tasks = training_tasks(config)?;
    let mut run = RunDir::create(config, "train")?;
    run.log(&format!(
        "training on {} tasks in {} for {} episodes, seed {}",
        tasks.len(),
        env.name(),
        config.episodes,
        config.seed
    ))?;
    let grounder = Grounder::random(
        env.observation_dim(),
        env.alphabet().len(),
        &mut rng::stream(config.seed, "grounder-init"),
    );
    let accuracy_set = (config.mode == LabelingMode::Grounder)
        .then(|| labeled_observations(env.clone(), 1000, 10, config.seed));
    let joint = JointConfig {
        episodes: config.episodes,
        mode: config.mode,
        timeout: config.timeout,
        q: config.q,
        trainer: config.trainer,
        buffers: config.buffers,
        update_every: config.update_every,
        rounds_per_update: config.rounds_per_update,
        seed: config.seed,
    };
    let result = train_joint(env, &tasks, grounder, &joint, accuracy_set.as_ref())?;

    result.table.save(&run.file(QTABLE_FILE))?;
    result.grounder.save(&run.file(GROUNDER_FILE))?;
    write_training_log(&run.file(TRAINING_LOG_FILE), &result.training_log)?;
    let mut episodes = String::from("episode,task,steps,reward\n");
    for e in &result.episodes {
        writeln!(episodes, "{},{},{},{}", e.episode, e.task, e.steps, e.reward).expect("write to string");
    }
    fs::write(run.file(EPISODES_FILE), episodes)?;

    let tail = result.episodes.len().saturating_sub(500);
    let recent = &result.episodes[tail..];
    let wins = recent.iter().filter(|e| e.reward > 0).count();
    run.log(&format!(
        "{} table entries, {} informative episodes, {} grounder rounds",
        result.table.len(),
        result.informative,
        result.training_log.len()
    ))?;
    if let Some(last) = result.training_log.last() {
        if let Some(acc) = last.grounder_accuracy {
            run.log(&format!("grounder accuracy {acc:.3}"))?;
        }
    }
    run.log(&format!("success over the last {} episodes: {wins}", recent.len()))?;
    run.log(&format!("run directory {}", run.path().display()))?;
    Ok(run.path().to_path_buf())
}

/// Loads a training run's archived config, applying evaluation overrides.
/// The seed is part of what the artifacts were trained with, so it cannot
/// be changed here.
pub fn eval_config(run: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let archived_path = run.join(CONFIG_FILE);
    let mut kv = KeyValues::parse(&read(&archived_path)?)?;
    let extra = parse_overrides(overrides)?;
    if let (Some(want), Some(have)) = (extra.get_str("seed"), kv.get_str("seed")) {
        if want != have {
            return Err(CliError::Usage(format!(
                "seed mismatch: {} was trained with seed {have}, got seed {want}",
                run.display()
            )));
        }
    }
    kv.merge(&extra);
    ExperimentConfig::from_key_values(&kv)
}

pub fn eval_cmd(run_path: &Path, config: &ExperimentConfig) -> Result<String, CliError> {
    let env = config.build_env()?;
    let table = QTable::load(&run_path.join(QTABLE_FILE))
        .map_err(|e| CliError::Io(format!("{}: {e}", run_path.join(QTABLE_FILE).display())))?;
    let labeling = match config.mode {
        LabelingMode::Oracle => Labeling::Oracle,
        LabelingMode::Grounder => Labeling::Grounder(Arc::new(Grounder::load(&run_path.join(GROUNDER_FILE))?)),
    };
    let mut run = RunDir::create(config, "eval")?;
    let (deeper, wider) = config.task.generalization();
    let distributions = [("base", &config.task), ("+dep", &deeper), ("+conj", &wider)];
    let eval = EvalConfig {
        episodes: config.eval_episodes,
        timeout: config.eval_timeout,
        gamma: config.q.gamma,
        seed: config.seed,
    };
    let mut report = EvalReport::default();
    for (i, (name, task_config)) in distributions.iter().enumerate() {
        let task_seed = rng::substream(config.seed, "eval-tasks", i as u64).next_u64();
        let dataset = build_dataset(task_config, config.eval_tasks, task_seed, CompileOptions::default())?;
        let tasks = AgentTask::from_entries(&dataset.entries);
        report
            .rows
            .push(evaluate(env.clone(), &table, labeling.clone(), &tasks, name, eval)?);
    }
    report.save_csv(&run.file(METRICS_FILE))?;
    run.log(&format!(
        "evaluated {} with timeout {} into {}",
        run_path.display(),
        config.eval_timeout,
        run.path().display()
    ))?;
    Ok(report.to_table())
}

/// Checks machines against formula progression: every entry of `dataset`
/// when one is given, otherwise `tasks` freshly sampled formulae compiled
/// with and without minimization.
pub fn verify_cmd(config: &ExperimentConfig) -> Result<String, CliError> {
    let mut run = RunDir::create(config, "verify")?;
    let alphabet = &config.task.alphabet;
    let mut checks: Vec<(Formula, MooreMachine)> = Vec::new();
    match &config.dataset {
        Some(dir) => {
            for e in TaskDataset::load(dir)?.entries {
                checks.push((e.formula, e.machine));
            }
        }
        None => {
            let mut r = rng::stream(config.seed, "verify");
            let raw = CompileOptions {
                minimize: false,
                ..CompileOptions::default()
            };
            for _ in 0..config.tasks {
                let f = sample(&config.task, &mut r)?;
                checks.push((f.clone(), compile(&f, alphabet)?));
                checks.push((f.clone(), compile_with(&f, alphabet, raw)?));
            }
        }
    }
    let mut pairs = 0;
    for (f, m) in &checks {
        match verify_against_progression(f, m) {
            Ok(n) => pairs += n,
            Err(d) => {
                let trace: Vec<&str> = d.trace.iter().map(|&s| m.alphabet().name(s)).collect();
                let msg = format!(
                    "`{f}`: progression gives {} but the machine outputs {} after {trace:?}",
                    d.progression,
                    d.machine.value()
                );
                run.record(&msg)?;
                return Err(CliError::Verification(msg));
            }
        }
    }
    let summary = format!("{} machines agree with progression ({pairs} product states checked)", checks.len());
    run.record(&summary)?;
    Ok(summary)
}
