use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{EnvError, StepResult};

pub const EPISODE_LOG_COLUMNS: &str = "step,observation,action,oracle_symbol,grounder_symbol,reward";

/// One logged step. `action` is `None` for the reset record.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub step: usize,
    pub observation: Vec<f64>,
    pub action: Option<usize>,
    pub oracle_symbol: u16,
    pub grounder_symbol: Option<u16>,
    pub reward: i8,
}

/// Per-step record of one episode.
///
/// The CSV starts with a `# env=<name> seed=<seed> task=<formula>` line,
/// then the column header. Observation values are space separated inside
/// their field; a missing action or grounder symbol is written as `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub env: String,
    pub seed: u64,
    pub task: String,
    pub rows: Vec<LogRow>,
}

impl EpisodeLog {
    pub fn new(env: &str, seed: u64, task: &str) -> Self {
        Self {
            env: env.to_string(),
            seed,
            task: task.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn record(&mut self, action: Option<usize>, result: &StepResult) {
        self.rows.push(LogRow {
            step: self.rows.len(),
            observation: result.observation.clone(),
            action,
            oracle_symbol: result.info.oracle_symbol.0,
            grounder_symbol: result.info.grounder_symbol.map(|s| s.0),
            reward: result.reward.value(),
        });
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# env={} seed={} task={}\n{EPISODE_LOG_COLUMNS}\n", self.env, self.seed, self.task);
        for r in &self.rows {
            let obs: Vec<String> = r.observation.iter().map(f64::to_string).collect();
            let opt = |v: Option<i64>| v.unwrap_or(-1);
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.step,
                obs.join(" "),
                opt(r.action.map(|a| a as i64)),
                r.oracle_symbol,
                opt(r.grounder_symbol.map(i64::from)),
                r.reward
            )
            .expect("write to string");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, EnvError> {
        let bad = |line: usize, msg: &str| EnvError::Log(format!("line {line}: {msg}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad(1, "empty log"))?;
        let rest = header.strip_prefix("# env=").ok_or_else(|| bad(1, "missing `# env=` header"))?;
        let (env, rest) = rest.split_once(" seed=").ok_or_else(|| bad(1, "missing seed"))?;
        let (seed, task) = rest.split_once(" task=").ok_or_else(|| bad(1, "missing task"))?;
        let seed = seed.parse().map_err(|_| bad(1, "seed is not an integer"))?;
        if lines.next() != Some(EPISODE_LOG_COLUMNS) {
            return Err(bad(2, "unexpected column header"));
        }
        let mut log = Self::new(env, seed, task);
        for (i, line) in lines.enumerate() {
            let n = i + 3;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad(n, "expected 6 fields"));
            }
            let int = |s: &str| s.parse::<i64>().map_err(|_| bad(n, &format!("`{s}` is not an integer")));
            let observation = f[1]
                .split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|_| bad(n, "bad observation value")))
                .collect::<Result<_, _>>()?;
            let optional = |v: i64| (v >= 0).then_some(v);
            log.rows.push(LogRow {
                step: int(f[0])? as usize,
                observation,
                action: optional(int(f[2])?).map(|a| a as usize),
                oracle_symbol: int(f[3])? as u16,
                grounder_symbol: optional(int(f[4])?).map(|s| s as u16),
                reward: int(f[5])? as i8,
            });
        }
        Ok(log)
    }

    pub fn save(&self, path: &Path) -> Result<(), EnvError> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }
}
