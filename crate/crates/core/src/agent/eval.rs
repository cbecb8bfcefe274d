use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::qtable::QTable;
use super::train::{state_key, AgentTask};
use super::AgentError;
use crate::env::{Environment, Labeling, ProductEnv};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub episodes: usize,
    pub timeout: usize,
    pub gamma: f64,
    pub seed: u64,
}

/// Greedy-policy returns on one task distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub distribution: String,
    /// Mean undiscounted return.
    pub total_return: f64,
    /// Mean of `γ^(n-1) r` for a terminal reward `r` after `n` actions, or
    /// `r` when the task is decided before the first action.
    pub discounted_return: f64,
    /// Fraction of episodes ending in `+1`.
    pub success_rate: f64,
    pub episodes: usize,
    pub seed: u64,
}

/// Discounted return of an episode whose only non-zero reward `reward`
/// arrived after `steps` actions.
pub fn discounted(reward: f64, steps: usize, gamma: f64) -> f64 {
    if steps == 0 {
        reward
    } else {
        gamma.powi(steps as i32 - 1) * reward
    }
}

/// Runs `episodes` greedy episodes, cycling through `tasks` in order.
pub fn evaluate<E: Environment>(
    env: E,
    table: &QTable,
    labeling: Labeling,
    tasks: &[AgentTask],
    distribution: &str,
    config: EvalConfig,
) -> Result<DistributionReport, AgentError> {
    if tasks.is_empty() {
        return Err(AgentError::NoTasks);
    }
    let mut penv = ProductEnv::new(env, tasks[0].machine.clone(), labeling, config.timeout)?;
    let mut tie_rng = rng::stream(config.seed, "eval-ties");
    let (mut total, mut disc, mut wins) = (0.0, 0.0, 0usize);
    for i in 0..config.episodes {
        let task = &tasks[i % tasks.len()];
        penv.set_task(task.machine.clone());
        let mut env_rng = rng::substream(config.seed, "eval-episode", i as u64);
        let mut last = penv.reset(&mut env_rng);
        while !last.done {
            let action = table.greedy(&state_key(&penv, task), &mut tie_rng);
            last = penv.step(action)?;
        }
        let r = last.reward.reward();
        total += r;
        disc += discounted(r, penv.steps(), config.gamma);
        wins += usize::from(r > 0.0);
    }
    let n = config.episodes.max(1) as f64;
    Ok(DistributionReport {
        distribution: distribution.to_string(),
        total_return: total / n,
        discounted_return: disc / n,
        success_rate: wins as f64 / n,
        episodes: config.episodes,
        seed: config.seed,
    })
}

pub const METRICS_HEADER: &str = "distribution,total_return,discounted_return,episodes,seed";

/// Rows of a results table, one per task distribution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<DistributionReport>,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{METRICS_HEADER}\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.distribution, r.total_return, r.discounted_return, r.episodes, r.seed
            )
            .expect("write to string");
        }
        out
    }

    /// `distribution  total (discounted)` lines with three decimals.
    pub fn to_table(&self) -> String {
        let width = self.rows.iter().map(|r| r.distribution.len()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &self.rows {
            writeln!(
                out,
                "{:width$}  {:.3} ({:.3})",
                r.distribution, r.total_return, r.discounted_return
            )
            .expect("write to string");
        }
        out
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), AgentError> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }
}
