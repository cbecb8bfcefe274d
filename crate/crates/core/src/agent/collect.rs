use std::sync::Arc;

use rand::Rng;

use super::train::AgentTask;
use super::AgentError;
use crate::env::{Environment, Labeling, ProductEnv};
use crate::nrm::{Episode, Grounder, LabeledObservations};
use crate::rng;

/// Runs uniformly random policies in grounder mode until `wanted`
/// informative episodes are collected or `max_episodes` have been run.
/// Tasks are drawn uniformly per episode.
pub fn collect_random_walk<E: Environment>(
    env: E,
    tasks: &[AgentTask],
    grounder: &Grounder,
    wanted: usize,
    max_episodes: usize,
    timeout: usize,
    seed: u64,
) -> Result<Vec<Episode>, AgentError> {
    if tasks.is_empty() {
        return Err(AgentError::NoTasks);
    }
    let labeling = Labeling::Grounder(Arc::new(grounder.clone()));
    let mut penv = ProductEnv::new(env, tasks[0].machine.clone(), labeling, timeout)?;
    let num_actions = penv.env().num_actions();
    let mut r = rng::stream(seed, "random-walk");
    let mut out = Vec::with_capacity(wanted);
    for i in 0..max_episodes {
        if out.len() >= wanted {
            break;
        }
        let k = r.gen_range(0..tasks.len());
        let machine = &tasks[k].machine;
        penv.set_task(machine.clone());
        let start = penv.reset(&mut rng::substream(seed, "random-walk-episode", i as u64));
        let mut observations = start.observation;
        let mut rewards = vec![start.reward];
        let mut exposed = vec![machine.output(penv.exposed_state())];
        let mut done = start.done;
        while !done {
            let step = penv.step(r.gen_range(0..num_actions))?;
            observations.extend_from_slice(&step.observation);
            rewards.push(step.reward);
            exposed.push(machine.output(step.info.exposed_state));
            done = step.done;
        }
        let episode = Episode::new(i as u64, k, observations, rewards, &exposed);
        if episode.informative {
            out.push(episode);
        }
    }
    Ok(out)
}

/// Oracle-labeled observations from fresh episodes, each taken after a
/// random walk of up to `max_walk` steps. For measuring grounder accuracy.
pub fn labeled_observations<E: Environment>(mut env: E, n: usize, max_walk: usize, seed: u64) -> LabeledObservations {
    let mut set = LabeledObservations::new(env.observation_dim());
    let mut r = rng::stream(seed, "labeled-observations");
    for i in 0..n {
        env.reset(&mut rng::substream(seed, "labeled-episode", i as u64));
        for _ in 0..r.gen_range(0..=max_walk) {
            env.step(r.gen_range(0..env.num_actions()));
        }
        set.push(&env.observation(), env.oracle_label().index());
    }
    set
}
