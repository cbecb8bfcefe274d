//! Test-only oracles, independent of the progression/compilation code paths.
#![allow(dead_code)]

use ltl_ground::ltl::{Alphabet, Formula, Symbol};
use proptest::prelude::*;

/// Evaluates `f` on the infinite word `prefix · cycle^ω` using the standard
/// fixpoint semantics of LTL. `cycle` must be non-empty.
pub fn eval_lasso(f: &Formula, alphabet: &Alphabet, prefix: &[Symbol], cycle: &[Symbol]) -> bool {
    assert!(!cycle.is_empty());
    let word: Vec<&str> = prefix.iter().chain(cycle).map(|&s| alphabet.name(s)).collect();
    eval_positions(f, &word, prefix.len())[0]
}

fn eval_positions(f: &Formula, word: &[&str], loop_start: usize) -> Vec<bool> {
    let n = word.len();
    let succ = |i: usize| if i + 1 < n { i + 1 } else { loop_start };
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => word.iter().map(|w| *w == &**a).collect(),
        Formula::Not(x) => eval_positions(x, word, loop_start).into_iter().map(|b| !b).collect(),
        Formula::And(xs) => xs.iter().fold(vec![true; n], |acc, x| {
            let v = eval_positions(x, word, loop_start);
            acc.iter().zip(v).map(|(a, b)| *a && b).collect()
        }),
        Formula::Or(xs) => xs.iter().fold(vec![false; n], |acc, x| {
            let v = eval_positions(x, word, loop_start);
            acc.iter().zip(v).map(|(a, b)| *a || b).collect()
        }),
        Formula::Next(x) => {
            let v = eval_positions(x, word, loop_start);
            (0..n).map(|i| v[succ(i)]).collect()
        }
        Formula::Until(a, b) => {
            let va = eval_positions(a, word, loop_start);
            let vb = eval_positions(b, word, loop_start);
            until_fixpoint(&va, &vb, succ)
        }
        Formula::Eventually(x) => {
            let vb = eval_positions(x, word, loop_start);
            until_fixpoint(&vec![true; n], &vb, succ)
        }
        Formula::Globally(x) => {
            let not_x: Vec<bool> = eval_positions(x, word, loop_start).into_iter().map(|b| !b).collect();
            until_fixpoint(&vec![true; n], &not_x, succ)
                .into_iter()
                .map(|b| !b)
                .collect()
        }
    }
}

fn until_fixpoint(a: &[bool], b: &[bool], succ: impl Fn(usize) -> usize) -> Vec<bool> {
    let n = a.len();
    let mut u = vec![false; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let v = b[i] || (a[i] && u[succ(i)]);
            if v != u[i] {
                u[i] = v;
                changed = true;
            }
        }
        if !changed {
            return u;
        }
    }
}

/// Calls `visit` on every word over `p` symbols of length `0..=max_len`.
pub fn for_each_trace(p: usize, max_len: usize, mut visit: impl FnMut(&[Symbol])) {
    fn rec(p: usize, left: usize, cur: &mut Vec<Symbol>, visit: &mut impl FnMut(&[Symbol])) {
        visit(cur);
        if left == 0 {
            return;
        }
        for s in 0..p {
            cur.push(Symbol(s as u16));
            rec(p, left - 1, cur, visit);
            cur.pop();
        }
    }
    rec(p, max_len, &mut Vec::new(), &mut visit);
}

/// All lassos `(prefix, cycle)` with `|prefix| + |cycle| <= max_total` and a
/// non-empty cycle.
pub fn lassos(p: usize, max_total: usize) -> Vec<(Vec<Symbol>, Vec<Symbol>)> {
    let mut words: Vec<Vec<Symbol>> = Vec::new();
    for_each_trace(p, max_total, |w| words.push(w.to_vec()));
    let mut out = Vec::new();
    for w in &words {
        for split in 0..w.len() {
            out.push((w[..split].to_vec(), w[split..].to_vec()));
        }
    }
    out
}

/// Random formula over `atoms` using every connective.
pub fn arb_formula(atoms: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        6 => proptest::sample::select(atoms).prop_map(Formula::atom),
    ];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::and),
            proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::or),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            inner.clone().prop_map(Formula::eventually),
            inner.prop_map(Formula::globally),
        ]
    })
    .boxed()
}

/// Random co-safe formula: negations only on atoms, temporal operators
/// limited to `X`, `U`, `F`.
pub fn arb_cosafe(atoms: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let lit = prop_oneof![
        1 => Just(Formula::True),
        5 => proptest::sample::select(atoms).prop_map(Formula::atom),
        3 => proptest::sample::select(atoms).prop_map(|a| Formula::not(Formula::atom(a))),
    ];
    lit.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..3).prop_map(Formula::and),
            proptest::collection::vec(inner.clone(), 2..3).prop_map(Formula::or),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            inner.prop_map(Formula::eventually),
        ]
    })
    .prop_map(|f| f.canonicalize())
    .boxed()
}

pub mod nrm_oracles {
    use ltl_ground::automata::{MooreMachine, Verdict};
    use ltl_ground::ltl::{Alphabet, Symbol};
    use ltl_ground::nrm::{backward, forward, forward_symbols, loss, Grounder, NrmParams};
    use ltl_ground::rng;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    /// Largest relative error between the BPTT gradient and central finite
    /// differences (step 1e-5) over every grounder parameter of one random
    /// instance with `|Q| <= 5`, `|P| <= 4`, `T <= 8`.
    pub fn finite_difference_error(seed: u64) -> f64 {
        let mut r = rng::substream(seed, "fd-instance", 0);
        let nq = r.gen_range(1..=5);
        let np = r.gen_range(1..=4);
        let steps = r.gen_range(1..=8);
        let dim = r.gen_range(1..=4);
        let normal = Normal::new(0.0, 1.5).unwrap();
        let mut params = NrmParams::zeros(nq, np, 1.0);
        for v in params.theta_mu.iter_mut().chain(&mut params.theta_t).chain(&mut params.theta_r) {
            *v = normal.sample(&mut r);
        }
        let nrm = params.probabilities();
        let mut g = Grounder::zeros(dim, np);
        let flat: Vec<f64> = (0..g.num_params()).map(|_| normal.sample(&mut r)).collect();
        g.set_params(&flat);
        let obs: Vec<f64> = (0..steps * dim).map(|_| normal.sample(&mut r)).collect();
        let target: Vec<Verdict> = (0..steps).map(|_| Verdict::from_index(r.gen_range(0..3))).collect();

        let (_, grad) = backward(&nrm, &g, &obs, &target).unwrap();
        let eval = |theta: &[f64]| {
            let mut h = g.clone();
            h.set_params(theta);
            loss(&forward(&nrm, &h, &obs).unwrap().rewards, &target)
        };
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 0..flat.len() {
            let mut plus = flat.clone();
            plus[i] += h;
            let mut minus = flat.clone();
            minus[i] -= h;
            let fd = (eval(&plus) - eval(&minus)) / (2.0 * h);
            let rel = (grad[i] - fd).abs() / grad[i].abs().max(fd.abs()).max(1e-6);
            worst = worst.max(rel);
        }
        worst
    }

    /// Uniformly random total Moore machine.
    pub fn random_machine<R: Rng>(alphabet: &Alphabet, num_states: usize, r: &mut R) -> MooreMachine {
        let p = alphabet.len();
        let transitions = (0..num_states * p).map(|_| r.gen_range(0..num_states as u32)).collect();
        let outputs = (0..num_states).map(|_| Verdict::from_index(r.gen_range(0..3))).collect();
        MooreMachine::new(alphabet.clone(), r.gen_range(0..num_states as u32), transitions, outputs).unwrap()
    }

    /// Number of (trace, step) pairs, over all traces up to `max_len`, where
    /// the saturated relaxation's reward argmax differs from the machine.
    pub fn degenerate_mismatches(m: &MooreMachine, max_len: usize) -> usize {
        let nrm = NrmParams::from_machine(m, 1.0, 10.0).unwrap().probabilities();
        let p = m.num_symbols();
        let mut bad = 0;
        super::for_each_trace(p, max_len, |trace| {
            // The first observation's symbol is not consumed.
            let mut symbols = vec![vec![0.0; p]];
            for s in trace {
                let mut onehot = vec![0.0; p];
                onehot[s.index()] = 1.0;
                symbols.push(onehot);
            }
            let pass = forward_symbols(&nrm, symbols);
            let mut q = m.initial();
            for t in 0..=trace.len() {
                if t > 0 {
                    q = m.next(q, trace[t - 1]);
                }
                let r = pass.rewards[t];
                let arg = (0..3).max_by(|&a, &b| r[a].total_cmp(&r[b])).unwrap();
                if Verdict::from_index(arg) != m.output(q) {
                    bad += 1;
                }
            }
        });
        bad
    }

    pub fn one_hot_trace(p: usize, trace: &[Symbol]) -> Vec<f64> {
        let mut v = vec![0.0; p * (trace.len() + 1)];
        for (t, s) in trace.iter().enumerate() {
            v[(t + 1) * p + s.index()] = 1.0;
        }
        v
    }
}

/// Fixed-layout gridworld set-up shared by the agent tests and the
/// acceptance report.
pub mod desk {
    use std::sync::Arc;

    use ltl_ground::agent::{
        collect_random_walk, discounted, evaluate, labeled_observations, train_joint, AgentTask, EvalConfig, EvalReport,
        JointConfig, LabelingMode, QConfig, QTable, StateKey,
    };
    use ltl_ground::automata::{CompileOptions, MooreMachine};
    use ltl_ground::env::{
        Environment, GridConfig, GridLayout, GridWorld, Labeling, ProductEnv, DEFAULT_TIMEOUT, GRID_ACTIONS,
    };
    use ltl_ground::nrm::{train_grounder, Grounder, ReplayBuffers, TrainerConfig};
    use ltl_ground::rng;
    use ltl_ground::tasks::{build_dataset, TaskConfig};

    /// Asymmetric 5×5 map with two copies of each proposition.
    pub const LAYOUT: &str = "p...l/..d../.l.../....p/d....";

    pub fn fixed_grid() -> GridWorld {
        let config = GridConfig::small();
        let layout = GridLayout::parse(LAYOUT, &config.alphabet).unwrap();
        GridWorld::new(config.with_layout(layout)).unwrap()
    }

    /// Optimal values of the explicit product MDP over (cell, machine state),
    /// indexed `cell * |Q| + q`. Entering a state with a terminal output pays
    /// that output and ends the episode.
    pub fn value_iteration(grid: &GridWorld, m: &MooreMachine, gamma: f64) -> Vec<f64> {
        let n = grid.layout().size();
        let nq = m.num_states();
        let mut v = vec![0.0; n * n * nq];
        loop {
            let mut delta: f64 = 0.0;
            for cell in 0..n * n {
                for q in 0..nq {
                    if m.output(q as u32).is_terminal() {
                        continue;
                    }
                    let best = GRID_ACTIONS
                        .iter()
                        .map(|&a| {
                            let (r2, c2) = grid.moved((cell / n, cell % n), a);
                            let q2 = match grid.layout().get(r2, c2) {
                                Some(s) => m.next(q as u32, s),
                                None => m.next(q as u32, m.alphabet().empty_symbol()),
                            };
                            let out = m.output(q2);
                            let future = if out.is_terminal() { 0.0 } else { v[(r2 * n + c2) * nq + q2 as usize] };
                            out.reward() + gamma * future
                        })
                        .fold(f64::NEG_INFINITY, f64::max);
                    let i = cell * nq + q;
                    delta = delta.max((best - v[i]).abs());
                    v[i] = best;
                }
            }
            if delta < 1e-13 {
                return v;
            }
        }
    }

    /// Largest gap between the optimal value and the discounted return of
    /// the greedy policy, over every empty start cell.
    pub fn greedy_gap(grid: &GridWorld, table: &QTable, task: &AgentTask, gamma: f64, timeout: usize) -> f64 {
        let m = &task.machine;
        let v = value_iteration(grid, m, gamma);
        let n = grid.layout().size();
        let nq = m.num_states();
        let mut penv = ProductEnv::new(grid.clone(), m.clone(), Labeling::Oracle, timeout).unwrap();
        let mut ties = rng::stream(0, "greedy-gap");
        let starts: Vec<(usize, usize)> = grid.layout().empty_cells().collect();
        let mut gap: f64 = 0.0;
        for (row, col) in starts {
            penv.reset(&mut rng::stream(0, "unused"));
            penv.env_mut().set_agent(row, col);
            let mut last = None;
            while !penv.is_done() {
                let key = StateKey {
                    observation: penv.env().state_key(),
                    task_state: task.state_ids[penv.exposed_state() as usize],
                };
                last = Some(penv.step(table.greedy(&key, &mut ties)).unwrap());
            }
            let r = last.map_or(0.0, |s| s.reward.reward());
            let got = discounted(r, penv.steps(), gamma);
            let want = v[(row * n + col) * nq + m.initial() as usize];
            gap = gap.max((want - got).abs());
        }
        gap
    }


    pub fn po_config(grid: &GridWorld) -> TaskConfig {
        TaskConfig::minecraft_po()
            .with_alphabet(grid.alphabet().clone())
            .with_sequences(1, 2)
            .with_length(1, 2)
    }

    pub fn ga_config(grid: &GridWorld) -> TaskConfig {
        TaskConfig::minecraft_ga()
            .with_alphabet(grid.alphabet().clone())
            .with_sequences(1, 1)
            .with_length(1, 2)
    }

    pub fn tasks(config: &TaskConfig, n: usize, seed: u64) -> Vec<AgentTask> {
        AgentTask::from_entries(&build_dataset(config, n, seed, CompileOptions::default()).unwrap().entries)
    }

    /// Trains a grounder from random-walk episodes on random 5×5 layouts
    /// and returns its held-out accuracy.
    pub fn recovery_accuracy(seed: u64) -> f64 {
        let grid = GridWorld::new(GridConfig::small()).unwrap();
        let mut tasks = tasks(&po_config(&grid), 100, seed);
        tasks.extend(tasks_ga(&grid, seed));
        let g0 = Grounder::random(grid.observation_dim(), grid.alphabet().len(), &mut rng::stream(seed, "grounder-init"));
        let episodes = collect_random_walk(grid.clone(), &tasks, &g0, 2000, 100_000, DEFAULT_TIMEOUT, seed).unwrap();
        assert_eq!(episodes.len(), 2000);
        let mut buffers = ReplayBuffers::default();
        for e in episodes {
            buffers.push(e);
        }
        let held_out = labeled_observations(grid, 2000, 10, seed.wrapping_add(1 << 32));
        let nrms: Vec<_> = tasks.iter().map(|t| t.nrm.clone()).collect();
        let config = TrainerConfig {
            max_rounds: 60,
            ..TrainerConfig::default()
        };
        let report = train_grounder(&buffers, &nrms, g0, config, &mut rng::stream(seed, "grounder-fit"), None).unwrap();
        held_out.accuracy(&report.grounder)
    }

    fn tasks_ga(grid: &GridWorld, seed: u64) -> Vec<AgentTask> {
        tasks(&ga_config(grid), 100, seed)
    }

    pub struct Parity {
        pub oracle: EvalReport,
        pub joint: EvalReport,
        pub grounder_accuracy: f64,
    }

    /// Oracle-labeling and jointly-trained agents under the same budget on
    /// the fixed map, each evaluated on held-out base, `+dep` and `+conj`
    /// tasks.
    pub fn parity(seed: u64, episodes: usize) -> Parity {
        let grid = fixed_grid();
        let base = po_config(&grid);
        let (deeper, wider) = base.generalization();
        let train = tasks(&base, 200, seed);
        let distributions = [
            ("base", tasks(&base, 200, seed + 1000)),
            ("+dep", tasks(&deeper, 200, seed + 2000)),
            ("+conj", tasks(&wider, 200, seed + 3000)),
        ];
        let g0 = Grounder::random(grid.observation_dim(), grid.alphabet().len(), &mut rng::stream(seed, "grounder-init"));
        let accuracy_set = labeled_observations(grid.clone(), 1000, 10, seed.wrapping_add(1 << 32));
        let eval = EvalConfig {
            episodes: 200,
            timeout: DEFAULT_TIMEOUT,
            gamma: QConfig::default().gamma,
            seed,
        };
        let run = |mode: LabelingMode| {
            let config = JointConfig {
                episodes,
                mode,
                seed,
                ..JointConfig::default()
            };
            let result = train_joint(grid.clone(), &train, g0.clone(), &config, None).unwrap();
            let labeling = match mode {
                LabelingMode::Oracle => Labeling::Oracle,
                LabelingMode::Grounder => Labeling::Grounder(Arc::new(result.grounder.clone())),
            };
            let rows = distributions
                .iter()
                .map(|(name, tasks)| evaluate(grid.clone(), &result.table, labeling.clone(), tasks, name, eval).unwrap())
                .collect();
            (EvalReport { rows }, result.grounder)
        };
        let (oracle, _) = run(LabelingMode::Oracle);
        let (joint, grounder) = run(LabelingMode::Grounder);
        Parity {
            oracle,
            joint,
            grounder_accuracy: accuracy_set.accuracy(&grounder),
        }
    }

    /// Greedy-policy gap to value iteration for every task with at most six
    /// states, each learned from scratch on its own.
    pub fn optimality_gaps(seed: u64, episodes: usize) -> Vec<(String, usize, f64)> {
        let grid = fixed_grid();
        let mut all = tasks(&po_config(&grid), 10, seed);
        all.extend(tasks_ga(&grid, seed).into_iter().take(10));
        all.retain(|t| t.machine.num_states() <= 6 && !t.machine.output(t.machine.initial()).is_terminal());
        let config = JointConfig {
            episodes,
            mode: LabelingMode::Oracle,
            seed,
            ..JointConfig::default()
        };
        let gamma = config.q.gamma;
        all.iter()
            .map(|t| {
                let zeros = Grounder::zeros(grid.observation_dim(), grid.alphabet().len());
                let result = train_joint(grid.clone(), std::slice::from_ref(t), zeros, &config, None).unwrap();
                let gap = greedy_gap(&grid, &result.table, t, gamma, DEFAULT_TIMEOUT);
                (t.formula.to_string(), t.machine.num_states(), gap)
            })
            .collect()
    }
}
