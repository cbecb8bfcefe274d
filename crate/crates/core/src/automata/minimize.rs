//! Hopcroft partition refinement for Moore machines.

use std::collections::VecDeque;

use super::machine::{MooreMachine, StateId, Verdict};

/// Minimal machine producing the same output sequence as `m` on every trace.
/// Unreachable states are dropped first; the result is numbered canonically
/// (BFS from the initial state), so equivalent machines come out identical.
pub fn minimize(m: &MooreMachine) -> MooreMachine {
    let reachable = m.canonical();
    let n = reachable.num_states();
    let p = reachable.num_symbols();
    let delta = reachable.transitions();

    // inverse[s][q] = states r with delta(r, s) = q
    let mut inverse: Vec<Vec<Vec<StateId>>> = vec![vec![Vec::new(); n]; p];
    for r in 0..n {
        for (s, inv) in inverse.iter_mut().enumerate() {
            inv[delta[r * p + s] as usize].push(r as StateId);
        }
    }

    // Initial partition by output value.
    let mut blocks: Vec<Vec<StateId>> = Vec::new();
    let mut block_of = vec![0usize; n];
    for v in Verdict::ORDER {
        let members: Vec<StateId> = (0..n as StateId).filter(|&q| reachable.output(q) == v).collect();
        if !members.is_empty() {
            for &q in &members {
                block_of[q as usize] = blocks.len();
            }
            blocks.push(members);
        }
    }

    let mut in_work = vec![true; blocks.len()];
    let mut work: VecDeque<usize> = (0..blocks.len()).collect();
    let mut mark = vec![false; n];

    while let Some(splitter) = work.pop_front() {
        in_work[splitter] = false;
        let splitter_states = blocks[splitter].clone();
        for inv in &inverse {
            // States with a transition into the splitter on this symbol.
            let mut touched: Vec<usize> = Vec::new();
            let mut hit: Vec<StateId> = Vec::new();
            for &q in &splitter_states {
                for &r in &inv[q as usize] {
                    if !mark[r as usize] {
                        mark[r as usize] = true;
                        hit.push(r);
                        touched.push(block_of[r as usize]);
                    }
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for b in touched {
                let (inside, outside): (Vec<StateId>, Vec<StateId>) =
                    blocks[b].iter().partition(|&&q| mark[q as usize]);
                if outside.is_empty() {
                    continue;
                }
                let new_block = blocks.len();
                for &q in &outside {
                    block_of[q as usize] = new_block;
                }
                let inside_len = inside.len();
                let outside_len = outside.len();
                blocks[b] = inside;
                blocks.push(outside);
                in_work.push(false);
                if in_work[b] {
                    in_work[new_block] = true;
                    work.push_back(new_block);
                } else {
                    let smaller = if inside_len <= outside_len { b } else { new_block };
                    in_work[smaller] = true;
                    work.push_back(smaller);
                }
            }
            for r in hit {
                mark[r as usize] = false;
            }
        }
    }

    let k = blocks.len();
    let mut transitions = vec![0; k * p];
    let mut outputs = vec![Verdict::Undecided; k];
    for (b, members) in blocks.iter().enumerate() {
        let rep = members[0] as usize;
        outputs[b] = reachable.outputs()[rep];
        for s in 0..p {
            transitions[b * p + s] = block_of[delta[rep * p + s] as usize] as StateId;
        }
    }
    let quotient = MooreMachine::new(
        reachable.alphabet().clone(),
        block_of[reachable.initial() as usize] as StateId,
        transitions,
        outputs,
    )
    .expect("quotient of a valid machine is valid");
    quotient.canonical()
}
