use super::{Grounder, Nrm, NrmError};
use crate::automata::Verdict;

/// Floor applied to probabilities before taking logs.
pub const LOG_FLOOR: f64 = 1e-12;

/// Intermediates of one forward pass, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Grounder outputs `p̃⁽ᵗ⁾`, one per observation. `p̃⁽⁰⁾` does not enter
    /// the recursion but is kept for accuracy bookkeeping.
    pub symbols: Vec<Vec<f64>>,
    /// State distributions `q̃⁽ᵗ⁾`.
    pub states: Vec<Vec<f64>>,
    /// Reward distributions `r̃⁽ᵗ⁾` in `(0, +1, -1)` order.
    pub rewards: Vec<[f64; 3]>,
}

fn check_dims(nrm: &Nrm, grounder: &Grounder, observations: &[f64]) -> Result<(), NrmError> {
    if grounder.num_symbols() != nrm.num_symbols {
        return Err(NrmError::Dimension(format!(
            "grounder emits {} symbols, machine reads {}",
            grounder.num_symbols(),
            nrm.num_symbols
        )));
    }
    let dim = grounder.dim();
    if dim == 0 || observations.is_empty() || observations.len() % dim != 0 {
        return Err(NrmError::Dimension(format!(
            "{} observation values are not a non-empty sequence of {dim}-dimensional features",
            observations.len()
        )));
    }
    Ok(())
}

/// Runs the probabilistic machine on grounder outputs.
///
/// `q̃⁽⁰⁾ = μ`, `q̃⁽ᵗ⁾ = Σ_j p̃⁽ᵗ⁾[j] · (q̃⁽ᵗ⁻¹⁾ 𝒯[j])` and `r̃⁽ᵗ⁾ = q̃⁽ᵗ⁾ ℛ`.
/// `observations` is the flattened sequence `s⁽⁰⁾ … s⁽ᵗ⁾`.
pub fn forward(nrm: &Nrm, grounder: &Grounder, observations: &[f64]) -> Result<ForwardPass, NrmError> {
    check_dims(nrm, grounder, observations)?;
    let symbols = observations.chunks(grounder.dim()).map(|x| grounder.predict(x)).collect();
    Ok(forward_symbols(nrm, symbols))
}

/// [`forward`] with the symbol distributions given directly.
pub fn forward_symbols(nrm: &Nrm, symbols: Vec<Vec<f64>>) -> ForwardPass {
    let nq = nrm.num_states;
    let mut states = Vec::with_capacity(symbols.len());
    let mut rewards = Vec::with_capacity(symbols.len());
    for (t, p) in symbols.iter().enumerate() {
        let q = if t == 0 {
            nrm.mu.clone()
        } else {
            let prev: &Vec<f64> = &states[t - 1];
            let mut q = vec![0.0; nq];
            for (j, &pj) in p.iter().enumerate() {
                nrm.add_step(j, prev, pj, &mut q);
            }
            q
        };
        rewards.push(nrm.rewards(&q));
        states.push(q);
    }
    ForwardPass {
        symbols,
        states,
        rewards,
    }
}

/// Mean over steps of `-ln max(r̃⁽ᵗ⁾[target], 1e-12)`.
pub fn loss(predicted: &[[f64; 3]], target: &[Verdict]) -> f64 {
    assert_eq!(predicted.len(), target.len(), "prediction and target lengths differ");
    if target.is_empty() {
        return 0.0;
    }
    let total: f64 = predicted
        .iter()
        .zip(target)
        .map(|(r, v)| -r[v.index()].max(LOG_FLOOR).ln())
        .sum();
    total / target.len() as f64
}

/// Loss and its gradient with respect to the grounder's flattened parameters
/// (weights then bias), by backpropagation through time. The machine is
/// treated as constant.
pub fn backward(nrm: &Nrm, grounder: &Grounder, observations: &[f64], target: &[Verdict]) -> Result<(f64, Vec<f64>), NrmError> {
    let pass = forward(nrm, grounder, observations)?;
    let n = pass.states.len();
    if target.len() != n {
        return Err(NrmError::Dimension(format!("{n} observations but {} rewards", target.len())));
    }
    let value = loss(&pass.rewards, target);
    let (nq, np, dim) = (nrm.num_states, nrm.num_symbols, grounder.dim());
    let mut grad = vec![0.0; grounder.num_params()];
    let (gw, gb) = grad.split_at_mut(dim * np);

    // Gradient of the loss with respect to q̃⁽ᵗ⁾ flowing back from later steps.
    let mut carry = vec![0.0; nq];
    let mut g_q = vec![0.0; nq];
    let mut t_g = vec![0.0; nq];
    for t in (0..n).rev() {
        // dL/dr̃⁽ᵗ⁾ is non-zero only at the target column, unless floored.
        let k = target[t].index();
        let rk = pass.rewards[t][k];
        let g_r = if rk > LOG_FLOOR { -1.0 / (rk * n as f64) } else { 0.0 };
        for q in 0..nq {
            g_q[q] = carry[q] + nrm.reward_row(q)[k] * g_r;
        }
        if t == 0 {
            break;
        }
        let prev = &pass.states[t - 1];
        let p = &pass.symbols[t];
        carry.iter_mut().for_each(|c| *c = 0.0);
        let mut g_p = vec![0.0; np];
        for j in 0..np {
            // t_g = T[j] · g_q
            for (q, tg) in t_g.iter_mut().enumerate() {
                *tg = nrm.transition_row(j, q).iter().zip(&g_q).map(|(a, b)| a * b).sum();
            }
            g_p[j] = prev.iter().zip(&t_g).map(|(a, b)| a * b).sum();
            for (c, tg) in carry.iter_mut().zip(&t_g) {
                *c += p[j] * tg;
            }
        }
        // Softmax Jacobian: dz = p ⊙ (g_p - p·g_p).
        let mean: f64 = p.iter().zip(&g_p).map(|(a, b)| a * b).sum();
        let x = &observations[t * dim..(t + 1) * dim];
        for j in 0..np {
            let dz = p[j] * (g_p[j] - mean);
            gb[j] += dz;
            for (i, &xi) in x.iter().enumerate() {
                gw[i * np + j] += xi * dz;
            }
        }
    }
    Ok((value, grad))
}
