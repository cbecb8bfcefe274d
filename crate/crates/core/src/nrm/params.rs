use super::{softmax_in_place, NrmError};
use crate::automata::{MooreMachine, Verdict};

pub const DEFAULT_TAU: f64 = 1.0;
pub const DEFAULT_MAGNITUDE: f64 = 10.0;

/// Logits of a probabilistic Moore machine with `|Q|` states over `|P|`
/// symbols and the three rewards in `(0, +1, -1)` column order.
#[derive(Debug, Clone, PartialEq)]
pub struct NrmParams {
    pub num_states: usize,
    pub num_symbols: usize,
    /// Initial-state logits, length `|Q|`.
    pub theta_mu: Vec<f64>,
    /// Transition logits, `theta_t[(p * |Q| + q) * |Q| + q']`.
    pub theta_t: Vec<f64>,
    /// Output logits, `theta_r[q * 3 + k]`.
    pub theta_r: Vec<f64>,
    pub tau: f64,
}

impl NrmParams {
    pub fn zeros(num_states: usize, num_symbols: usize, tau: f64) -> Self {
        Self {
            num_states,
            num_symbols,
            theta_mu: vec![0.0; num_states],
            theta_t: vec![0.0; num_symbols * num_states * num_states],
            theta_r: vec![0.0; num_states * Verdict::COUNT],
            tau,
        }
    }

    /// Encodes a deterministic machine: `magnitude` on the initial state, on
    /// every transition target and on every state's output, zero elsewhere.
    /// As `magnitude / tau` grows the distributions become one-hot.
    pub fn from_machine(m: &MooreMachine, tau: f64, magnitude: f64) -> Result<Self, NrmError> {
        if !(tau > 0.0) {
            return Err(NrmError::InvalidParameter(format!("temperature must be positive, got {tau}")));
        }
        if !(magnitude >= 0.0) {
            return Err(NrmError::InvalidParameter(format!("magnitude must be non-negative, got {magnitude}")));
        }
        let (nq, np) = (m.num_states(), m.num_symbols());
        let mut params = Self::zeros(nq, np, tau);
        params.theta_mu[m.initial() as usize] = magnitude;
        for q in 0..nq {
            for p in 0..np {
                let target = m.transitions()[q * np + p] as usize;
                params.theta_t[(p * nq + q) * nq + target] = magnitude;
            }
            params.theta_r[q * Verdict::COUNT + m.output(q as u32).index()] = magnitude;
        }
        Ok(params)
    }

    /// Evaluates the temperature softmaxes once. Task parameters are frozen
    /// during grounder training, so the result can be shared by every pass.
    pub fn probabilities(&self) -> Nrm {
        let nq = self.num_states;
        let scaled = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| x / self.tau).collect() };
        let mut mu = scaled(&self.theta_mu);
        softmax_in_place(&mut mu);
        let mut t = scaled(&self.theta_t);
        for row in t.chunks_mut(nq.max(1)) {
            softmax_in_place(row);
        }
        let mut r = scaled(&self.theta_r);
        for row in r.chunks_mut(Verdict::COUNT) {
            softmax_in_place(row);
        }
        Nrm {
            num_states: nq,
            num_symbols: self.num_symbols,
            mu,
            t,
            r,
        }
    }
}

/// Stochastic matrices of a probabilistic Moore machine.
#[derive(Debug, Clone, PartialEq)]
pub struct Nrm {
    pub num_states: usize,
    pub num_symbols: usize,
    /// Initial distribution `μ`.
    pub mu: Vec<f64>,
    /// `t[(p * |Q| + q) * |Q| + q']` = P(q' | q, p).
    pub t: Vec<f64>,
    /// `r[q * 3 + k]` = P(reward k | q), columns `(0, +1, -1)`.
    pub r: Vec<f64>,
}

impl Nrm {
    pub fn from_machine(m: &MooreMachine) -> Self {
        NrmParams::from_machine(m, DEFAULT_TAU, DEFAULT_MAGNITUDE)
            .expect("default temperature and magnitude are valid")
            .probabilities()
    }

    /// Row `q` of the transition matrix for symbol `p`.
    pub fn transition_row(&self, p: usize, q: usize) -> &[f64] {
        let nq = self.num_states;
        &self.t[(p * nq + q) * nq..(p * nq + q + 1) * nq]
    }

    pub fn reward_row(&self, q: usize) -> &[f64] {
        &self.r[q * Verdict::COUNT..(q + 1) * Verdict::COUNT]
    }

    /// `out = v · T[p]`, accumulated with weight `w`.
    pub(crate) fn add_step(&self, p: usize, v: &[f64], w: f64, out: &mut [f64]) {
        for (q, &vq) in v.iter().enumerate() {
            let scale = w * vq;
            if scale == 0.0 {
                continue;
            }
            for (o, &tq) in out.iter_mut().zip(self.transition_row(p, q)) {
                *o += scale * tq;
            }
        }
    }

    /// `v · R`.
    pub(crate) fn rewards(&self, v: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (q, &vq) in v.iter().enumerate() {
            for (o, &rk) in out.iter_mut().zip(self.reward_row(q)) {
                *o += vq * rk;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::compile;
    use crate::ltl::{parse, Alphabet};

    fn assert_stochastic(v: &[f64]) {
        assert!(v.iter().all(|&x| x >= 0.0));
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn saturated_eventually() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let m = compile(&parse("F a", &al).unwrap(), &al).unwrap();
        let nrm = NrmParams::from_machine(&m, 1.0, 10.0).unwrap().probabilities();
        assert_stochastic(&nrm.mu);
        // e^10 / (e^10 + 1) on the initial state
        let expected = 1.0 / (1.0 + (-10.0f64).exp());
        assert!((nrm.mu[m.initial() as usize] - expected).abs() < 1e-12);
        assert!(1.0 - nrm.mu[m.initial() as usize] < 5e-5);
    }

    #[test]
    fn zero_magnitude_is_uniform() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let m = compile(&parse("a U b", &al).unwrap(), &al).unwrap();
        let nrm = NrmParams::from_machine(&m, 1.0, 0.0).unwrap().probabilities();
        let nq = m.num_states() as f64;
        assert!(nrm.mu.iter().all(|&x| (x - 1.0 / nq).abs() < 1e-15));
        assert!(nrm.t.iter().all(|&x| (x - 1.0 / nq).abs() < 1e-15));
        assert!(nrm.r.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn rows_are_stochastic() {
        let al = Alphabet::new(["a", "b", "c"]).unwrap();
        let m = compile(&parse("!c U (a & F b)", &al).unwrap(), &al).unwrap();
        for tau in [0.1, 1.0, 7.0] {
            let nrm = NrmParams::from_machine(&m, tau, 10.0).unwrap().probabilities();
            assert_stochastic(&nrm.mu);
            for p in 0..nrm.num_symbols {
                for q in 0..nrm.num_states {
                    assert_stochastic(nrm.transition_row(p, q));
                }
            }
            for q in 0..nrm.num_states {
                assert_stochastic(nrm.reward_row(q));
            }
        }
    }

    #[test]
    fn rejects_bad_temperature() {
        let al = Alphabet::new(["a"]).unwrap();
        let m = compile(&parse("F a", &al).unwrap(), &al).unwrap();
        assert!(NrmParams::from_machine(&m, 0.0, 10.0).is_err());
        assert!(NrmParams::from_machine(&m, 1.0, f64::NAN).is_err());
    }
}
