use rand::seq::SliceRandom;
use rand::Rng;

use super::{TaskClass, TaskConfig, TaskError};
use crate::ltl::{Alphabet, Formula, Symbol};

/// One step of a partially-ordered sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Prop(Symbol),
    /// Disjunction of two distinct propositions.
    Either(Symbol, Symbol),
}

impl Term {
    fn formula(self, alphabet: &Alphabet) -> Formula {
        match self {
            Term::Prop(p) => Formula::atom(alphabet.name(p)),
            Term::Either(p, q) => Formula::or(vec![
                Formula::atom(alphabet.name(p)),
                Formula::atom(alphabet.name(q)),
            ]),
        }
    }
}

/// Global-avoidance task before it is turned into a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvoidanceTask {
    pub avoid: Symbol,
    pub sequences: Vec<Vec<Symbol>>,
}

fn propositions(alphabet: &Alphabet) -> Vec<Symbol> {
    alphabet.propositions().collect()
}

/// Draws the sequence/term structure of a partially-ordered task.
pub fn sample_po_terms<R: Rng + ?Sized>(config: &TaskConfig, rng: &mut R) -> Result<Vec<Vec<Term>>, TaskError> {
    config.validate()?;
    let props = propositions(&config.alphabet);
    let k = rng.gen_range(config.sequences.0..=config.sequences.1);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let len = rng.gen_range(config.length.0..=config.length.1);
        let seq = (0..len)
            .map(|_| {
                if config.disjunction_prob > 0.0 && rng.gen_bool(config.disjunction_prob) {
                    let pair: Vec<Symbol> = props.choose_multiple(rng, 2).copied().collect();
                    Term::Either(pair[0], pair[1])
                } else {
                    Term::Prop(*props.choose(rng).unwrap())
                }
            })
            .collect();
        out.push(seq);
    }
    Ok(out)
}

/// `F(t1 & F(t2 & ... F tn))` per sequence, conjoined.
pub fn po_formula(sequences: &[Vec<Term>], alphabet: &Alphabet) -> Formula {
    let seqs = sequences
        .iter()
        .map(|terms| {
            terms.iter().rev().fold(None, |tail: Option<Formula>, t| {
                let body = match tail {
                    None => t.formula(alphabet),
                    Some(rest) => Formula::and(vec![t.formula(alphabet), rest]),
                };
                Some(Formula::eventually(body))
            })
        })
        .map(|f| f.expect("sequences are non-empty"))
        .collect();
    Formula::and(seqs).canonicalize()
}

pub fn sample_po<R: Rng + ?Sized>(config: &TaskConfig, rng: &mut R) -> Result<Formula, TaskError> {
    let terms = sample_po_terms(config, rng)?;
    Ok(po_formula(&terms, &config.alphabet))
}

/// Draws the avoided proposition and the target sequences of a
/// global-avoidance task. The avoided proposition never appears as a target.
pub fn sample_ga_structure<R: Rng + ?Sized>(config: &TaskConfig, rng: &mut R) -> Result<AvoidanceTask, TaskError> {
    config.validate()?;
    let props = propositions(&config.alphabet);
    let avoid = *props.choose(rng).unwrap();
    let targets: Vec<Symbol> = props.iter().copied().filter(|&p| p != avoid).collect();
    let k = rng.gen_range(config.sequences.0..=config.sequences.1);
    let sequences = (0..k)
        .map(|_| {
            let len = rng.gen_range(config.length.0..=config.length.1);
            (0..len).map(|_| *targets.choose(rng).unwrap()).collect()
        })
        .collect();
    Ok(AvoidanceTask { avoid, sequences })
}

/// `!v U (p1 & (!v U (p2 & ... (!v U pn))))` per sequence, conjoined.
pub fn ga_formula(task: &AvoidanceTask, alphabet: &Alphabet) -> Formula {
    let not_v = || Formula::not(Formula::atom(alphabet.name(task.avoid)));
    let seqs = task
        .sequences
        .iter()
        .map(|targets| {
            targets
                .iter()
                .rev()
                .fold(None, |tail: Option<Formula>, &p| {
                    let target = Formula::atom(alphabet.name(p));
                    let body = match tail {
                        None => target,
                        Some(rest) => Formula::and(vec![target, rest]),
                    };
                    Some(Formula::until(not_v(), body))
                })
                .expect("sequences are non-empty")
        })
        .collect();
    Formula::and(seqs).canonicalize()
}

pub fn sample_ga<R: Rng + ?Sized>(config: &TaskConfig, rng: &mut R) -> Result<Formula, TaskError> {
    let task = sample_ga_structure(config, rng)?;
    Ok(ga_formula(&task, &config.alphabet))
}

/// Samples from the grammar selected by `config.class`.
pub fn sample<R: Rng + ?Sized>(config: &TaskConfig, rng: &mut R) -> Result<Formula, TaskError> {
    match config.class {
        TaskClass::PartiallyOrdered => sample_po(config, rng),
        TaskClass::GlobalAvoidance => sample_ga(config, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;
    use crate::rng;

    #[test]
    fn degenerate_po_is_single_eventually() {
        let cfg = TaskConfig::minecraft_po()
            .with_sequences(1, 1)
            .with_length(1, 1)
            .with_disjunction_prob(0.0);
        let mut r = rng::stream(1, "t");
        for _ in 0..50 {
            let f = sample_po(&cfg, &mut r).unwrap();
            match &f {
                Formula::Until(lhs, rhs) => {
                    assert!(lhs.is_true());
                    assert!(matches!(**rhs, Formula::Atom(_)));
                }
                other => panic!("unexpected {other}"),
            }
        }
    }

    #[test]
    fn single_ga_sequence() {
        let cfg = TaskConfig::minecraft_ga().with_sequences(1, 1).with_length(1, 1);
        let mut r = rng::stream(2, "t");
        let task = sample_ga_structure(&cfg, &mut r).unwrap();
        let f = ga_formula(&task, &cfg.alphabet);
        let al = &cfg.alphabet;
        let expected = parse(
            &format!("!{} U {}", al.name(task.avoid), al.name(task.sequences[0][0])),
            al,
        )
        .unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn disjunction_needs_two_props() {
        let cfg = TaskConfig::minecraft_po().with_alphabet(Alphabet::new(["a"]).unwrap());
        let mut r = rng::stream(3, "t");
        assert!(matches!(sample_po(&cfg, &mut r), Err(TaskError::AlphabetTooSmall { .. })));
        let cfg = cfg.with_disjunction_prob(0.0);
        assert!(sample_po(&cfg, &mut r).is_ok());
        let ga = TaskConfig::minecraft_ga().with_alphabet(Alphabet::new(["a"]).unwrap());
        assert!(matches!(sample_ga(&ga, &mut r), Err(TaskError::AlphabetTooSmall { .. })));
    }

    #[test]
    fn fig1_is_a_ga_shape() {
        let al = Alphabet::new(["pick", "lava", "door", "apple", "egg"]).unwrap();
        let task = AvoidanceTask {
            avoid: al.symbol("lava").unwrap(),
            sequences: vec![vec![
                al.symbol("egg").unwrap(),
                al.symbol("pick").unwrap(),
                al.symbol("door").unwrap(),
            ]],
        };
        assert_eq!(
            ga_formula(&task, &al),
            parse("!lava U (egg & (!lava U (pick & (!lava U door))))", &al).unwrap()
        );
    }
}
