use std::collections::{HashMap, VecDeque};

use super::machine::{MooreMachine, StateId, Verdict};
use crate::ltl::{progress_named, verdict, Formula, Symbol};

/// A trace on which progression and the machine disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub trace: Vec<Symbol>,
    pub progression: i8,
    pub machine: Verdict,
}

/// Checks that `machine` emits, on every finite trace, the verdict obtained by
/// iterated progression of `f`.
///
/// Both sides are deterministic and finite-state, so exploring the reachable
/// pairs (progressed formula, machine state) covers traces of every length.
/// Returns a shortest disagreeing trace on failure.
pub fn verify_against_progression(f: &Formula, machine: &MooreMachine) -> Result<usize, Box<Disagreement>> {
    let alphabet = machine.alphabet();
    let names: Vec<&str> = alphabet.names().collect();
    let root = f.canonicalize();
    let mut seen: HashMap<(Formula, StateId), usize> = HashMap::new();
    // (parent index, symbol) for trace reconstruction
    let mut parent: Vec<Option<(usize, Symbol)>> = Vec::new();
    let mut nodes: Vec<(Formula, StateId)> = Vec::new();
    let mut queue = VecDeque::new();

    let start = (root, machine.initial());
    seen.insert(start.clone(), 0);
    nodes.push(start);
    parent.push(None);
    queue.push_back(0usize);

    while let Some(i) = queue.pop_front() {
        let (formula, q) = nodes[i].clone();
        let expected = verdict(&formula);
        let got = machine.output(q);
        if expected != got.value() {
            let mut trace = Vec::new();
            let mut at = i;
            while let Some((p, s)) = parent[at] {
                trace.push(s);
                at = p;
            }
            trace.reverse();
            return Err(Box::new(Disagreement {
                trace,
                progression: expected,
                machine: got,
            }));
        }
        if got.is_terminal() {
            continue;
        }
        for (s, name) in names.iter().enumerate() {
            let sym = Symbol(s as u16);
            let pair = (progress_named(&formula, name), machine.next(q, sym));
            if !seen.contains_key(&pair) {
                let j = nodes.len();
                seen.insert(pair.clone(), j);
                nodes.push(pair);
                parent.push(Some((i, sym)));
                queue.push_back(j);
            }
        }
    }
    Ok(nodes.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::compile;
    use crate::ltl::{parse, Alphabet};

    #[test]
    fn compiled_machine_agrees() {
        let al = Alphabet::new(["pick", "lava", "door", "apple", "egg"]).unwrap();
        let f = parse("!lava U (egg & (!lava U (pick & (!lava U door))))", &al).unwrap();
        let m = compile(&f, &al).unwrap();
        assert!(verify_against_progression(&f, &m).is_ok());
    }

    #[test]
    fn reports_shortest_counterexample() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let f = parse("F a", &al).unwrap();
        let wrong = compile(&parse("F b", &al).unwrap(), &al).unwrap();
        let d = verify_against_progression(&f, &wrong).unwrap_err();
        assert_eq!(d.trace.len(), 1);
    }
}
