use super::formula::{mk_and, mk_not, mk_or, mk_until, Formula};
use super::{Alphabet, LtlError, Symbol};

/// Progresses `f` through one observation, the singleton `{sigma}`.
///
/// Atoms become `true` iff they name `sigma`; negation and the boolean
/// connectives are homomorphic; `X φ` steps to `φ`; `φ U ψ` expands to
/// `prog(ψ) ∨ (prog(φ) ∧ (φ U ψ))`. The result is canonical whenever `f` is.
pub fn progress(f: &Formula, alphabet: &Alphabet, sigma: Symbol) -> Result<Formula, LtlError> {
    if !alphabet.contains(sigma) {
        return Err(LtlError::SymbolOutOfRange {
            id: sigma.0,
            size: alphabet.len(),
        });
    }
    Ok(progress_named(f, alphabet.name(sigma)))
}

/// Same as [`progress`] with the observed symbol given by name.
pub fn progress_named(f: &Formula, sigma: &str) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(p) => {
            if &**p == sigma {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Not(x) => mk_not(progress_named(x, sigma)),
        Formula::And(xs) => mk_and(xs.iter().map(|x| progress_named(x, sigma)).collect()),
        Formula::Or(xs) => mk_or(xs.iter().map(|x| progress_named(x, sigma)).collect()),
        Formula::Next(x) => (**x).clone(),
        Formula::Until(a, b) => mk_or(vec![
            progress_named(b, sigma),
            mk_and(vec![progress_named(a, sigma), f.clone()]),
        ]),
        Formula::Eventually(x) => progress_named(&mk_until(Formula::True, (**x).clone()), sigma),
        Formula::Globally(x) => progress_named(
            &mk_not(mk_until(Formula::True, mk_not((**x).clone()))),
            sigma,
        ),
    }
}

/// Three-valued verdict of a progressed formula: `+1` once it is `true`,
/// `-1` once it is `false`, `0` otherwise.
pub fn verdict(f: &Formula) -> i8 {
    match f {
        Formula::True => 1,
        Formula::False => -1,
        _ => 0,
    }
}
