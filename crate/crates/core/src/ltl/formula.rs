use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// LTL abstract syntax tree.
///
/// The derived `Ord` is the total structural order used to sort the children
/// of `And`/`Or` during canonicalization. Values produced by
/// [`Formula::canonicalize`], the parser or [`progress`](super::progress) never
/// contain `Eventually` or `Globally`: those are desugared to
/// `true U φ` and `!(true U !φ)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Arc<str>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Arc::from(name))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(lhs: Formula, rhs: Formula) -> Self {
        Formula::Until(Box::new(lhs), Box::new(rhs))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn and(children: Vec<Formula>) -> Self {
        Formula::And(children)
    }

    pub fn or(children: Vec<Formula>) -> Self {
        Formula::Or(children)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    /// Syntactic normal form: constants propagated, double negations removed,
    /// `And`/`Or` flattened, sorted and deduplicated, absorption applied.
    /// Idempotent.
    pub fn canonicalize(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(x) => mk_not(x.canonicalize()),
            Formula::And(xs) => mk_and(xs.iter().map(Formula::canonicalize).collect()),
            Formula::Or(xs) => mk_or(xs.iter().map(Formula::canonicalize).collect()),
            Formula::Next(x) => mk_next(x.canonicalize()),
            Formula::Until(a, b) => mk_until(a.canonicalize(), b.canonicalize()),
            Formula::Eventually(x) => mk_until(Formula::True, x.canonicalize()),
            Formula::Globally(x) => mk_not(mk_until(Formula::True, mk_not(x.canonicalize()))),
        }
    }

    /// True iff, once negations are pushed to the atoms, the only temporal
    /// operators left are `X`, `U` and `F`.
    pub fn is_syntactically_cosafe(&self) -> bool {
        cosafe(self, true)
    }

    /// Names of all atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(x) | Formula::Next(x) | Formula::Eventually(x) | Formula::Globally(x) => {
                x.collect_atoms(out)
            }
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
            Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(x) | Formula::Next(x) | Formula::Eventually(x) | Formula::Globally(x) => {
                1 + x.size()
            }
            Formula::And(xs) | Formula::Or(xs) => 1 + xs.iter().map(Formula::size).sum::<usize>(),
            Formula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }
}

fn cosafe(f: &Formula, positive: bool) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => true,
        Formula::Not(x) => cosafe(x, !positive),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().all(|x| cosafe(x, positive)),
        Formula::Next(x) => cosafe(x, positive),
        // Under negation these become Release / Globally.
        Formula::Until(a, b) => positive && cosafe(a, true) && cosafe(b, true),
        Formula::Eventually(x) => positive && cosafe(x, true),
        Formula::Globally(x) => !positive && cosafe(x, false),
    }
}

// Smart constructors. Each assumes canonical arguments and returns a canonical
// result, so applying them bottom-up canonicalizes a whole tree.

pub(crate) fn mk_not(x: Formula) -> Formula {
    match x {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(inner) => *inner,
        other => Formula::Not(Box::new(other)),
    }
}

pub(crate) fn mk_next(x: Formula) -> Formula {
    match x {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        other => Formula::Next(Box::new(other)),
    }
}

pub(crate) fn mk_until(lhs: Formula, rhs: Formula) -> Formula {
    match (&lhs, &rhs) {
        (_, Formula::True) => Formula::True,
        (_, Formula::False) => Formula::False,
        (Formula::False, _) => rhs,
        _ if lhs == rhs => rhs,
        _ => Formula::Until(Box::new(lhs), Box::new(rhs)),
    }
}

pub(crate) fn mk_and(children: Vec<Formula>) -> Formula {
    mk_junction(children, true)
}

pub(crate) fn mk_or(children: Vec<Formula>) -> Formula {
    mk_junction(children, false)
}

fn mk_junction(children: Vec<Formula>, conjunction: bool) -> Formula {
    // `unit` is the identity element, `zero` the absorbing one.
    let (unit, zero) = if conjunction {
        (Formula::True, Formula::False)
    } else {
        (Formula::False, Formula::True)
    };
    let mut flat = Vec::with_capacity(children.len());
    for child in children {
        match child {
            c if c == zero => return zero,
            c if c == unit => {}
            Formula::And(ys) if conjunction => flat.extend(ys),
            Formula::Or(ys) if !conjunction => flat.extend(ys),
            c => flat.push(c),
        }
    }
    flat.sort();
    flat.dedup();

    // Absorption: x ∧ (x ∨ y) = x, and (x ∨ y) ∧ (x ∨ y ∨ z) = x ∨ y.
    // Dually for disjunctions.
    if flat.len() > 1 {
        let keep: Vec<bool> = (0..flat.len())
            .map(|i| {
                let Some(big) = dual_children(&flat[i], conjunction) else {
                    return true;
                };
                !flat
                    .iter()
                    .enumerate()
                    .any(|(j, other)| j != i && subsumes(other, big, conjunction))
            })
            .collect();
        let mut k = keep.into_iter();
        flat.retain(|_| k.next().unwrap());
    }

    match flat.len() {
        0 => unit,
        1 => flat.pop().unwrap(),
        _ if conjunction => Formula::And(flat),
        _ => Formula::Or(flat),
    }
}

/// Children of the dual connective (`Or` inside a conjunction, `And` inside a
/// disjunction).
fn dual_children(f: &Formula, conjunction: bool) -> Option<&[Formula]> {
    match f {
        Formula::Or(xs) if conjunction => Some(xs),
        Formula::And(xs) if !conjunction => Some(xs),
        _ => None,
    }
}

/// Whether `other` absorbs a sibling whose dual children are `big`.
fn subsumes(other: &Formula, big: &[Formula], conjunction: bool) -> bool {
    match dual_children(other, conjunction) {
        Some(small) => small.len() <= big.len() && small.iter().all(|s| big.binary_search(s).is_ok()),
        None => big.binary_search(other).is_ok(),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(x) => write!(f, "!{x}"),
            Formula::Next(x) => write!(f, "X {x}"),
            Formula::Eventually(x) => write!(f, "F {x}"),
            Formula::Globally(x) => write!(f, "G {x}"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
            Formula::And(xs) | Formula::Or(xs) => {
                let op = if matches!(self, Formula::And(_)) { " & " } else { " | " };
                write!(f, "(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{op}")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::atom("a")
    }
    fn b() -> Formula {
        Formula::atom("b")
    }

    #[test]
    fn identity_element_removed() {
        assert_eq!(Formula::and(vec![a(), Formula::True]).canonicalize(), a());
        assert_eq!(Formula::or(vec![a(), Formula::False]).canonicalize(), a());
        assert_eq!(Formula::and(vec![a(), Formula::False]).canonicalize(), Formula::False);
        assert_eq!(Formula::or(vec![a(), Formula::True]).canonicalize(), Formula::True);
        assert_eq!(Formula::and(vec![]).canonicalize(), Formula::True);
    }

    #[test]
    fn absorption() {
        let f = Formula::or(vec![a(), Formula::and(vec![a(), b()])]);
        assert_eq!(f.canonicalize(), a());
        let g = Formula::and(vec![a(), Formula::or(vec![b(), a()])]);
        assert_eq!(g.canonicalize(), a());
        let c = Formula::atom("c");
        let h = Formula::and(vec![
            Formula::or(vec![a(), b()]),
            Formula::or(vec![a(), b(), c.clone()]),
        ]);
        assert_eq!(h.canonicalize(), Formula::or(vec![a(), b()]));
    }

    #[test]
    fn double_negation() {
        let u = Formula::until(a(), b());
        assert_eq!(Formula::not(Formula::not(u.clone())).canonicalize(), u);
    }

    #[test]
    fn flatten_sort_dedup() {
        let f = Formula::and(vec![b(), Formula::and(vec![a(), b()]), a()]);
        assert_eq!(f.canonicalize(), Formula::and(vec![a(), b()]));
    }

    #[test]
    fn derived_operators_desugar() {
        assert_eq!(
            Formula::eventually(a()).canonicalize(),
            Formula::until(Formula::True, a())
        );
        assert_eq!(
            Formula::globally(a()).canonicalize(),
            Formula::not(Formula::until(Formula::True, Formula::not(a())))
        );
    }

    #[test]
    fn cosafe_fragment() {
        assert!(Formula::eventually(a()).canonicalize().is_syntactically_cosafe());
        assert!(!Formula::globally(a()).canonicalize().is_syntactically_cosafe());
        assert!(!Formula::globally(a()).is_syntactically_cosafe());
        let lava_door = Formula::until(Formula::not(Formula::atom("lava")), Formula::atom("door"));
        assert!(lava_door.is_syntactically_cosafe());
        assert!(!Formula::not(lava_door).is_syntactically_cosafe());
        // !G !a is F a
        assert!(Formula::not(Formula::globally(Formula::not(a()))).is_syntactically_cosafe());
    }

    #[test]
    fn printing() {
        assert_eq!(a().to_string(), "a");
        assert_eq!(Formula::until(Formula::True, a()).to_string(), "(true U a)");
        assert_eq!(Formula::and(vec![a(), b()]).to_string(), "(a & b)");
        assert_eq!(Formula::not(Formula::and(vec![a(), b()])).to_string(), "!(a & b)");
    }
}
