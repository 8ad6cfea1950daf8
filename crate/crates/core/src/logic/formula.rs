//! Formula AST, smart constructors for the derived operators, and printing.

use std::fmt;

/// Atomic propositions. `B` is the spreading behavior of threshold models;
/// `Bp` / `Bnp` are the mutually exclusive belief atoms ("believes p",
/// "believes not-p") of the belief-change fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    B,
    Bp,
    Bnp,
}

impl Atom {
    pub fn as_str(self) -> &'static str {
        match self {
            Atom::B => "B",
            Atom::Bp => "Bp",
            Atom::Bnp => "Bnp",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "B" => Some(Atom::B),
            "Bp" => Some(Atom::Bp),
            "Bnp" => Some(Atom::Bnp),
            _ => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Core formula nodes. Everything the concrete syntax can express is either
/// here or expands into these at construction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `<le>`: some threshold-large set of neighbors satisfies the operand.
    DiamLeq(Box<Formula>),
    /// `[le]`: every threshold-large set of neighbors satisfies the operand.
    BoxLeq(Box<Formula>),
    /// `(=)`: the operand's neighbor fraction is exactly the threshold.
    EqTheta(Box<Formula>),
    /// `F`: all neighbors satisfy the operand.
    BoxF(Box<Formula>),
    /// `<F>`: some neighbor satisfies the operand.
    DiamF(Box<Formula>),
}

impl Formula {
    pub fn top() -> Self {
        Formula::Top
    }

    pub fn atom(a: Atom) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Negation that collapses a directly nested negation. The derived
    /// operators use this, so `[gt] ~B` becomes `~<le> B` rather than
    /// `~<le> ~~B`.
    pub fn negate(f: Formula) -> Self {
        match f {
            Formula::Not(inner) => *inner,
            other => Formula::not(other),
        }
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    /// `|`, derived: `x | y := ~(~x & ~y)`.
    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::not(Formula::and(Formula::negate(l), Formula::negate(r)))
    }

    /// `->`, derived: `x -> y := ~(x & ~y)`.
    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::not(Formula::and(l, Formula::negate(r)))
    }

    pub fn diam_leq(f: Formula) -> Self {
        Formula::DiamLeq(Box::new(f))
    }

    pub fn box_leq(f: Formula) -> Self {
        Formula::BoxLeq(Box::new(f))
    }

    pub fn eq_theta(f: Formula) -> Self {
        Formula::EqTheta(Box::new(f))
    }

    /// `<lt>`, derived: strictly-above-threshold diamond.
    pub fn diam_lt(f: Formula) -> Self {
        Formula::and(
            Formula::diam_leq(f.clone()),
            Formula::not(Formula::eq_theta(f)),
        )
    }

    /// `[lt]`, derived: the strict box as written in the running text.
    pub fn box_lt(f: Formula) -> Self {
        Formula::and(
            Formula::box_leq(f.clone()),
            Formula::not(Formula::eq_theta(f)),
        )
    }

    /// `[gt]`, derived: `[gt] x := ~<le> ~x`. With a negated operand the
    /// inner double negation collapses, so `[gt] ~B` is `~<le> B`.
    pub fn box_gt(f: Formula) -> Self {
        Formula::not(Formula::diam_leq(Formula::negate(f)))
    }

    pub fn box_f(f: Formula) -> Self {
        Formula::BoxF(Box::new(f))
    }

    pub fn diam_f(f: Formula) -> Self {
        Formula::DiamF(Box::new(f))
    }

    /// AST height: leaves are 0, every connective adds 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) => 0,
            Formula::Not(f)
            | Formula::DiamLeq(f)
            | Formula::BoxLeq(f)
            | Formula::EqTheta(f)
            | Formula::BoxF(f)
            | Formula::DiamF(f) => 1 + f.depth(),
            Formula::And(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// True when the formula mentions a threshold modality, i.e. evaluating
    /// it requires the model to carry a threshold.
    pub fn needs_theta(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) => false,
            Formula::DiamLeq(_) | Formula::BoxLeq(_) | Formula::EqTheta(_) => true,
            Formula::Not(f) | Formula::BoxF(f) | Formula::DiamF(f) => f.needs_theta(),
            Formula::And(l, r) => l.needs_theta() || r.needs_theta(),
        }
    }

    /// Reads the formula as a conjunction of atom literals and returns the
    /// assignment it describes, e.g. `~Bp & ~Bnp` gives `{Bp: false, Bnp:
    /// false}`. Returns `None` for anything else, including contradictory
    /// duplicate literals.
    pub fn as_literal_conjunction(&self) -> Option<std::collections::BTreeMap<Atom, bool>> {
        let mut assignment = std::collections::BTreeMap::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::And(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
                Formula::Atom(a) => {
                    if assignment.insert(*a, true) == Some(false) {
                        return None;
                    }
                }
                Formula::Not(inner) => match inner.as_ref() {
                    Formula::Atom(a) => {
                        if assignment.insert(*a, false) == Some(true) {
                            return None;
                        }
                    }
                    _ => return None,
                },
                _ => return None,
            }
        }
        Some(assignment)
    }

    /// Inverse of [`Formula::as_literal_conjunction`]: a conjunction of
    /// literals in atom order. The empty assignment gives `T`.
    pub fn literal_conjunction(assignment: &std::collections::BTreeMap<Atom, bool>) -> Formula {
        let mut literals = assignment.iter().map(|(&atom, &sign)| {
            if sign {
                Formula::atom(atom)
            } else {
                Formula::not(Formula::atom(atom))
            }
        });
        match literals.next() {
            None => Formula::Top,
            Some(first) => literals.fold(first, Formula::and),
        }
    }

    /// Canonical string with flattened conjunction chains sorted. Two
    /// formulas that differ only in the order or grouping of `&` operands get
    /// the same key; everything else is compared syntactically.
    pub fn normal_key(&self) -> String {
        match self {
            Formula::And(_, _) => {
                let mut operands = Vec::new();
                self.flatten_and(&mut operands);
                let mut keys: Vec<String> = operands
                    .into_iter()
                    .map(|f| {
                        let key = f.normal_key();
                        if matches!(f, Formula::And(_, _)) {
                            unreachable!("flatten_and leaves no nested conjunctions")
                        } else {
                            key
                        }
                    })
                    .collect();
                keys.sort();
                keys.join(" & ")
            }
            Formula::Not(f) => format!("~{}", Self::wrap_key(f)),
            Formula::DiamLeq(f) => format!("<le> {}", Self::wrap_key(f)),
            Formula::BoxLeq(f) => format!("[le] {}", Self::wrap_key(f)),
            Formula::EqTheta(f) => format!("(=) {}", Self::wrap_key(f)),
            Formula::BoxF(f) => format!("F {}", Self::wrap_key(f)),
            Formula::DiamF(f) => format!("<F> {}", Self::wrap_key(f)),
            Formula::Top => "T".to_string(),
            Formula::Atom(a) => a.as_str().to_string(),
        }
    }

    fn wrap_key(f: &Formula) -> String {
        if matches!(f, Formula::And(_, _)) {
            format!("({})", f.normal_key())
        } else {
            f.normal_key()
        }
    }

    fn flatten_and<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Formula::And(l, r) => {
                l.flatten_and(out);
                r.flatten_and(out);
            }
            other => out.push(other),
        }
    }
}

impl fmt::Display for Formula {
    /// Concrete syntax with minimal parentheses; output re-parses to the
    /// same AST.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn unary(f: &mut fmt::Formatter<'_>, op: &str, child: &Formula) -> fmt::Result {
            f.write_str(op)?;
            if matches!(child, Formula::And(_, _)) {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        }
        match self {
            Formula::Top => f.write_str("T"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(c) => unary(f, "~", c),
            Formula::DiamLeq(c) => unary(f, "<le> ", c),
            Formula::BoxLeq(c) => unary(f, "[le] ", c),
            Formula::EqTheta(c) => unary(f, "(=) ", c),
            Formula::BoxF(c) => unary(f, "F ", c),
            Formula::DiamF(c) => unary(f, "<F> ", c),
            Formula::And(l, r) => {
                // `&` chains associate left in the grammar, so only a right
                // child that is itself a conjunction needs parentheses.
                write!(f, "{l} & ")?;
                if matches!(r.as_ref(), Formula::And(_, _)) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gt_expansion_collapses_double_negation() {
        let f = Formula::box_gt(Formula::not(Formula::atom(Atom::B)));
        assert_eq!(f, Formula::not(Formula::diam_leq(Formula::atom(Atom::B))));
        assert_eq!(f.to_string(), "~<le> B");
    }

    #[test]
    fn strict_diamond_expansion() {
        let f = Formula::diam_lt(Formula::atom(Atom::B));
        assert_eq!(
            f,
            Formula::and(
                Formula::diam_leq(Formula::atom(Atom::B)),
                Formula::not(Formula::eq_theta(Formula::atom(Atom::B))),
            )
        );
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        let f = Formula::and(
            Formula::atom(Atom::B),
            Formula::not(Formula::diam_leq(Formula::atom(Atom::B))),
        );
        assert_eq!(f.to_string(), "B & ~<le> B");
        let nested = Formula::not(Formula::and(Formula::atom(Atom::Bp), Formula::atom(Atom::Bnp)));
        assert_eq!(nested.to_string(), "~(Bp & Bnp)");
    }

    #[test]
    fn normal_key_sorts_conjunction_chains() {
        let left = Formula::and(Formula::atom(Atom::Bp), Formula::not(Formula::atom(Atom::Bnp)));
        let right = Formula::and(Formula::not(Formula::atom(Atom::Bnp)), Formula::atom(Atom::Bp));
        assert_eq!(left.normal_key(), right.normal_key());
        assert_ne!(left, right);
    }

    #[test]
    fn literal_conjunction_round_trip() {
        let mut assignment = std::collections::BTreeMap::new();
        assignment.insert(Atom::Bp, false);
        assignment.insert(Atom::Bnp, false);
        let f = Formula::literal_conjunction(&assignment);
        assert_eq!(f.to_string(), "~Bp & ~Bnp");
        assert_eq!(f.as_literal_conjunction(), Some(assignment));
        // A contradictory conjunction is not an assignment.
        let clash = Formula::and(Formula::atom(Atom::Bp), Formula::not(Formula::atom(Atom::Bp)));
        assert_eq!(clash.as_literal_conjunction(), None);
    }
}
