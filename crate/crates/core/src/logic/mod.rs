//! The formula language and its two model checkers.
//!
//! The language has Boolean connectives, three threshold modalities (`<le>`,
//! `[le]`, `(=)`) whose semantics are parametrized by the model's threshold,
//! and the two friendship modalities `F` / `<F>` used by the belief-change
//! fragment. Derived operators (`<lt>`, `[lt]`, `[gt]`, `|`, `->`) are
//! expanded at construction time, so the evaluators only ever see core nodes.
//!
//! [`eval`] implements the closed-form fraction characterizations; the
//! literal subset-enumeration semantics live in [`eval_subset_oracle`] and are
//! kept as an independent route for cross-checking.

mod eval;
mod formula;
mod oracle;
mod parse;

pub use eval::{eval, extension, EvalError};
pub use formula::{Atom, Formula};
pub use oracle::{
    eval_subset_oracle, exhaustive_agreement_depth3, k_validity_exhaustive_depth2,
    oracle_extension, Disagreement,
};
pub use parse::{parse, ParseError};
