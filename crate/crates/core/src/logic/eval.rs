//! Closed-form model checker.
//!
//! The threshold modalities reduce to exact fraction comparisons:
//!
//! * `<le> x` holds at `a` iff the fraction of `a`'s neighbors satisfying `x`
//!   is at least the threshold (the witnessing set is the full set of
//!   `x`-neighbors);
//! * `(=) x` holds iff that fraction equals the threshold exactly;
//! * `[le] x` holds iff every threshold-large neighborhood subset consists of
//!   `x`-agents only, which for any threshold in `[0, 1]` comes down to every
//!   neighbor satisfying `x` (any dissenter can be padded into a large-enough
//!   subset).
//!
//! The literal subset-enumeration clauses live in the oracle module and the
//! test suite checks the two routes against each other.

use thiserror::Error;

use crate::model::{AgentId, AgentSet, GeneralModel};
use crate::rational::Rat;

use super::formula::{Atom, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("formula uses a threshold modality but the model has no theta")]
    MissingTheta,
    #[error("atom {0} is not in the model's valuation")]
    UnknownAtom(Atom),
    #[error("agent #{0} does not exist in the model")]
    UnknownAgent(u32),
    #[error("agent {0} has no neighbors; neighborhood fractions are undefined")]
    IsolatedAgent(String),
}

/// The set of agents satisfying `formula`, computed bottom-up.
pub fn extension(model: &GeneralModel, formula: &Formula) -> Result<AgentSet, EvalError> {
    match formula {
        Formula::Top => Ok(model.all_agents()),
        Formula::Atom(a) => model
            .atom_extension(*a)
            .cloned()
            .ok_or(EvalError::UnknownAtom(*a)),
        Formula::Not(f) => {
            let inner = extension(model, f)?;
            Ok(model.agents().filter(|a| !inner.contains(a)).collect())
        }
        Formula::And(l, r) => {
            let left = extension(model, l)?;
            let right = extension(model, r)?;
            Ok(left.intersection(&right).copied().collect())
        }
        Formula::DiamLeq(f) => {
            let theta = require_theta(model)?;
            let inner = extension(model, f)?;
            filter_agents(model, |frac| frac >= theta, &inner)
        }
        Formula::EqTheta(f) => {
            let theta = require_theta(model)?;
            let inner = extension(model, f)?;
            filter_agents(model, |frac| frac == theta, &inner)
        }
        Formula::BoxLeq(f) => {
            // Theta-parametrized in the semantics even though the closed form
            // does not mention it; a model without theta cannot evaluate it.
            require_theta(model)?;
            let inner = extension(model, f)?;
            all_neighbors_in(model, &inner)
        }
        Formula::BoxF(f) => {
            let inner = extension(model, f)?;
            all_neighbors_in(model, &inner)
        }
        Formula::DiamF(f) => {
            let inner = extension(model, f)?;
            Ok(model
                .agents()
                .filter(|&a| model.network().neighbors(a).intersection(&inner).next().is_some())
                .collect())
        }
    }
}

/// Satisfaction at a single agent.
pub fn eval(model: &GeneralModel, agent: AgentId, formula: &Formula) -> Result<bool, EvalError> {
    if agent.index() >= model.agent_count() {
        return Err(EvalError::UnknownAgent(agent.0));
    }
    Ok(extension(model, formula)?.contains(&agent))
}

fn require_theta(model: &GeneralModel) -> Result<&Rat, EvalError> {
    model.theta().ok_or(EvalError::MissingTheta)
}

fn filter_agents(
    model: &GeneralModel,
    keep: impl Fn(&Rat) -> bool,
    inner: &AgentSet,
) -> Result<AgentSet, EvalError> {
    let mut out = AgentSet::new();
    for a in model.agents() {
        let neighbors = model.network().neighbors(a);
        if neighbors.is_empty() {
            return Err(EvalError::IsolatedAgent(model.name(a).to_string()));
        }
        let hits = neighbors.intersection(inner).count();
        let frac = Rat::ratio(hits, neighbors.len());
        if keep(&frac) {
            out.insert(a);
        }
    }
    Ok(out)
}

fn all_neighbors_in(model: &GeneralModel, inner: &AgentSet) -> Result<AgentSet, EvalError> {
    Ok(model
        .agents()
        .filter(|&a| model.network().neighbors(a).is_subset(inner))
        .collect())
}
