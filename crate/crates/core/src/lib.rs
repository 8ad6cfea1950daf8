//! Threshold-model diffusion dynamics on social networks, implemented three
//! interchangeable ways: direct set-theoretic updates, best-response stepping
//! of (anti-)coordination games, and action-model product update. The crate
//! also carries a formula language with a model checker, a 27-entry catalog of
//! update action models, deterministic orbit detection, and a bidirectional
//! translation between belief-change automata and action models.
//!
//! All semantics use exact rational arithmetic; nothing in the update rules or
//! the model checker touches floating point.

pub mod action;
pub mod belief;
pub mod dynamics;
pub mod formats;
pub mod logic;
pub mod model;
pub mod orbit;
pub mod rational;

pub use action::{
    canonical_product, canonical_product_threshold, classify, e1, e2, product_update, catalog_entry,
    ActionError, ActionModel, ActionState, CatalogEntry, DynamicsClass, PostCondition, Relation,
};
pub use belief::{
    action_model_to_automaton, automaton_step, automaton_to_action_model, influence_automaton, strong, weak,
    Automaton, AutomatonState, AutomatonTransition, BeliefError, Polarity,
};
pub use dynamics::{best_response_step, game_threshold, step_eq1, step_eq2, Game, GameKind,
    TiePolicy};
pub use logic::{eval, eval_subset_oracle, extension, parse, Atom, EvalError, Formula, ParseError};
pub use model::{
    build_model, neighbor_fraction, AgentId, GeneralModel, ModelError, Network, ThresholdModel,
};
pub use orbit::{
    check_stepwise_equivalence, detect_orbit, random_model, run, EquivOutcome, OrbitError,
    OrbitResult, Trace, UpdateRule,
};
pub use rational::{ParseRatError, Rat};
