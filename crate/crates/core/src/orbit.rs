//! Deterministic iteration of update rules, orbit (fixed point / loop)
//! detection, and the randomized step-wise-equivalence harness.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::action::{canonical_product_threshold, ActionError, ActionModel};
use crate::dynamics::{best_response_step, step_eq1, step_eq2, Game, TiePolicy};
use crate::model::{build_model, neighbor_fraction, AgentSet, ModelError, ThresholdModel};
use crate::rational::Rat;

/// A one-step update policy over threshold models.
#[derive(Debug, Clone)]
pub enum UpdateRule {
    /// Inflating update with the tie broken toward `B`.
    Eq1,
    /// Non-inflating update with conservative tie-breaking.
    Eq2,
    /// Simultaneous best responses of a pairwise game.
    BestResponse {
        game: Game,
        tie: TiePolicy,
        seed: bool,
    },
    /// Product update with a fixed action model (full relation, partitioning
    /// preconditions required at application time).
    ActionModel(ActionModel),
}

impl UpdateRule {
    pub fn apply(&self, model: &ThresholdModel) -> Result<ThresholdModel, OrbitError> {
        match self {
            UpdateRule::Eq1 => Ok(step_eq1(model)),
            UpdateRule::Eq2 => Ok(step_eq2(model)),
            UpdateRule::BestResponse { game, tie, seed } => {
                Ok(best_response_step(model, game, *tie, *seed))
            }
            UpdateRule::ActionModel(am) => Ok(canonical_product_threshold(model, am)?),
        }
    }

    /// The model threshold under which a best-response rule lines up with
    /// its catalog action model: `y/(x+y)` for both game kinds. `None` for
    /// rules that read the threshold from the model anyway.
    pub fn preferred_model_theta(&self) -> Option<Rat> {
        match self {
            UpdateRule::BestResponse { game, .. } => Some(game.model_theta()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("no repetition within {cap} steps")]
    CapExceeded { cap: usize },
    #[error("could not generate a minimum-degree-one graph after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The behavior-set sequence of a deterministic run.
#[derive(Debug, Clone)]
pub struct Trace {
    initial: ThresholdModel,
    steps: Vec<AgentSet>,
}

impl Trace {
    pub fn initial(&self) -> &ThresholdModel {
        &self.initial
    }

    /// Behavior sets by step; index 0 is the initial behavior.
    pub fn steps(&self) -> &[AgentSet] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn model_at(&self, step: usize) -> ThresholdModel {
        self.initial.with_behavior(self.steps[step].clone())
    }
}

/// Iterates `rule` for `steps` steps; the trace has `steps + 1` entries.
pub fn run(model: &ThresholdModel, rule: &UpdateRule, steps: usize) -> Result<Trace, OrbitError> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(model.behavior().clone());
    let mut current = model.clone();
    for _ in 0..steps {
        current = rule.apply(&current)?;
        out.push(current.behavior().clone());
    }
    Ok(Trace {
        initial: model.clone(),
        steps: out,
    })
}

/// Eventually-periodic structure of a deterministic orbit: the state at
/// `transient` recurs `period` steps later, with both values minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitResult {
    pub transient: usize,
    pub period: usize,
}

/// Iterates until a behavior set repeats, remembering the step each set was
/// first seen. A repetition must occur within `2^agents` steps; `cap` bounds
/// the search anyway.
pub fn detect_orbit(
    model: &ThresholdModel,
    rule: &UpdateRule,
    cap: usize,
) -> Result<OrbitResult, OrbitError> {
    assert!(cap >= 1, "cap must be at least 1");
    let mut first_seen: BTreeMap<AgentSet, usize> = BTreeMap::new();
    first_seen.insert(model.behavior().clone(), 0);
    let mut current = model.clone();
    for step in 1..=cap {
        current = rule.apply(&current)?;
        if let Some(&seen) = first_seen.get(current.behavior()) {
            return Ok(OrbitResult {
                transient: seen,
                period: step - seen,
            });
        }
        first_seen.insert(current.behavior().clone(), step);
    }
    Err(OrbitError::CapExceeded { cap })
}

/// A sufficient orbit-detection cap for a model of `n` agents.
pub fn orbit_cap_for(n: usize) -> usize {
    if n >= 20 {
        (1usize << 20) + 1
    } else {
        (1usize << n) + 1
    }
}

/// First step at which two traces differ, with the differing agents by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub step: usize,
    pub only_left: Vec<String>,
    pub only_right: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivOutcome {
    Agree,
    Diverged(Divergence),
}

/// Runs both rules from the same start and compares behavior sets at every
/// step.
pub fn check_stepwise_equivalence(
    model: &ThresholdModel,
    left: &UpdateRule,
    right: &UpdateRule,
    steps: usize,
) -> Result<EquivOutcome, OrbitError> {
    let mut l = model.clone();
    let mut r = model.clone();
    for step in 1..=steps {
        l = left.apply(&l)?;
        r = right.apply(&r)?;
        if l.behavior() != r.behavior() {
            let only_left = l
                .behavior()
                .difference(r.behavior())
                .map(|&a| model.name(a).to_string())
                .collect();
            let only_right = r
                .behavior()
                .difference(l.behavior())
                .map(|&a| model.name(a).to_string())
                .collect();
            return Ok(EquivOutcome::Diverged(Divergence {
                step,
                only_left,
                only_right,
            }));
        }
    }
    Ok(EquivOutcome::Agree)
}

/// Reproducible random threshold model: an Erdos-Renyi graph resampled until
/// the minimum degree is one, a Bernoulli behavior set, and the given theta.
pub fn random_model(
    seed: u64,
    n_agents: usize,
    edge_probability: f64,
    behavior_probability: f64,
    theta: Rat,
) -> Result<ThresholdModel, OrbitError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_model_with(&mut rng, n_agents, edge_probability, behavior_probability, theta)
}

const GENERATION_ATTEMPTS: usize = 1000;

/// Like [`random_model`] but drawing from a caller-managed generator, so a
/// harness can derive many models from one seed stream.
pub fn random_model_with(
    rng: &mut ChaCha8Rng,
    n_agents: usize,
    edge_probability: f64,
    behavior_probability: f64,
    theta: Rat,
) -> Result<ThresholdModel, OrbitError> {
    assert!(n_agents >= 2, "need at least two agents");
    assert!((0.0..=1.0).contains(&edge_probability));
    assert!((0.0..=1.0).contains(&behavior_probability));
    let names: Vec<String> = (0..n_agents).map(|i| format!("a{i:02}")).collect();
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();

    for _ in 0..GENERATION_ATTEMPTS {
        let mut edges: Vec<(&str, &str)> = Vec::new();
        for i in 0..n_agents {
            for j in (i + 1)..n_agents {
                if rng.gen_bool(edge_probability) {
                    edges.push((name_refs[i], name_refs[j]));
                }
            }
        }
        let behavior: Vec<&str> = name_refs
            .iter()
            .filter(|_| rng.gen_bool(behavior_probability))
            .copied()
            .collect();
        match build_model(&name_refs, &edges, &behavior, theta.clone()) {
            Ok(model) => return Ok(model),
            Err(ModelError::IsolatedAgent { .. }) => continue,
            Err(other) => return Err(other.into()),
        }
    }
    Err(OrbitError::GenerationFailed {
        attempts: GENERATION_ATTEMPTS,
    })
}

/// Draws a tie-rich threshold: `p/q` with `1 <= q <= max_degree` and
/// `0 <= p <= q`, so exact ties at some agent are actually reachable.
pub fn random_theta(rng: &mut ChaCha8Rng, max_degree: usize) -> Rat {
    let q = rng.gen_range(1..=max_degree.max(1)) as i64;
    let p = rng.gen_range(0..=q);
    Rat::new(p, q)
}

/// Configuration for [`equivalence_trials`].
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub trials: usize,
    pub min_agents: usize,
    pub max_agents: usize,
    pub edge_probability: f64,
    pub behavior_probability: f64,
    pub steps: usize,
    pub seed: u64,
    /// Fixed threshold for every generated model. `None` draws a tie-rich
    /// threshold per model, unless a best-response rule participates, in
    /// which case the matching `y/(x+y)` threshold is pinned.
    pub theta: Option<Rat>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 1000,
            min_agents: 2,
            max_agents: 10,
            edge_probability: 0.5,
            behavior_probability: 0.5,
            steps: 10,
            seed: 7,
            theta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialFailure {
    pub trial: usize,
    pub divergence: Divergence,
    /// Debug rendering of the failing start model, for reproduction.
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivReport {
    pub trials_run: usize,
    /// Trials in which some agent sat exactly at the tie (`fraction = theta`)
    /// at some visited step.
    pub tie_trials: usize,
    pub failure: Option<TrialFailure>,
}

impl EquivReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// The model for one trial of a seeded batch: the graph and behavior come
/// from a per-trial generator stream, the threshold is either pinned or
/// drawn tie-rich from the realized degrees.
pub fn trial_model(
    config: &TrialConfig,
    trial: usize,
    pinned_theta: Option<&Rat>,
) -> Result<ThresholdModel, OrbitError> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        config.seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let n = rng.gen_range(config.min_agents..=config.max_agents);
    // Build the graph with a placeholder threshold, then redraw theta from
    // the realized degrees when nothing is pinned.
    let drawn = random_model_with(
        &mut rng,
        n,
        config.edge_probability,
        config.behavior_probability,
        Rat::new(1, 2),
    )?;
    let theta = match pinned_theta {
        Some(t) => t.clone(),
        None => random_theta(&mut rng, drawn.general().max_degree()),
    };
    rebuild_with_theta(&drawn, theta)
}

/// Runs `check_stepwise_equivalence` over a stream of seeded random models,
/// stopping at the first divergence. Instruments tie occurrences for each
/// trial.
pub fn equivalence_trials(
    left: &UpdateRule,
    right: &UpdateRule,
    config: &TrialConfig,
) -> Result<EquivReport, OrbitError> {
    let pinned_theta = config
        .theta
        .clone()
        .or_else(|| left.preferred_model_theta())
        .or_else(|| right.preferred_model_theta());

    let mut tie_trials = 0;
    for trial in 0..config.trials {
        let model = trial_model(config, trial, pinned_theta.as_ref())?;

        let mut l = model.clone();
        let mut r = model.clone();
        let mut tie_seen = has_tie_agent(&model);
        let mut diverged = None;
        for step in 1..=config.steps {
            l = left.apply(&l)?;
            r = right.apply(&r)?;
            tie_seen |= has_tie_agent(&l);
            if l.behavior() != r.behavior() {
                let only_left = l
                    .behavior()
                    .difference(r.behavior())
                    .map(|&a| model.name(a).to_string())
                    .collect();
                let only_right = r
                    .behavior()
                    .difference(l.behavior())
                    .map(|&a| model.name(a).to_string())
                    .collect();
                diverged = Some(Divergence {
                    step,
                    only_left,
                    only_right,
                });
                break;
            }
        }
        if tie_seen {
            tie_trials += 1;
        }
        if let Some(divergence) = diverged {
            return Ok(EquivReport {
                trials_run: trial + 1,
                tie_trials,
                failure: Some(TrialFailure {
                    trial,
                    divergence,
                    model: format!("{model:?}"),
                }),
            });
        }
    }
    Ok(EquivReport {
        trials_run: config.trials,
        tie_trials,
        failure: None,
    })
}

fn rebuild_with_theta(model: &ThresholdModel, theta: Rat) -> Result<ThresholdModel, OrbitError> {
    let names = model.names().to_vec();
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let edges_ids = model.network().edges();
    let edges: Vec<(&str, &str)> = edges_ids
        .iter()
        .map(|&(a, b)| (model.name(a), model.name(b)))
        .collect();
    let behavior_names = model.behavior_names();
    let behavior: Vec<&str> = behavior_names.iter().map(|s| s.as_str()).collect();
    Ok(build_model(&name_refs, &edges, &behavior, theta)?)
}

fn has_tie_agent(model: &ThresholdModel) -> bool {
    model.agents().any(|a| {
        neighbor_fraction(model.general(), a, model.behavior())
            .map(|f| &f == model.theta())
            .unwrap_or(false)
    })
}
