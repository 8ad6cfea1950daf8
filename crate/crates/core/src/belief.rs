//! Belief change under strong and weak influence: influence formulas, a
//! deterministic state automaton as an executable update rule, and the
//! bidirectional translation between automata and action models.
//!
//! Belief models carry the two mutually exclusive atoms `Bp` and `Bnp`;
//! "undecided" is their joint absence and is never stored. An automaton's
//! states are labeled with atom-state formulas (conjunctions of literals) and
//! its transitions with trigger formulas over the friendship modalities. A
//! step moves every agent simultaneously: the agent sits in the unique state
//! whose label it satisfies, and if exactly one outgoing trigger fires it
//! adopts the target state's atom assignment.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::action::{
    canonical_product, ActionError, ActionModel, ActionState, PostCondition, Relation,
};
use crate::logic::{extension, Atom, EvalError, Formula};
use crate::model::{AgentSet, GeneralModel, ModelError};
use crate::orbit::OrbitError;

/// Which of `p` / `not p` an influence formula talks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    P,
    NotP,
}

impl Polarity {
    /// The atom "believes this polarity".
    pub fn belief_atom(self) -> Atom {
        match self {
            Polarity::P => Atom::Bp,
            Polarity::NotP => Atom::Bnp,
        }
    }

    pub fn opposite(self) -> Polarity {
        match self {
            Polarity::P => Polarity::NotP,
            Polarity::NotP => Polarity::P,
        }
    }
}

/// Strong influence toward the polarity: every friend believes it and at
/// least one friend exists.
pub fn strong(polarity: Polarity) -> Formula {
    let belief = Formula::atom(polarity.belief_atom());
    Formula::and(Formula::box_f(belief.clone()), Formula::diam_f(belief))
}

/// Weak influence toward the polarity: no friend believes the opposite while
/// at least one friend believes it.
pub fn weak(polarity: Polarity) -> Formula {
    let belief = Formula::atom(polarity.belief_atom());
    let counter = Formula::atom(polarity.opposite().belief_atom());
    Formula::and(
        Formula::box_f(Formula::not(counter)),
        Formula::diam_f(belief),
    )
}

/// The undecided condition: believes neither `p` nor `not p`.
pub fn undecided() -> Formula {
    Formula::and(
        Formula::not(Formula::atom(Atom::Bp)),
        Formula::not(Formula::atom(Atom::Bnp)),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonState {
    pub id: String,
    pub label: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonTransition {
    pub from: String,
    pub trigger: Formula,
    pub to: String,
}

/// A deterministic labeled transition system. Determinism is a semantic
/// property (triggers out of one state are never jointly satisfiable); it is
/// audited at run time, not proven.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    states: Vec<AutomatonState>,
    transitions: Vec<AutomatonTransition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BeliefError {
    #[error("duplicate automaton state id {0:?}")]
    DuplicateStateId(String),
    #[error("transition references unknown state id {0:?}")]
    UnknownState(String),
    #[error("agent {agent} satisfies no automaton state label")]
    NoMatchingState { agent: String },
    #[error("agent {agent} satisfies {matching} state labels; labels must be exclusive")]
    AmbiguousState { agent: String, matching: usize },
    #[error("two triggers fire for agent {agent} in state {state}: {triggers:?}")]
    NondeterminismDetected {
        agent: String,
        state: String,
        triggers: Vec<String>,
    },
    #[error("state {state} has label {label:?}, which is not a conjunction of atom literals")]
    LabelNotAtomState { state: String, label: String },
    #[error("action state {state} has a precondition that is not of the form (atom-state ∧ trigger)")]
    PreconditionNotConjunctive { state: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl Automaton {
    pub fn new(
        states: Vec<AutomatonState>,
        transitions: Vec<AutomatonTransition>,
    ) -> Result<Self, BeliefError> {
        let mut ids = BTreeSet::new();
        for s in &states {
            if !ids.insert(s.id.clone()) {
                return Err(BeliefError::DuplicateStateId(s.id.clone()));
            }
        }
        for t in &transitions {
            for id in [&t.from, &t.to] {
                if !ids.contains(id) {
                    return Err(BeliefError::UnknownState(id.clone()));
                }
            }
        }
        Ok(Automaton { states, transitions })
    }

    pub fn states(&self) -> &[AutomatonState] {
        &self.states
    }

    pub fn transitions(&self) -> &[AutomatonTransition] {
        &self.transitions
    }

    pub fn state(&self, id: &str) -> Option<&AutomatonState> {
        self.states.iter().find(|s| s.id == id)
    }

    fn transitions_from<'a>(
        &'a self,
        id: &'a str,
    ) -> impl Iterator<Item = &'a AutomatonTransition> + 'a {
        self.transitions.iter().filter(move |t| t.from == id)
    }
}

/// The belief-change automaton: an undecided agent adopts a belief under
/// strong influence; a believer retreats to undecided under weak influence
/// toward the opposite.
pub fn influence_automaton() -> Automaton {
    crate::formats::automaton_from_json(include_str!("data/influence_automaton.json"))
        .expect("embedded automaton parses")
}

/// One simultaneous step of the automaton over all agents. Agents whose
/// state has no firing trigger stay put; two firing triggers is an error.
pub fn automaton_step(
    model: &GeneralModel,
    automaton: &Automaton,
) -> Result<GeneralModel, BeliefError> {
    let label_extensions: Vec<AgentSet> = automaton
        .states
        .iter()
        .map(|s| extension(model, &s.label))
        .collect::<Result<_, _>>()?;
    let mut trigger_extensions: Vec<AgentSet> = Vec::with_capacity(automaton.transitions.len());
    for t in &automaton.transitions {
        trigger_extensions.push(extension(model, &t.trigger)?);
    }

    // target atom assignment per agent, None = stay
    let mut moves: Vec<Option<BTreeMap<Atom, bool>>> = vec![None; model.agent_count()];
    for agent in model.agents() {
        let matching: Vec<usize> = (0..automaton.states.len())
            .filter(|&i| label_extensions[i].contains(&agent))
            .collect();
        let state_idx = match matching.len() {
            0 => {
                return Err(BeliefError::NoMatchingState {
                    agent: model.name(agent).to_string(),
                })
            }
            1 => matching[0],
            n => {
                return Err(BeliefError::AmbiguousState {
                    agent: model.name(agent).to_string(),
                    matching: n,
                })
            }
        };
        let state = &automaton.states[state_idx];
        let firing: Vec<usize> = (0..automaton.transitions.len())
            .filter(|&i| {
                automaton.transitions[i].from == state.id
                    && trigger_extensions[i].contains(&agent)
            })
            .collect();
        match firing.len() {
            0 => {}
            1 => {
                let target_id = &automaton.transitions[firing[0]].to;
                let target = automaton.state(target_id).expect("validated");
                let assignment = target.label.as_literal_conjunction().ok_or_else(|| {
                    BeliefError::LabelNotAtomState {
                        state: target.id.clone(),
                        label: target.label.to_string(),
                    }
                })?;
                moves[agent.index()] = Some(assignment);
            }
            _ => {
                return Err(BeliefError::NondeterminismDetected {
                    agent: model.name(agent).to_string(),
                    state: state.id.clone(),
                    triggers: firing
                        .iter()
                        .map(|&i| automaton.transitions[i].trigger.to_string())
                        .collect(),
                })
            }
        }
    }

    let mut atoms: BTreeSet<Atom> = model.valuation().keys().copied().collect();
    for m in moves.iter().flatten() {
        atoms.extend(m.keys().copied());
    }
    let empty = AgentSet::new();
    let mut valuation = BTreeMap::new();
    for atom in atoms {
        let base = model.atom_extension(atom).unwrap_or(&empty);
        let mut ext = AgentSet::new();
        for agent in model.agents() {
            let holds = match &moves[agent.index()] {
                Some(assignment) => assignment
                    .get(&atom)
                    .copied()
                    .unwrap_or_else(|| base.contains(&agent)),
                None => base.contains(&agent),
            };
            if holds {
                ext.insert(agent);
            }
        }
        valuation.insert(atom, ext);
    }
    Ok(model.with_valuation(valuation))
}

/// Repeated [`automaton_step`]; returns the model at every step, index 0
/// being the start.
pub fn run_automaton(
    model: &GeneralModel,
    automaton: &Automaton,
    steps: usize,
) -> Result<Vec<GeneralModel>, BeliefError> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(model.clone());
    for i in 0..steps {
        let next = automaton_step(&out[i], automaton)?;
        out.push(next);
    }
    Ok(out)
}

/// Translates an automaton into an action model:
///
/// * one action state per state-transition-state triple, with the source
///   label conjoined with the trigger as precondition and the target label's
///   atom assignment as postcondition;
/// * one residual "stay" state per automaton state, whose precondition is
///   the label conjoined with the negation of every outgoing trigger and
///   whose postcondition is no change (without these, agents matching no
///   trigger would die under product update);
/// * the full relation.
pub fn automaton_to_action_model(automaton: &Automaton) -> Result<ActionModel, BeliefError> {
    let mut states = Vec::new();
    for (idx, t) in automaton.transitions.iter().enumerate() {
        let source = automaton.state(&t.from).expect("validated");
        let target = automaton.state(&t.to).expect("validated");
        let assignment = target.label.as_literal_conjunction().ok_or_else(|| {
            BeliefError::LabelNotAtomState {
                state: target.id.clone(),
                label: target.label.to_string(),
            }
        })?;
        states.push(ActionState {
            id: format!("t{idx}"),
            pre: Formula::and(source.label.clone(), t.trigger.clone()),
            post: PostCondition::from_assignment(assignment),
        });
    }
    for (idx, s) in automaton.states.iter().enumerate() {
        let mut negated = automaton
            .transitions_from(&s.id)
            .map(|t| Formula::negate(t.trigger.clone()));
        let pre = match negated.next() {
            None => s.label.clone(),
            Some(first) => Formula::and(s.label.clone(), negated.fold(first, Formula::and)),
        };
        states.push(ActionState {
            id: format!("r{idx}"),
            pre,
            post: PostCondition::keep(),
        });
    }
    Ok(ActionModel::new(states, Relation::Full)?)
}

/// Splits a precondition into an atom-state part and a trigger part.
///
/// The conjunction chain is flattened in order; the atom-state part is the
/// maximal prefix of atom literals and the trigger is the remaining operands
/// re-folded. Returns the literal assignment and the optional trigger.
fn split_precondition(
    pre: &Formula,
) -> Option<(BTreeMap<Atom, bool>, Option<Formula>)> {
    fn flatten(f: &Formula, out: &mut Vec<Formula>) {
        match f {
            Formula::And(l, r) => {
                flatten(l, out);
                flatten(r, out);
            }
            other => out.push(other.clone()),
        }
    }
    let mut operands = Vec::new();
    flatten(pre, &mut operands);
    let mut assignment = BTreeMap::new();
    let mut rest = Vec::new();
    let mut in_prefix = true;
    for op in operands {
        let literal = match &op {
            Formula::Atom(a) => Some((*a, true)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => Some((*a, false)),
                _ => None,
            },
            _ => None,
        };
        match literal {
            Some((atom, sign)) if in_prefix => {
                if assignment.insert(atom, sign) == Some(!sign) {
                    return None;
                }
            }
            _ => {
                in_prefix = false;
                rest.push(op);
            }
        }
    }
    if assignment.is_empty() {
        return None;
    }
    let trigger = rest.into_iter().reduce(Formula::and);
    Some((assignment, trigger))
}

/// Translates an action model back into an automaton. Residual no-change
/// states contribute their atom-state label but no transition; every other
/// state must have a precondition of the shape `atom-state ∧ trigger` and
/// yields one transition. States with equal canonical labels collapse.
pub fn action_model_to_automaton(action: &ActionModel) -> Result<Automaton, BeliefError> {
    let mut states: Vec<AutomatonState> = Vec::new();
    let mut ids = BTreeSet::new();
    let mut intern = |assignment: &BTreeMap<Atom, bool>,
                      states: &mut Vec<AutomatonState>|
     -> String {
        let label = Formula::literal_conjunction(assignment);
        let id = label.to_string();
        if ids.insert(id.clone()) {
            states.push(AutomatonState {
                id: id.clone(),
                label,
            });
        }
        id
    };

    let mut transitions = Vec::new();
    for state in action.states() {
        let (assignment, trigger) = split_precondition(&state.pre).ok_or_else(|| {
            BeliefError::PreconditionNotConjunctive {
                state: state.id.clone(),
            }
        })?;
        if state.post.is_keep() {
            // Residual stay state: keep the source label, drop the
            // no-trigger guard.
            intern(&assignment, &mut states);
            continue;
        }
        let trigger = trigger.ok_or_else(|| BeliefError::PreconditionNotConjunctive {
            state: state.id.clone(),
        })?;
        let from = intern(&assignment, &mut states);
        let to = intern(state.post.assignment(), &mut states);
        transitions.push(AutomatonTransition { from, trigger, to });
    }
    Automaton::new(states, transitions)
}

/// Canonical form for structural comparison and byte-stable emission: state
/// ids are rewritten to the printed canonical label (atom-state labels are
/// reordered into atom order first), states sort by id, transitions sort by
/// `(from, trigger, to)`.
pub fn canonical_automaton(automaton: &Automaton) -> Automaton {
    let canonical_label = |label: &Formula| -> Formula {
        match label.as_literal_conjunction() {
            Some(assignment) => Formula::literal_conjunction(&assignment),
            None => label.clone(),
        }
    };
    let mut id_map: BTreeMap<String, String> = BTreeMap::new();
    let mut states: Vec<AutomatonState> = Vec::new();
    for s in &automaton.states {
        let label = canonical_label(&s.label);
        let id = match s.label.as_literal_conjunction() {
            Some(_) => label.to_string(),
            None => s.label.normal_key(),
        };
        id_map.insert(s.id.clone(), id.clone());
        if !states.iter().any(|existing| existing.id == id) {
            states.push(AutomatonState { id, label });
        }
    }
    states.sort_by(|a, b| a.id.cmp(&b.id));
    let mut transitions: Vec<AutomatonTransition> = automaton
        .transitions
        .iter()
        .map(|t| AutomatonTransition {
            from: id_map[&t.from].clone(),
            trigger: t.trigger.clone(),
            to: id_map[&t.to].clone(),
        })
        .collect();
    transitions.sort_by(|a, b| {
        (&a.from, a.trigger.to_string(), &a.to).cmp(&(&b.from, b.trigger.to_string(), &b.to))
    });
    transitions.dedup();
    Automaton { states, transitions }
}

/// Canonical form for action models: states sort by precondition key then
/// postcondition, ids are renumbered `s1..sn`, explicit relations are
/// remapped accordingly.
pub fn canonical_action_model(action: &ActionModel) -> ActionModel {
    let mut indexed: Vec<(String, String, &ActionState)> = action
        .states()
        .iter()
        .map(|s| {
            let post_key = s
                .post
                .assignment()
                .iter()
                .map(|(a, v)| format!("{a}={v}"))
                .collect::<Vec<_>>()
                .join(",");
            (s.pre.normal_key(), post_key, s)
        })
        .collect();
    indexed.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    let mut id_map = BTreeMap::new();
    let states: Vec<ActionState> = indexed
        .iter()
        .enumerate()
        .map(|(i, (_, _, s))| {
            let id = format!("s{}", i + 1);
            id_map.insert(s.id.clone(), id.clone());
            ActionState {
                id,
                pre: s.pre.clone(),
                post: s.post.clone(),
            }
        })
        .collect();
    let relation = match action.relation() {
        Relation::Full => Relation::Full,
        Relation::Pairs(pairs) => Relation::Pairs(
            pairs
                .iter()
                .map(|(a, b)| (id_map[a].clone(), id_map[b].clone()))
                .collect(),
        ),
    };
    ActionModel::new(states, relation).expect("canonicalization preserves validity")
}

/// First step (1-based) at which running the automaton directly and running
/// its action-model translation by product update disagree on the valuation;
/// `None` if the two stay in lockstep for the whole horizon.
pub fn first_translation_divergence(
    model: &GeneralModel,
    automaton: &Automaton,
    steps: usize,
) -> Result<Option<usize>, BeliefError> {
    let action = automaton_to_action_model(automaton)?;
    let mut via_automaton = model.clone();
    let mut via_product = model.clone();
    for step in 1..=steps {
        via_automaton = automaton_step(&via_automaton, automaton)?;
        via_product = canonical_product(&via_product, &action)?;
        if via_automaton.valuation() != via_product.valuation() {
            return Ok(Some(step));
        }
    }
    Ok(None)
}

/// Reproducible random belief model: a minimum-degree-one graph with every
/// agent in exactly one of the three belief states.
pub fn random_belief_model(
    seed: u64,
    n_agents: usize,
    edge_probability: f64,
) -> Result<GeneralModel, OrbitError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scaffold = crate::orbit::random_model_with(
        &mut rng,
        n_agents,
        edge_probability,
        0.0,
        crate::rational::Rat::new(1, 2),
    )?;
    let mut bp = AgentSet::new();
    let mut bnp = AgentSet::new();
    for agent in scaffold.agents() {
        match rng.gen_range(0..3u8) {
            0 => {
                bp.insert(agent);
            }
            1 => {
                bnp.insert(agent);
            }
            _ => {}
        }
    }
    let mut valuation = BTreeMap::new();
    valuation.insert(Atom::Bp, bp);
    valuation.insert(Atom::Bnp, bnp);
    let general = scaffold.into_general();
    // Belief models carry no threshold; rebuild without one.
    Ok(GeneralModel::from_parts(
        general.names().to_vec(),
        general
            .agents()
            .map(|a| general.network().neighbors(a).clone())
            .collect(),
        valuation,
        None,
    ))
}

/// Reproducible random automaton in the conjunctive-precondition image:
/// atom-state labels over `{Bp, Bnp}` and triggers drawn from the influence
/// formula pool, with distinct `(from, trigger, to)` triples.
pub fn random_automaton(seed: u64, max_transitions: usize) -> Automaton {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignments: Vec<BTreeMap<Atom, bool>> = vec![
        BTreeMap::from([(Atom::Bp, true), (Atom::Bnp, false)]),
        BTreeMap::from([(Atom::Bp, false), (Atom::Bnp, true)]),
        BTreeMap::from([(Atom::Bp, false), (Atom::Bnp, false)]),
        BTreeMap::from([(Atom::Bp, true), (Atom::Bnp, true)]),
    ];
    let n_states = rng.gen_range(1..=assignments.len());
    let states: Vec<AutomatonState> = assignments[..n_states]
        .iter()
        .enumerate()
        .map(|(i, a)| AutomatonState {
            id: format!("q{i}"),
            label: Formula::literal_conjunction(a),
        })
        .collect();

    let trigger_pool: Vec<Formula> = vec![
        strong(Polarity::P),
        strong(Polarity::NotP),
        weak(Polarity::P),
        weak(Polarity::NotP),
        Formula::box_f(Formula::atom(Atom::Bp)),
        Formula::diam_f(Formula::atom(Atom::Bnp)),
        Formula::not(Formula::diam_f(Formula::atom(Atom::Bp))),
    ];
    let mut seen = BTreeSet::new();
    let mut transitions = Vec::new();
    for _ in 0..max_transitions {
        let from = rng.gen_range(0..n_states);
        let to = rng.gen_range(0..n_states);
        let trig = rng.gen_range(0..trigger_pool.len());
        if seen.insert((from, trig, to)) {
            transitions.push(AutomatonTransition {
                from: states[from].id.clone(),
                trigger: trigger_pool[trig].clone(),
                to: states[to].id.clone(),
            });
        }
    }
    Automaton::new(states, transitions).expect("generated automaton is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    fn belief_model(
        agents: &[&str],
        edges: &[(&str, &str)],
        bp: &[&str],
        bnp: &[&str],
    ) -> GeneralModel {
        let mut valuation = BTreeMap::new();
        valuation.insert(Atom::Bp, bp.to_vec());
        valuation.insert(Atom::Bnp, bnp.to_vec());
        GeneralModel::build(agents, edges, valuation, None).unwrap()
    }

    #[test]
    fn strong_influence_requires_unanimity_and_a_friend() {
        // All of a's friends believe p.
        let m = belief_model(
            &["a", "b", "c"],
            &[("a", "b"), ("a", "c"), ("b", "c")],
            &["b", "c"],
            &[],
        );
        let a = m.agent_id("a").unwrap();
        assert!(crate::logic::eval(&m, a, &strong(Polarity::P)).unwrap());
        assert!(crate::logic::eval(&m, a, &weak(Polarity::P)).unwrap());
    }

    #[test]
    fn weak_influence_tolerates_undecided_friends() {
        // One friend believes p, the other is undecided: weak but not strong.
        let m = belief_model(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")], &["b"], &[]);
        let a = m.agent_id("a").unwrap();
        assert!(eval_ok(&m, a, &weak(Polarity::P)));
        assert!(!eval_ok(&m, a, &strong(Polarity::P)));
    }

    #[test]
    fn counter_believing_friend_blocks_both() {
        let m = belief_model(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")], &["b"], &["c"]);
        let a = m.agent_id("a").unwrap();
        assert!(!eval_ok(&m, a, &strong(Polarity::P)));
        assert!(!eval_ok(&m, a, &weak(Polarity::P)));
    }

    fn eval_ok(m: &GeneralModel, a: crate::model::AgentId, f: &Formula) -> bool {
        crate::logic::eval(m, a, f).unwrap()
    }

    #[test]
    fn influence_automaton_shape() {
        let auto = influence_automaton();
        assert_eq!(auto.states().len(), 3);
        assert_eq!(auto.transitions().len(), 4);
        for s in auto.states() {
            assert!(s.label.as_literal_conjunction().is_some());
        }
    }

    #[test]
    fn undecided_agent_under_strong_influence_adopts() {
        // a undecided, all friends believe p.
        let m = belief_model(
            &["a", "b", "c"],
            &[("a", "b"), ("a", "c"), ("b", "c")],
            &["b", "c"],
            &[],
        );
        let next = automaton_step(&m, &influence_automaton()).unwrap();
        let a = next.agent_id("a").unwrap();
        assert!(next.atom_extension(Atom::Bp).unwrap().contains(&a));
    }

    #[test]
    fn split_friends_leave_an_agent_unchanged() {
        // a is undecided between a p-believer and a not-p-believer, so no
        // trigger fires for it; the believers each have a same-minded friend
        // blocking weak counter-influence, so the whole model is a fixed
        // point.
        let m = belief_model(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d")],
            &["b", "d"],
            &["c"],
        );
        let next = automaton_step(&m, &influence_automaton()).unwrap();
        assert_eq!(next.valuation(), m.valuation());
    }

    #[test]
    fn believer_retreats_to_undecided_under_weak_counter_influence() {
        // a believes p; one friend believes not-p, the other is undecided.
        let m = belief_model(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")], &["a"], &["b"]);
        let next = automaton_step(&m, &influence_automaton()).unwrap();
        let a = next.agent_id("a").unwrap();
        assert!(!next.atom_extension(Atom::Bp).unwrap().contains(&a));
        assert!(!next.atom_extension(Atom::Bnp).unwrap().contains(&a));
    }

    #[test]
    fn mutual_exclusivity_is_preserved() {
        let m = belief_model(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
            &["a", "b"],
            &["c"],
        );
        let mut current = m;
        for _ in 0..6 {
            current = automaton_step(&current, &influence_automaton()).unwrap();
            let bp = current.atom_extension(Atom::Bp).unwrap();
            let bnp = current.atom_extension(Atom::Bnp).unwrap();
            assert!(bp.intersection(bnp).next().is_none());
        }
    }

    #[test]
    fn no_matching_state_is_reported() {
        // An automaton with a single Bp state cannot place an undecided agent.
        let auto = Automaton::new(
            vec![AutomatonState {
                id: "Bp".to_string(),
                label: parse("Bp & ~Bnp").unwrap(),
            }],
            vec![],
        )
        .unwrap();
        let m = belief_model(&["a", "b"], &[("a", "b")], &["a"], &[]);
        let err = automaton_step(&m, &auto).unwrap_err();
        assert!(matches!(err, BeliefError::NoMatchingState { .. }));
    }

    #[test]
    fn nondeterminism_is_reported() {
        let auto = Automaton::new(
            vec![
                AutomatonState {
                    id: "Up".to_string(),
                    label: parse("~Bp & ~Bnp").unwrap(),
                },
                AutomatonState {
                    id: "Bp".to_string(),
                    label: parse("Bp & ~Bnp").unwrap(),
                },
            ],
            vec![
                AutomatonTransition {
                    from: "Up".to_string(),
                    trigger: parse("<F> Bp").unwrap(),
                    to: "Bp".to_string(),
                },
                AutomatonTransition {
                    from: "Up".to_string(),
                    trigger: parse("F Bp").unwrap(),
                    to: "Bp".to_string(),
                },
            ],
        )
        .unwrap();
        let m = belief_model(&["a", "b"], &[("a", "b")], &["b"], &[]);
        let err = automaton_step(&m, &auto).unwrap_err();
        assert!(matches!(err, BeliefError::NondeterminismDetected { .. }));
    }

    #[test]
    fn translation_of_single_state_automaton() {
        let auto = Automaton::new(
            vec![AutomatonState {
                id: "Up".to_string(),
                label: parse("~Bp & ~Bnp").unwrap(),
            }],
            vec![],
        )
        .unwrap();
        let am = automaton_to_action_model(&auto).unwrap();
        assert_eq!(am.states().len(), 1);
        assert_eq!(am.states()[0].pre, parse("~Bp & ~Bnp").unwrap());
        assert!(am.states()[0].post.is_keep());
    }

    #[test]
    fn translation_has_triple_and_residual_states() {
        let am = automaton_to_action_model(&influence_automaton()).unwrap();
        // 4 transitions + 3 residuals.
        assert_eq!(am.states().len(), 7);
        assert!(am.is_full_relation());
        let keeps = am.states().iter().filter(|s| s.post.is_keep()).count();
        assert_eq!(keeps, 3);
    }

    #[test]
    fn non_conjunctive_precondition_is_rejected() {
        let am = ActionModel::new(
            vec![ActionState {
                id: "bad".to_string(),
                pre: parse("<le> B").unwrap(),
                post: PostCondition::adopt_b(),
            }],
            Relation::Full,
        )
        .unwrap();
        let err = action_model_to_automaton(&am).unwrap_err();
        assert!(matches!(err, BeliefError::PreconditionNotConjunctive { .. }));
    }

    #[test]
    fn influence_automaton_round_trips() {
        let original = canonical_automaton(&influence_automaton());
        let back = canonical_automaton(
            &action_model_to_automaton(&automaton_to_action_model(&influence_automaton()).unwrap()).unwrap(),
        );
        assert_eq!(original, back);
    }

    #[test]
    fn random_automata_round_trip() {
        for seed in 0..60u64 {
            let auto = random_automaton(seed, 8);
            let back = action_model_to_automaton(&automaton_to_action_model(&auto).unwrap())
                .unwrap();
            assert_eq!(
                canonical_automaton(&auto),
                canonical_automaton(&back),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn action_models_round_trip_through_automata() {
        for seed in 0..40u64 {
            let am = automaton_to_action_model(&random_automaton(seed, 6)).unwrap();
            let back =
                automaton_to_action_model(&action_model_to_automaton(&am).unwrap()).unwrap();
            assert_eq!(
                canonical_action_model(&am),
                canonical_action_model(&back),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn scrambled_literal_order_collapses_to_one_state() {
        // Two action states whose atom-state parts differ only in literal
        // order must land in the same automaton state.
        let am = ActionModel::new(
            vec![
                ActionState {
                    id: "x".to_string(),
                    pre: parse("Bp & ~Bnp & F Bnp").unwrap(),
                    post: PostCondition::from_assignment(BTreeMap::from([
                        (Atom::Bp, false),
                        (Atom::Bnp, false),
                    ])),
                },
                ActionState {
                    id: "y".to_string(),
                    pre: parse("~Bnp & Bp & <F> Bnp").unwrap(),
                    post: PostCondition::from_assignment(BTreeMap::from([
                        (Atom::Bp, false),
                        (Atom::Bnp, false),
                    ])),
                },
            ],
            Relation::Full,
        )
        .unwrap();
        let auto = action_model_to_automaton(&am).unwrap();
        let sources: BTreeSet<&str> = auto.transitions().iter().map(|t| t.from.as_str()).collect();
        assert_eq!(sources.len(), 1);
        assert_eq!(auto.states().len(), 2);
    }

    #[test]
    fn automaton_step_equals_translated_product_update() {
        let m = belief_model(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
            &["a"],
            &["c"],
        );
        assert_eq!(first_translation_divergence(&m, &influence_automaton(), 8).unwrap(), None);
    }

    #[test]
    fn random_belief_models_are_deterministic_and_exclusive() {
        let a = random_belief_model(9, 6, 0.5).unwrap();
        let b = random_belief_model(9, 6, 0.5).unwrap();
        assert_eq!(a, b);
        let bp = a.atom_extension(Atom::Bp).unwrap();
        let bnp = a.atom_extension(Atom::Bnp).unwrap();
        assert!(bp.intersection(bnp).next().is_none());
        assert!(a.theta().is_none());
    }
}
