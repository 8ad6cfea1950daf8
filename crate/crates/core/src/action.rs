//! Action models with postconditions, product update, and the 27-entry
//! catalog of threshold-model update rules.
//!
//! An action model is a non-empty set of states, each carrying a precondition
//! formula and a postcondition (a partial atom assignment; the empty
//! assignment means "no change"), plus a relation over the states. Read as
//! decision rules: an agent matches the states whose preconditions it
//! satisfies and the matched postcondition rewrites its atoms.
//!
//! When the preconditions partition the agent set and the relation is full,
//! product update neither duplicates nor kills agents and leaves the network
//! untouched; [`canonical_product`] checks those side conditions and returns
//! the result relabeled back onto the original agents.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::logic::{extension, Atom, EvalError, Formula};
use crate::model::{AgentSet, GeneralModel, ThresholdModel};

/// Partial atom assignment applied after an action state fires. Empty means
/// the agent keeps all current atoms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PostCondition(BTreeMap<Atom, bool>);

impl PostCondition {
    /// No change.
    pub fn keep() -> Self {
        PostCondition(BTreeMap::new())
    }

    /// Adopt the behavior atom.
    pub fn adopt_b() -> Self {
        let mut map = BTreeMap::new();
        map.insert(Atom::B, true);
        PostCondition(map)
    }

    /// Drop the behavior atom.
    pub fn drop_b() -> Self {
        let mut map = BTreeMap::new();
        map.insert(Atom::B, false);
        PostCondition(map)
    }

    pub fn from_assignment(map: BTreeMap<Atom, bool>) -> Self {
        PostCondition(map)
    }

    pub fn assignment(&self) -> &BTreeMap<Atom, bool> {
        &self.0
    }

    pub fn is_keep(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, atom: Atom) -> Option<bool> {
        self.0.get(&atom).copied()
    }

    /// Swaps positive and negative writes to `B`; used by the catalog's
    /// duality check.
    pub fn swap_b(&self) -> Self {
        let mut map = self.0.clone();
        if let Some(v) = map.get_mut(&Atom::B) {
            *v = !*v;
        }
        PostCondition(map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionState {
    pub id: String,
    pub pre: Formula,
    pub post: PostCondition,
}

/// Relation over action states. The catalog models all use the full
/// relation; product update honors an explicit pair list faithfully.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    Full,
    Pairs(BTreeSet<(String, String)>),
}

impl Relation {
    fn contains(&self, from: &str, to: &str) -> bool {
        match self {
            Relation::Full => true,
            Relation::Pairs(pairs) => pairs.contains(&(from.to_string(), to.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionModel {
    states: Vec<ActionState>,
    relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("action model needs at least one state")]
    EmptyActionModel,
    #[error("duplicate action state id {0:?}")]
    DuplicateStateId(String),
    #[error("relation mentions unknown state id {0:?}")]
    UnknownStateInRelation(String),
    #[error("no agent satisfies any precondition; the product is empty")]
    EmptyProduct,
    #[error("preconditions do not partition: agent {agent} matches {matching} states")]
    NotAPartition { agent: String, matching: usize },
    #[error("canonical product requires the full relation")]
    NotFullRelation,
    #[error("catalog index {0} out of range 1..27")]
    IndexOutOfRange(u32),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl ActionModel {
    pub fn new(states: Vec<ActionState>, relation: Relation) -> Result<Self, ActionError> {
        if states.is_empty() {
            return Err(ActionError::EmptyActionModel);
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.id.clone()) {
                return Err(ActionError::DuplicateStateId(s.id.clone()));
            }
        }
        if let Relation::Pairs(pairs) = &relation {
            for (a, b) in pairs {
                for id in [a, b] {
                    if !seen.contains(id) {
                        return Err(ActionError::UnknownStateInRelation(id.clone()));
                    }
                }
            }
        }
        Ok(ActionModel { states, relation })
    }

    pub fn states(&self) -> &[ActionState] {
        &self.states
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn is_full_relation(&self) -> bool {
        matches!(self.relation, Relation::Full)
    }

    /// The same states with `B`-writes inverted.
    pub fn with_swapped_posts(&self) -> Self {
        ActionModel {
            states: self
                .states
                .iter()
                .map(|s| ActionState {
                    id: s.id.clone(),
                    pre: s.pre.clone(),
                    post: s.post.swap_b(),
                })
                .collect(),
            relation: self.relation.clone(),
        }
    }
}

/// The product of a model and an action model. Surviving agents are the
/// pairs `(a, s)` where `a` satisfies `pre(s)`; two pairs are linked when
/// both the agents were neighbors and the states are related; each atom is
/// rewritten by the postcondition where defined and inherited otherwise.
///
/// The relation is honored as given. With a partial relation the result can
/// contain agents of degree zero, which is outside the threshold-model class;
/// callers that need the classic shape go through [`canonical_product`].
pub fn product_update(
    model: &GeneralModel,
    action: &ActionModel,
) -> Result<GeneralModel, ActionError> {
    let survivors = matching_pairs(model, action)?;
    if survivors.is_empty() {
        return Err(ActionError::EmptyProduct);
    }

    // Pair names sort the new agent list; collisions get an index suffix.
    let mut named: Vec<(usize, usize, String)> = Vec::with_capacity(survivors.len());
    let mut used = BTreeSet::new();
    for &(agent, state) in &survivors {
        let base = format!("{}@{}", model.name(agent), action.states[state].id);
        let mut name = base.clone();
        let mut k = 1;
        while !used.insert(name.clone()) {
            name = format!("{base}#{k}");
            k += 1;
        }
        named.push((agent.index(), state, name));
    }
    named.sort_by(|a, b| a.2.cmp(&b.2));

    let names: Vec<String> = named.iter().map(|(_, _, n)| n.clone()).collect();
    let mut adjacency = vec![AgentSet::new(); named.len()];
    for (i, &(agent_i, state_i, _)) in named.iter().enumerate() {
        for (j, &(agent_j, state_j, _)) in named.iter().enumerate() {
            if i == j {
                continue;
            }
            let neighbors = model
                .network()
                .neighbors(crate::model::AgentId(agent_i as u32))
                .contains(&crate::model::AgentId(agent_j as u32));
            if neighbors
                && action
                    .relation
                    .contains(&action.states[state_i].id, &action.states[state_j].id)
            {
                adjacency[i].insert(crate::model::AgentId(j as u32));
            }
        }
    }

    let mut atoms: BTreeSet<Atom> = model.valuation().keys().copied().collect();
    for s in &action.states {
        atoms.extend(s.post.assignment().keys().copied());
    }
    let empty = AgentSet::new();
    let mut valuation = BTreeMap::new();
    for atom in atoms {
        let base = model.atom_extension(atom).unwrap_or(&empty);
        let mut ext = AgentSet::new();
        for (i, &(agent_i, state_i, _)) in named.iter().enumerate() {
            let post = &action.states[state_i].post;
            let holds = match post.get(atom) {
                Some(value) => value,
                None => base.contains(&crate::model::AgentId(agent_i as u32)),
            };
            if holds {
                ext.insert(crate::model::AgentId(i as u32));
            }
        }
        valuation.insert(atom, ext);
    }

    Ok(GeneralModel::from_parts(
        names,
        adjacency,
        valuation,
        model.theta().cloned(),
    ))
}

fn matching_pairs(
    model: &GeneralModel,
    action: &ActionModel,
) -> Result<Vec<(crate::model::AgentId, usize)>, ActionError> {
    let mut pre_extensions = Vec::with_capacity(action.states.len());
    for s in &action.states {
        pre_extensions.push(extension(model, &s.pre)?);
    }
    let mut pairs = Vec::new();
    for agent in model.agents() {
        for (idx, ext) in pre_extensions.iter().enumerate() {
            if ext.contains(&agent) {
                pairs.push((agent, idx));
            }
        }
    }
    Ok(pairs)
}

/// Product update for the partition case: the relation must be full and every
/// agent must satisfy exactly one precondition. The pairs `(a, s)` are then
/// relabeled back to `a`, and the result provably keeps the agents and the
/// network of the input.
pub fn canonical_product(
    model: &GeneralModel,
    action: &ActionModel,
) -> Result<GeneralModel, ActionError> {
    if !action.is_full_relation() {
        return Err(ActionError::NotFullRelation);
    }
    let pairs = matching_pairs(model, action)?;
    let mut match_count = vec![0usize; model.agent_count()];
    for &(agent, _) in &pairs {
        match_count[agent.index()] += 1;
    }
    if let Some((idx, &count)) = match_count.iter().enumerate().find(|(_, &c)| c != 1) {
        return Err(ActionError::NotAPartition {
            agent: model.name(crate::model::AgentId(idx as u32)).to_string(),
            matching: count,
        });
    }

    let product = product_update(model, action)?;

    // Relabel (a, s) back to a. With a partition each agent survives exactly
    // once, under the pair name "<agent>@<its unique state>".
    let mut original_by_pair_name: BTreeMap<String, usize> = BTreeMap::new();
    for &(agent, state) in &pairs {
        let pair_name = format!("{}@{}", model.name(agent), action.states[state].id);
        original_by_pair_name.insert(pair_name, agent.index());
    }
    let pair_to_original: Vec<usize> = product
        .names()
        .iter()
        .map(|name| original_by_pair_name[name])
        .collect();

    let mut valuation = BTreeMap::new();
    for (atom, ext) in product.valuation() {
        let mut relabeled = AgentSet::new();
        for pair in ext {
            relabeled.insert(crate::model::AgentId(
                pair_to_original[pair.index()] as u32,
            ));
        }
        valuation.insert(*atom, relabeled);
    }

    let result = model.with_valuation(valuation);

    // Prop-1 reasoning, executed: full relation plus partition leaves the
    // network untouched.
    debug_assert!({
        let mut ok = true;
        for (pair_idx, &orig_idx) in pair_to_original.iter().enumerate() {
            let relabeled: BTreeSet<usize> = product
                .network()
                .neighbors(crate::model::AgentId(pair_idx as u32))
                .iter()
                .map(|p| pair_to_original[p.index()])
                .collect();
            let original: BTreeSet<usize> = model
                .network()
                .neighbors(crate::model::AgentId(orig_idx as u32))
                .iter()
                .map(|a| a.index())
                .collect();
            ok &= relabeled == original;
        }
        ok
    });

    Ok(result)
}

/// [`canonical_product`] specialized to threshold models.
pub fn canonical_product_threshold(
    model: &ThresholdModel,
    action: &ActionModel,
) -> Result<ThresholdModel, ActionError> {
    let general = canonical_product(model.general(), action)?;
    Ok(ThresholdModel::from_general_unchecked(general))
}

/// The two-state action model for the inflating rule: adopt when the
/// `B`-neighbor fraction meets the threshold, otherwise keep going.
pub fn e1() -> ActionModel {
    let b = Formula::atom(Atom::B);
    ActionModel::new(
        vec![
            ActionState {
                id: "s1".to_string(),
                pre: Formula::diam_leq(b.clone()),
                post: PostCondition::adopt_b(),
            },
            ActionState {
                id: "s2".to_string(),
                pre: Formula::not(Formula::diam_leq(b)),
                post: PostCondition::keep(),
            },
        ],
        Relation::Full,
    )
    .expect("e1 is well formed")
}

/// The three-state action model for the conservative rule; catalog entry 6.
pub fn e2() -> ActionModel {
    catalog_entry(6).expect("6 is in range")
}

/// Catalog entry `i` of the 27 threshold-model update action models: three
/// states with the finest-partition preconditions (fraction strictly above,
/// exactly at, strictly below the threshold) and postconditions decoded from
/// `i - 1` in base 3, most significant digit first, digits `0 -> B`,
/// `1 -> no change`, `2 -> ~B`. Column 1 is `(B, B, B)`, column 27 is
/// `(~B, ~B, ~B)`.
pub fn catalog_entry(index: u32) -> Result<ActionModel, ActionError> {
    if !(1..=27).contains(&index) {
        return Err(ActionError::IndexOutOfRange(index));
    }
    let b = Formula::atom(Atom::B);
    let digits = [(index - 1) / 9 % 3, (index - 1) / 3 % 3, (index - 1) % 3];
    let post_of = |digit: u32| match digit {
        0 => PostCondition::adopt_b(),
        1 => PostCondition::keep(),
        _ => PostCondition::drop_b(),
    };
    let pres = [
        Formula::diam_lt(b.clone()),
        Formula::eq_theta(b.clone()),
        Formula::box_gt(Formula::not(b)),
    ];
    let states = pres
        .into_iter()
        .zip(digits)
        .enumerate()
        .map(|(i, (pre, digit))| ActionState {
            id: format!("s{}", i + 1),
            pre,
            post: post_of(digit),
        })
        .collect();
    ActionModel::new(states, Relation::Full)
}

/// How a catalog entry's induced dynamics is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsClass {
    Trivial,
    Nonsensical,
    CoordinationBr,
    SeededCoordination,
    AnticoordinationBr,
    SeededAnticoordination,
    Unclassified,
}

impl DynamicsClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DynamicsClass::Trivial => "trivial",
            DynamicsClass::Nonsensical => "nonsensical",
            DynamicsClass::CoordinationBr => "coordination_br",
            DynamicsClass::SeededCoordination => "seeded_coordination",
            DynamicsClass::AnticoordinationBr => "anticoordination_br",
            DynamicsClass::SeededAnticoordination => "seeded_anticoordination",
            DynamicsClass::Unclassified => "unclassified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "trivial" => DynamicsClass::Trivial,
            "nonsensical" => DynamicsClass::Nonsensical,
            "coordination_br" => DynamicsClass::CoordinationBr,
            "seeded_coordination" => DynamicsClass::SeededCoordination,
            "anticoordination_br" => DynamicsClass::AnticoordinationBr,
            "seeded_anticoordination" => DynamicsClass::SeededAnticoordination,
            "unclassified" => DynamicsClass::Unclassified,
            _ => return None,
        })
    }
}

impl std::fmt::Display for DynamicsClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification of catalog entry `i` into the named dynamics families;
/// four entries remain unclassified.
pub fn classify(index: u32) -> Result<DynamicsClass, ActionError> {
    if !(1..=27).contains(&index) {
        return Err(ActionError::IndexOutOfRange(index));
    }
    Ok(match index {
        1 | 14 | 27 => DynamicsClass::Trivial,
        4 | 7 | 8 | 16 | 17 | 24 => DynamicsClass::Nonsensical,
        3 | 6 | 9 => DynamicsClass::CoordinationBr,
        2 | 5 | 15 | 18 => DynamicsClass::SeededCoordination,
        19 | 22 | 25 => DynamicsClass::AnticoordinationBr,
        10 | 13 | 23 | 26 => DynamicsClass::SeededAnticoordination,
        _ => DynamicsClass::Unclassified,
    })
}

/// One row of the catalog listing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub index: u32,
    pub model: ActionModel,
    pub class: DynamicsClass,
}

/// All 27 catalog entries in order.
pub fn catalog() -> Vec<CatalogEntry> {
    (1..=27)
        .map(|index| CatalogEntry {
            index,
            model: catalog_entry(index).expect("in range"),
            class: classify(index).expect("in range"),
        })
        .collect()
}
