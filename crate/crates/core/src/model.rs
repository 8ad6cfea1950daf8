//! Threshold models and their generalization to arbitrary atom valuations.
//!
//! A threshold model is a tuple of a finite agent set, a symmetric irreflexive
//! network, a behavior extension and an exact rational threshold in `[0, 1]`.
//! Agents are user-supplied strings, mapped to dense indices internally; all
//! output surfaces use the original strings. Every agent must have degree at
//! least one, because every update rule divides by the neighborhood size.
//!
//! [`GeneralModel`] drops the "single atom `B` plus mandatory threshold" shape
//! and instead carries a valuation from atom names to agent sets, with the
//! threshold optional. The belief-change instance uses atoms `Bp` and `Bnp`
//! (mutually exclusive; "undecided" is always derived, never stored).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::logic::Atom;
use crate::rational::Rat;

/// Dense agent index, valid for the model that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of agents, ordered for deterministic iteration.
pub type AgentSet = BTreeSet<AgentId>;

/// Symmetric, irreflexive adjacency over dense agent indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<AgentSet>,
}

impl Network {
    pub fn neighbors(&self, agent: AgentId) -> &AgentSet {
        &self.adjacency[agent.index()]
    }

    pub fn degree(&self, agent: AgentId) -> usize {
        self.adjacency[agent.index()].len()
    }

    /// Undirected edges as ordered pairs `(low, high)`, sorted.
    pub fn edges(&self) -> Vec<(AgentId, AgentId)> {
        let mut out = Vec::new();
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            let a = AgentId(i as u32);
            for &b in nbrs {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn from_edge_list(n: usize, edges: &[(AgentId, AgentId)]) -> Result<Self, ModelError> {
        let mut adjacency = vec![AgentSet::new(); n];
        for &(a, b) in edges {
            if a == b {
                return Err(ModelError::SelfLoop {
                    agent: a.index().to_string(),
                });
            }
            // Symmetrized: one direction in the input implies both.
            adjacency[a.index()].insert(b);
            adjacency[b.index()].insert(a);
        }
        Ok(Network { adjacency })
    }
}

/// Errors raised while validating model input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("self-loop on agent {agent}")]
    SelfLoop { agent: String },
    #[error("agent {agent} has no neighbors; every agent needs degree >= 1")]
    IsolatedAgent { agent: String },
    #[error("unknown agent {agent}")]
    UnknownAgent { agent: String },
    #[error("duplicate agent name {agent}")]
    DuplicateAgent { agent: String },
    #[error("theta = {theta} is outside [0, 1]")]
    ThetaOutOfRange { theta: Rat },
    #[error("atoms {first} and {second} overlap on agent {agent}; they must be mutually exclusive")]
    OverlappingAtoms {
        first: String,
        second: String,
        agent: String,
    },
    #[error("model has no agents")]
    Empty,
}

/// A Kripke-style model: agents, network, a valuation over atoms, and an
/// optional threshold. The threshold modalities of the formula language
/// require the threshold to be present; the friendship modalities do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralModel {
    names: Vec<String>,
    network: Network,
    valuation: BTreeMap<Atom, AgentSet>,
    theta: Option<Rat>,
}

impl GeneralModel {
    /// Validating constructor. Agent names are sorted and deduplicated into
    /// dense indices; edges are given over names and symmetrized.
    pub fn build(
        agents: &[&str],
        edges: &[(&str, &str)],
        valuation: BTreeMap<Atom, Vec<&str>>,
        theta: Option<Rat>,
    ) -> Result<Self, ModelError> {
        if agents.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut names: Vec<String> = agents.iter().map(|s| s.to_string()).collect();
        names.sort();
        for pair in names.windows(2) {
            if pair[0] == pair[1] {
                return Err(ModelError::DuplicateAgent {
                    agent: pair[0].clone(),
                });
            }
        }
        let id_of = |name: &str| -> Result<AgentId, ModelError> {
            names
                .binary_search_by(|probe| probe.as_str().cmp(name))
                .map(|i| AgentId(i as u32))
                .map_err(|_| ModelError::UnknownAgent {
                    agent: name.to_string(),
                })
        };

        let mut edge_ids = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let (ia, ib) = (id_of(a)?, id_of(b)?);
            if ia == ib {
                return Err(ModelError::SelfLoop { agent: a.to_string() });
            }
            edge_ids.push((ia, ib));
        }
        let network = Network::from_edge_list(names.len(), &edge_ids)?;
        for (i, name) in names.iter().enumerate() {
            if network.degree(AgentId(i as u32)) == 0 {
                return Err(ModelError::IsolatedAgent { agent: name.clone() });
            }
        }

        if let Some(theta) = &theta {
            if !theta.in_unit_interval() {
                return Err(ModelError::ThetaOutOfRange { theta: theta.clone() });
            }
        }

        let mut val = BTreeMap::new();
        for (atom, members) in valuation {
            let mut set = AgentSet::new();
            for name in members {
                set.insert(id_of(name)?);
            }
            val.insert(atom, set);
        }
        // Belief instance: the extensions of Bp and Bnp must be disjoint.
        if let (Some(bp), Some(bnp)) = (val.get(&Atom::Bp), val.get(&Atom::Bnp)) {
            if let Some(agent) = bp.intersection(bnp).next() {
                return Err(ModelError::OverlappingAtoms {
                    first: Atom::Bp.to_string(),
                    second: Atom::Bnp.to_string(),
                    agent: names[agent.index()].clone(),
                });
            }
        }

        Ok(GeneralModel {
            names,
            network,
            valuation: val,
            theta,
        })
    }

    /// Constructor for crate-internal callers that already hold dense data
    /// and guarantee name/network consistency (product update, step rules).
    /// Unlike [`GeneralModel::build`] this does not enforce degree >= 1:
    /// a product with a partial action-model relation can isolate agents.
    pub(crate) fn from_parts(
        names: Vec<String>,
        adjacency: Vec<AgentSet>,
        valuation: BTreeMap<Atom, AgentSet>,
        theta: Option<Rat>,
    ) -> Self {
        debug_assert_eq!(names.len(), adjacency.len());
        GeneralModel {
            names,
            network: Network { adjacency },
            valuation,
            theta,
        }
    }

    pub fn agent_count(&self) -> usize {
        self.names.len()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.names.len() as u32).map(AgentId)
    }

    pub fn all_agents(&self) -> AgentSet {
        self.agents().collect()
    }

    pub fn name(&self, agent: AgentId) -> &str {
        &self.names[agent.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.names
            .binary_search_by(|probe| probe.as_str().cmp(name))
            .ok()
            .map(|i| AgentId(i as u32))
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn theta(&self) -> Option<&Rat> {
        self.theta.as_ref()
    }

    pub fn atom_extension(&self, atom: Atom) -> Option<&AgentSet> {
        self.valuation.get(&atom)
    }

    pub fn valuation(&self) -> &BTreeMap<Atom, AgentSet> {
        &self.valuation
    }

    /// Same agents and network, new valuation. Used by the one-step updates,
    /// which never touch the network.
    pub fn with_valuation(&self, valuation: BTreeMap<Atom, AgentSet>) -> Self {
        GeneralModel {
            names: self.names.clone(),
            network: self.network.clone(),
            valuation,
            theta: self.theta.clone(),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.agents().map(|a| self.network.degree(a)).max().unwrap_or(0)
    }
}

/// The classic threshold model: a [`GeneralModel`] whose valuation is the
/// single atom `B` and whose threshold is always present.
#[derive(Clone, PartialEq, Eq)]
pub struct ThresholdModel(GeneralModel);

impl ThresholdModel {
    pub fn general(&self) -> &GeneralModel {
        &self.0
    }

    pub fn into_general(self) -> GeneralModel {
        self.0
    }

    /// Wraps a general model that satisfies the threshold-model shape.
    /// Crate-internal; public construction goes through [`build_model`].
    pub(crate) fn from_general_unchecked(inner: GeneralModel) -> Self {
        debug_assert!(inner.theta.is_some());
        debug_assert!(inner.valuation.keys().eq([&Atom::B]));
        ThresholdModel(inner)
    }

    pub fn behavior(&self) -> &AgentSet {
        self.0
            .atom_extension(Atom::B)
            .expect("threshold model stores atom B")
    }

    pub fn theta(&self) -> &Rat {
        self.0.theta().expect("threshold model stores theta")
    }

    pub fn network(&self) -> &Network {
        self.0.network()
    }

    pub fn agent_count(&self) -> usize {
        self.0.agent_count()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.0.agents()
    }

    pub fn name(&self, agent: AgentId) -> &str {
        self.0.name(agent)
    }

    pub fn names(&self) -> &[String] {
        self.0.names()
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.0.agent_id(name)
    }

    /// Same agents, network and threshold with a replacement behavior set.
    pub fn with_behavior(&self, behavior: AgentSet) -> Self {
        let mut valuation = BTreeMap::new();
        valuation.insert(Atom::B, behavior);
        ThresholdModel(self.0.with_valuation(valuation))
    }

    pub fn behavior_names(&self) -> Vec<String> {
        self.behavior()
            .iter()
            .map(|&a| self.name(a).to_string())
            .collect()
    }
}

impl fmt::Debug for ThresholdModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<(&str, &str)> = self
            .network()
            .edges()
            .iter()
            .map(|&(a, b)| (self.name(a), self.name(b)))
            .collect();
        f.debug_struct("ThresholdModel")
            .field("agents", &self.names())
            .field("edges", &edges)
            .field("behavior", &self.behavior_names())
            .field("theta", self.theta())
            .finish()
    }
}

/// Validating constructor for threshold models from raw name-level input.
/// The edge list is symmetrized: supplying `(a, b)` implies `(b, a)`.
pub fn build_model(
    agents: &[&str],
    edges: &[(&str, &str)],
    behavior: &[&str],
    theta: Rat,
) -> Result<ThresholdModel, ModelError> {
    let mut valuation = BTreeMap::new();
    valuation.insert(Atom::B, behavior.to_vec());
    let general = GeneralModel::build(agents, edges, valuation, Some(theta))?;
    Ok(ThresholdModel(general))
}

/// `|N(a) ∩ extension| / |N(a)|`, exactly.
pub fn neighbor_fraction(
    model: &GeneralModel,
    agent: AgentId,
    extension: &AgentSet,
) -> Result<Rat, ModelError> {
    if agent.index() >= model.agent_count() {
        return Err(ModelError::UnknownAgent {
            agent: format!("#{}", agent.0),
        });
    }
    let neighbors = model.network().neighbors(agent);
    if neighbors.is_empty() {
        return Err(ModelError::IsolatedAgent {
            agent: model.name(agent).to_string(),
        });
    }
    let hits = neighbors.intersection(extension).count();
    Ok(Rat::ratio(hits, neighbors.len()))
}
