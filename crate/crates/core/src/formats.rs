//! File formats: model / action-model / automaton JSON, trace CSV, and DOT
//! export.
//!
//! Emission is canonical -- object keys sorted, agent and edge lists sorted,
//! formulas printed through the canonical printer -- so identical values
//! serialize to identical bytes and translation round-trips are diff-stable.
//! Thresholds are accepted only as rational strings; a JSON number is
//! rejected with a pointer at the exactness requirement.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::action::{ActionError, ActionModel, ActionState, PostCondition, Relation};
use crate::belief::{Automaton, AutomatonState, AutomatonTransition, BeliefError};
use crate::logic::{parse, Atom, Formula, ParseError};
use crate::model::{build_model, GeneralModel, ModelError, ThresholdModel};
use crate::orbit::Trace;
use crate::rational::{ParseRatError, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Shape(String),
    #[error(
        "theta must be an exact rational string like \"1/2\" or \"1\"; \
         floating-point numbers are not accepted because the tie test \
         `fraction = theta` has to be decided exactly"
    )]
    FloatTheta,
    #[error("bad theta: {0}")]
    Theta(#[from] ParseRatError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("bad formula {text:?}: {error}")]
    Formula { text: String, error: ParseError },
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

fn json_value(text: &str) -> Result<Value, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))
}

fn parse_formula(text: &str) -> Result<Formula, FormatError> {
    parse(text).map_err(|error| FormatError::Formula {
        text: text.to_string(),
        error,
    })
}

fn as_object<'v>(value: &'v Value, what: &str) -> Result<&'v Map<String, Value>, FormatError> {
    value
        .as_object()
        .ok_or_else(|| FormatError::Shape(format!("{what} must be a JSON object")))
}

fn string_array(value: &Value, what: &str) -> Result<Vec<String>, FormatError> {
    let arr = value
        .as_array()
        .ok_or_else(|| FormatError::Shape(format!("{what} must be an array")))?;
    arr.iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| FormatError::Shape(format!("{what} must contain strings")))
        })
        .collect()
}

fn theta_from(value: &Value) -> Result<Rat, FormatError> {
    match value {
        Value::String(s) => Ok(s.parse::<Rat>()?),
        Value::Number(_) => Err(FormatError::FloatTheta),
        _ => Err(FormatError::Shape("theta must be a string".to_string())),
    }
}

/// A parsed model document: the classic threshold shape (`behavior` key) or
/// the general valuation shape (`valuation` key).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelDocument {
    Threshold(ThresholdModel),
    General(GeneralModel),
}

impl ModelDocument {
    pub fn as_threshold(&self) -> Option<&ThresholdModel> {
        match self {
            ModelDocument::Threshold(m) => Some(m),
            ModelDocument::General(_) => None,
        }
    }

    pub fn as_general(&self) -> &GeneralModel {
        match self {
            ModelDocument::Threshold(m) => m.general(),
            ModelDocument::General(m) => m,
        }
    }
}

/// Parses a model document.
///
/// Threshold shape: `{"agents": [...], "edges": [["a","b"], ...],
/// "behavior": [...], "theta": "p/q"}`. General shape replaces `behavior`
/// with `"valuation": {"Bp": [...], ...}` and makes `theta` optional.
pub fn model_from_json(text: &str) -> Result<ModelDocument, FormatError> {
    let value = json_value(text)?;
    let obj = as_object(&value, "model document")?;

    let agents = string_array(
        obj.get("agents")
            .ok_or_else(|| FormatError::Shape("missing \"agents\"".to_string()))?,
        "agents",
    )?;
    let edges_value = obj
        .get("edges")
        .ok_or_else(|| FormatError::Shape("missing \"edges\"".to_string()))?
        .as_array()
        .ok_or_else(|| FormatError::Shape("edges must be an array".to_string()))?;
    let mut edges = Vec::with_capacity(edges_value.len());
    for e in edges_value {
        let pair = string_array(e, "edge")?;
        if pair.len() != 2 {
            return Err(FormatError::Shape(
                "each edge must be a two-element array".to_string(),
            ));
        }
        edges.push((pair[0].clone(), pair[1].clone()));
    }
    let agent_refs: Vec<&str> = agents.iter().map(String::as_str).collect();
    let edge_refs: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();

    match (obj.get("behavior"), obj.get("valuation")) {
        (Some(_), Some(_)) => Err(FormatError::Shape(
            "a model document has either \"behavior\" or \"valuation\", not both".to_string(),
        )),
        (Some(behavior), None) => {
            let theta = theta_from(obj.get("theta").ok_or_else(|| {
                FormatError::Shape("threshold models require \"theta\"".to_string())
            })?)?;
            let behavior = string_array(behavior, "behavior")?;
            let behavior_refs: Vec<&str> = behavior.iter().map(String::as_str).collect();
            Ok(ModelDocument::Threshold(build_model(
                &agent_refs,
                &edge_refs,
                &behavior_refs,
                theta,
            )?))
        }
        (None, Some(valuation)) => {
            let val_obj = as_object(valuation, "valuation")?;
            let mut valuation = BTreeMap::new();
            for (name, members) in val_obj {
                let atom = Atom::from_name(name).ok_or_else(|| {
                    FormatError::Shape(format!("unknown atom {name:?} in valuation"))
                })?;
                let members = string_array(members, "valuation entry")?;
                valuation.insert(atom, members);
            }
            let theta = obj.get("theta").map(theta_from).transpose()?;
            let with_refs: BTreeMap<Atom, Vec<&str>> = valuation
                .iter()
                .map(|(atom, members)| (*atom, members.iter().map(String::as_str).collect()))
                .collect();
            Ok(ModelDocument::General(GeneralModel::build(
                &agent_refs,
                &edge_refs,
                with_refs,
                theta,
            )?))
        }
        (None, None) => Err(FormatError::Shape(
            "a model document needs \"behavior\" or \"valuation\"".to_string(),
        )),
    }
}

pub fn threshold_model_to_json(model: &ThresholdModel) -> String {
    let edges: Vec<Value> = model
        .network()
        .edges()
        .iter()
        .map(|&(a, b)| json!([model.name(a), model.name(b)]))
        .collect();
    render(json!({
        "agents": model.names(),
        "edges": edges,
        "behavior": model.behavior_names(),
        "theta": model.theta().to_string(),
    }))
}

pub fn general_model_to_json(model: &GeneralModel) -> String {
    let edges: Vec<Value> = model
        .network()
        .edges()
        .iter()
        .map(|&(a, b)| json!([model.name(a), model.name(b)]))
        .collect();
    let valuation: Map<String, Value> = model
        .valuation()
        .iter()
        .map(|(atom, ext)| {
            let members: Vec<&str> = ext.iter().map(|&a| model.name(a)).collect();
            (atom.as_str().to_string(), json!(members))
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("agents".to_string(), json!(model.names()));
    doc.insert("edges".to_string(), json!(edges));
    doc.insert("valuation".to_string(), Value::Object(valuation));
    if let Some(theta) = model.theta() {
        doc.insert("theta".to_string(), json!(theta.to_string()));
    }
    render(Value::Object(doc))
}

fn post_to_value(post: &PostCondition) -> Value {
    let map = post.assignment();
    if map.is_empty() {
        return json!("T");
    }
    if map.len() == 1 {
        if let Some(&value) = map.get(&Atom::B) {
            return json!(if value { "B" } else { "~B" });
        }
    }
    let obj: Map<String, Value> = map
        .iter()
        .map(|(atom, &v)| (atom.as_str().to_string(), json!(v)))
        .collect();
    Value::Object(obj)
}

fn post_from_value(value: &Value) -> Result<PostCondition, FormatError> {
    match value {
        Value::String(s) => match s.as_str() {
            "T" => Ok(PostCondition::keep()),
            "B" => Ok(PostCondition::adopt_b()),
            "~B" => Ok(PostCondition::drop_b()),
            other => Err(FormatError::Shape(format!(
                "post must be \"B\", \"~B\", \"T\" or an atom map, got {other:?}"
            ))),
        },
        Value::Object(map) => {
            let mut assignment = BTreeMap::new();
            for (name, v) in map {
                let atom = Atom::from_name(name)
                    .ok_or_else(|| FormatError::Shape(format!("unknown atom {name:?} in post")))?;
                let b = v.as_bool().ok_or_else(|| {
                    FormatError::Shape("post atom values must be booleans".to_string())
                })?;
                assignment.insert(atom, b);
            }
            Ok(PostCondition::from_assignment(assignment))
        }
        _ => Err(FormatError::Shape(
            "post must be a string or an atom map".to_string(),
        )),
    }
}

/// Parses `{"states": [{"id", "pre", "post"}, ...], "relation": "full" |
/// [["s1","s2"], ...]}`.
pub fn action_model_from_json(text: &str) -> Result<ActionModel, FormatError> {
    let value = json_value(text)?;
    let obj = as_object(&value, "action model")?;
    let states_value = obj
        .get("states")
        .and_then(Value::as_array)
        .ok_or_else(|| FormatError::Shape("missing \"states\" array".to_string()))?;
    let mut states = Vec::with_capacity(states_value.len());
    for s in states_value {
        let s = as_object(s, "action state")?;
        let id = s
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::Shape("action state needs an \"id\"".to_string()))?;
        let pre_text = s
            .get("pre")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::Shape("action state needs a \"pre\" formula".to_string()))?;
        let post = post_from_value(
            s.get("post")
                .ok_or_else(|| FormatError::Shape("action state needs a \"post\"".to_string()))?,
        )?;
        states.push(ActionState {
            id: id.to_string(),
            pre: parse_formula(pre_text)?,
            post,
        });
    }
    let relation = match obj.get("relation") {
        None => Relation::Full,
        Some(Value::String(s)) if s == "full" => Relation::Full,
        Some(Value::Array(pairs)) => {
            let mut set = std::collections::BTreeSet::new();
            for p in pairs {
                let pair = string_array(p, "relation pair")?;
                if pair.len() != 2 {
                    return Err(FormatError::Shape(
                        "relation pairs must have two elements".to_string(),
                    ));
                }
                set.insert((pair[0].clone(), pair[1].clone()));
            }
            Relation::Pairs(set)
        }
        Some(_) => {
            return Err(FormatError::Shape(
                "relation must be \"full\" or an array of pairs".to_string(),
            ))
        }
    };
    Ok(ActionModel::new(states, relation)?)
}

pub fn action_model_to_json(action: &ActionModel) -> String {
    let states: Vec<Value> = action
        .states()
        .iter()
        .map(|s| {
            json!({
                "id": s.id,
                "pre": s.pre.to_string(),
                "post": post_to_value(&s.post),
            })
        })
        .collect();
    let relation = match action.relation() {
        Relation::Full => json!("full"),
        Relation::Pairs(pairs) => {
            json!(pairs.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>())
        }
    };
    render(json!({
        "states": states,
        "relation": relation,
    }))
}

/// Parses `{"states": [{"id", "label"}, ...], "transitions": [{"from",
/// "trigger", "to"}, ...]}`.
pub fn automaton_from_json(text: &str) -> Result<Automaton, FormatError> {
    let value = json_value(text)?;
    let obj = as_object(&value, "automaton")?;
    let states_value = obj
        .get("states")
        .and_then(Value::as_array)
        .ok_or_else(|| FormatError::Shape("missing \"states\" array".to_string()))?;
    let mut states = Vec::with_capacity(states_value.len());
    for s in states_value {
        let s = as_object(s, "automaton state")?;
        let id = s
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::Shape("automaton state needs an \"id\"".to_string()))?;
        let label = s
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::Shape("automaton state needs a \"label\"".to_string()))?;
        states.push(AutomatonState {
            id: id.to_string(),
            label: parse_formula(label)?,
        });
    }
    let transitions_value = obj
        .get("transitions")
        .and_then(Value::as_array)
        .ok_or_else(|| FormatError::Shape("missing \"transitions\" array".to_string()))?;
    let mut transitions = Vec::with_capacity(transitions_value.len());
    for t in transitions_value {
        let t = as_object(t, "transition")?;
        let field = |k: &str| -> Result<&str, FormatError> {
            t.get(k)
                .and_then(Value::as_str)
                .ok_or_else(|| FormatError::Shape(format!("transition needs \"{k}\"")))
        };
        transitions.push(AutomatonTransition {
            from: field("from")?.to_string(),
            trigger: parse_formula(field("trigger")?)?,
            to: field("to")?.to_string(),
        });
    }
    Ok(Automaton::new(states, transitions)?)
}

pub fn automaton_to_json(automaton: &Automaton) -> String {
    let states: Vec<Value> = automaton
        .states()
        .iter()
        .map(|s| json!({"id": s.id, "label": s.label.to_string()}))
        .collect();
    let transitions: Vec<Value> = automaton
        .transitions()
        .iter()
        .map(|t| json!({"from": t.from, "trigger": t.trigger.to_string(), "to": t.to}))
        .collect();
    render(json!({
        "states": states,
        "transitions": transitions,
    }))
}

/// CSV rendering of a behavior trace: header `step,<agent...>`, one row per
/// step with 0/1 membership, agents in sorted name order.
pub fn trace_to_csv(trace: &Trace) -> String {
    let model = trace.initial();
    let mut out = String::from("step");
    for name in model.names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (step, behavior) in trace.steps().iter().enumerate() {
        out.push_str(&step.to_string());
        for agent in model.agents() {
            out.push(',');
            out.push(if behavior.contains(&agent) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// CSV rendering of a belief run: cells carry the atom-state name
/// (`Bp` / `Bnp` / `Up`).
pub fn belief_trace_to_csv(models: &[GeneralModel]) -> String {
    let Some(first) = models.first() else {
        return String::from("step\n");
    };
    let mut out = String::from("step");
    for name in first.names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (step, model) in models.iter().enumerate() {
        out.push_str(&step.to_string());
        let bp = model.atom_extension(Atom::Bp).cloned().unwrap_or_default();
        let bnp = model.atom_extension(Atom::Bnp).cloned().unwrap_or_default();
        for agent in model.agents() {
            out.push(',');
            out.push_str(if bp.contains(&agent) {
                "Bp"
            } else if bnp.contains(&agent) {
                "Bnp"
            } else {
                "Up"
            });
        }
        out.push('\n');
    }
    out
}

/// DOT rendering: undirected graph, `B`-agents filled, nodes and edges in
/// sorted order so equal models emit identical bytes.
pub fn threshold_model_to_dot(model: &ThresholdModel) -> String {
    let mut out = String::from("graph model {\n");
    for agent in model.agents() {
        let name = model.name(agent);
        if model.behavior().contains(&agent) {
            out.push_str(&format!("  {name} [style=filled];\n"));
        } else {
            out.push_str(&format!("  {name};\n"));
        }
    }
    for (a, b) in model.network().edges() {
        out.push_str(&format!("  {} -- {};\n", model.name(a), model.name(b)));
    }
    out.push_str("}\n");
    out
}

/// DOT rendering of a belief model: nodes carry their atom-state in the
/// label, `Bp`-agents filled.
pub fn general_model_to_dot(model: &GeneralModel) -> String {
    let bp = model.atom_extension(Atom::Bp).cloned().unwrap_or_default();
    let bnp = model.atom_extension(Atom::Bnp).cloned().unwrap_or_default();
    let mut out = String::from("graph model {\n");
    for agent in model.agents() {
        let name = model.name(agent);
        let state = if bp.contains(&agent) {
            "Bp"
        } else if bnp.contains(&agent) {
            "Bnp"
        } else {
            "Up"
        };
        if bp.contains(&agent) {
            out.push_str(&format!("  {name} [label=\"{name}:{state}\", style=filled];\n"));
        } else {
            out.push_str(&format!("  {name} [label=\"{name}:{state}\"];\n"));
        }
    }
    for (a, b) in model.network().edges() {
        out.push_str(&format!("  {} -- {};\n", model.name(a), model.name(b)));
    }
    out.push_str("}\n");
    out
}

fn render(value: Value) -> String {
    let mut text = serde_json::to_string_pretty(&value).expect("serialization cannot fail");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{run, UpdateRule};

    const TWO_CLIQUE: &str = r#"{
        "agents": ["a", "b"],
        "edges": [["a", "b"]],
        "behavior": ["a"],
        "theta": "1/2"
    }"#;

    #[test]
    fn threshold_document_round_trip() {
        let doc = model_from_json(TWO_CLIQUE).unwrap();
        let model = doc.as_threshold().unwrap();
        assert_eq!(model.theta(), &Rat::new(1, 2));
        let emitted = threshold_model_to_json(model);
        let again = model_from_json(&emitted).unwrap();
        assert_eq!(doc, again);
        // Canonical emission is a fixed point.
        assert_eq!(emitted, threshold_model_to_json(again.as_threshold().unwrap()));
    }

    #[test]
    fn float_theta_is_a_hard_error() {
        let text = r#"{"agents": ["a","b"], "edges": [["a","b"]], "behavior": [], "theta": 0.5}"#;
        let err = model_from_json(text).unwrap_err();
        assert_eq!(err, FormatError::FloatTheta);
        assert!(err.to_string().contains("exact"));
        // Fraction strings with a decimal point are rejected too.
        let text = r#"{"agents": ["a","b"], "edges": [["a","b"]], "behavior": [], "theta": "0.5"}"#;
        assert!(matches!(model_from_json(text), Err(FormatError::Theta(_))));
    }

    #[test]
    fn integer_string_theta_is_accepted() {
        let text = r#"{"agents": ["a","b"], "edges": [["a","b"]], "behavior": ["a"], "theta": "1"}"#;
        let doc = model_from_json(text).unwrap();
        assert_eq!(doc.as_threshold().unwrap().theta(), &Rat::one());
    }

    #[test]
    fn belief_document_parses() {
        let text = r#"{
            "agents": ["a", "b", "c"],
            "edges": [["a","b"], ["b","c"]],
            "valuation": {"Bp": ["a"], "Bnp": ["c"]}
        }"#;
        let doc = model_from_json(text).unwrap();
        let m = doc.as_general();
        assert!(m.theta().is_none());
        assert_eq!(m.atom_extension(Atom::Bp).unwrap().len(), 1);
        let emitted = general_model_to_json(m);
        assert_eq!(model_from_json(&emitted).unwrap().as_general(), m);
    }

    #[test]
    fn action_model_round_trip_with_string_posts() {
        let am = crate::action::catalog_entry(6).unwrap();
        let emitted = action_model_to_json(&am);
        let parsed = action_model_from_json(&emitted).unwrap();
        assert_eq!(parsed, am);
        assert!(emitted.contains("\"~B\""));
        assert!(emitted.contains("\"full\""));
    }

    #[test]
    fn automaton_round_trip() {
        let auto = crate::belief::influence_automaton();
        let emitted = automaton_to_json(&auto);
        let parsed = automaton_from_json(&emitted).unwrap();
        assert_eq!(parsed, auto);
    }

    #[test]
    fn trace_csv_golden() {
        let model = model_from_json(TWO_CLIQUE).unwrap();
        let model = model.as_threshold().unwrap();
        let trace = run(model, &UpdateRule::Eq1, 2).unwrap();
        assert_eq!(trace_to_csv(&trace), "step,a,b\n0,1,0\n1,1,1\n2,1,1\n");
    }

    #[test]
    fn dot_golden_and_determinism() {
        let model = model_from_json(TWO_CLIQUE).unwrap();
        let model = model.as_threshold().unwrap();
        let dot = threshold_model_to_dot(model);
        assert_eq!(dot, "graph model {\n  a [style=filled];\n  b;\n  a -- b;\n}\n");
        assert_eq!(dot, threshold_model_to_dot(model));
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(matches!(model_from_json("granularity"), Err(FormatError::Json(_))));
        assert!(matches!(
            model_from_json(r#"{"agents": ["a"], "edges": []}"#),
            Err(FormatError::Shape(_))
        ));
        let bad_formula = r#"{"states": [{"id": "s", "pre": "(=) B &", "post": "T"}]}"#;
        assert!(matches!(
            action_model_from_json(bad_formula),
            Err(FormatError::Formula { .. })
        ));
    }
}
