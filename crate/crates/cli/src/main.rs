//! Command-line front end: simulate traces and orbits, machine-check
//! step-wise equivalences, list the action-model catalog, and translate
//! between automata and action models.
//!
//! Exit codes are a stable contract for scripting: 0 on success or an
//! equivalence PASS, 1 on an equivalence FAIL, 2 on usage or validation
//! errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tam_core::action::catalog;
use tam_core::belief::{canonical_action_model, canonical_automaton, run_automaton, Automaton};
use tam_core::formats::{
    action_model_from_json, action_model_to_json, automaton_from_json, automaton_to_json,
    belief_trace_to_csv, general_model_to_dot, general_model_to_json, model_from_json,
    threshold_model_to_dot, trace_to_csv, ModelDocument,
};
use tam_core::orbit::{equivalence_trials, orbit_cap_for, TrialConfig};
use tam_core::{
    canonical_product, detect_orbit, e1, e2, catalog_entry, ActionModel, DynamicsClass, Game,
    GeneralModel, Rat, ThresholdModel, TiePolicy, Trace, UpdateRule,
};

#[derive(Parser)]
#[command(
    name = "threshold-am",
    version,
    about = "Threshold-model diffusion dynamics and their action-model encodings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an update rule on a model and emit the trace (CSV or DOT).
    Simulate {
        /// Model JSON file (threshold or valuation shape).
        #[arg(long)]
        model: PathBuf,
        /// Rule spec: eq1 | eq2 | br:<coord|anti>:<x>:<y>:<tie>[:seed] |
        /// am:<1..27> | am:e1 | am:e2 | am:file=<path> | auto:file=<path>.
        #[arg(long)]
        rule: String,
        /// Number of steps to run.
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Also detect the orbit and print `transient=<k> period=<p>`.
        #[arg(long)]
        orbit: bool,
        /// Step cap for orbit detection (default: 2^agents + 1).
        #[arg(long)]
        cap: Option<usize>,
        /// Output format: csv | dot.
        #[arg(long, default_value = "csv")]
        format: String,
        /// With `--format dot`, write one DOT file per step into this
        /// directory (frame_000.dot, frame_001.dot, ...).
        #[arg(long)]
        frames: Option<PathBuf>,
        /// Write the main output to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check two rules for step-wise equivalence on one model or on a stream
    /// of seeded random models.
    Equiv {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Check this single model instead of random trials.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Maximum number of agents per random model (minimum is 2).
        #[arg(long, default_value_t = 10)]
        agents: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Generator seed; defaults to $THRESHOLD_AM_SEED or 7.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "edge-p", default_value_t = 0.5)]
        edge_p: f64,
        #[arg(long = "behavior-p", default_value_t = 0.5)]
        behavior_p: f64,
        /// Pin the threshold of every generated model, e.g. `1/2`.
        #[arg(long)]
        theta: Option<String>,
    },
    /// List the 27 catalog action models with preconditions, postconditions
    /// and classification.
    Catalog {
        /// Only rows of this class (trivial, nonsensical, coordination_br,
        /// seeded_coordination, anticoordination_br, seeded_anticoordination,
        /// unclassified).
        #[arg(long)]
        class: Option<String>,
        /// Emit the catalog as canonical JSON.
        #[arg(long)]
        json: bool,
    },
    /// Convert automaton JSON <-> action-model JSON (canonical output).
    Translate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Target kind: automaton | action-model.
        #[arg(long)]
        to: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// One-line diagnostics; every variant exits with code 2.
struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(CliError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Simulate {
            model,
            rule,
            steps,
            orbit,
            cap,
            format,
            frames,
            out,
        } => cmd_simulate(&model, &rule, steps, orbit, cap, &format, frames, out),
        Command::Equiv {
            left,
            right,
            model,
            trials,
            agents,
            steps,
            seed,
            edge_p,
            behavior_p,
            theta,
        } => cmd_equiv(
            &left, &right, model, trials, agents, steps, seed, edge_p, behavior_p, theta,
        ),
        Command::Catalog { class, json } => cmd_catalog(class, json),
        Command::Translate { input, to, out } => cmd_translate(&input, &to, out),
    }
}

// ---------------------------------------------------------------------------
// Rule specs
// ---------------------------------------------------------------------------

enum RuleSpec {
    Threshold(UpdateRule),
    ActionFile(ActionModel),
    Automaton(Automaton),
}

fn parse_rule(spec: &str) -> Result<RuleSpec, CliError> {
    match spec {
        "eq1" => return Ok(RuleSpec::Threshold(UpdateRule::Eq1)),
        "eq2" => return Ok(RuleSpec::Threshold(UpdateRule::Eq2)),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("am:") {
        if let Some(path) = rest.strip_prefix("file=") {
            let action = action_model_from_json(&read_file(Path::new(path))?)?;
            return Ok(RuleSpec::ActionFile(action));
        }
        return Ok(RuleSpec::Threshold(UpdateRule::ActionModel(match rest {
            "e1" => e1(),
            "e2" => e2(),
            _ => {
                let index: u32 = rest
                    .parse()
                    .map_err(|_| CliError(format!("bad action-model spec {rest:?}")))?;
                catalog_entry(index)
                    .map_err(|_| CliError("rule index out of range 1..27".to_string()))?
            }
        })));
    }
    if let Some(path) = spec.strip_prefix("auto:file=") {
        let automaton = automaton_from_json(&read_file(Path::new(path))?)?;
        return Ok(RuleSpec::Automaton(automaton));
    }
    if let Some(rest) = spec.strip_prefix("br:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(CliError(format!(
                "best-response spec must be br:<coord|anti>:<x>:<y>:<tie>[:seed], got {spec:?}"
            )));
        }
        let x: Rat = parts[1].parse()?;
        let y: Rat = parts[2].parse()?;
        let game = match parts[0] {
            "coord" => Game::coordination(x, y)?,
            "anti" => Game::anticoordination(x, y)?,
            other => return Err(CliError(format!("unknown game kind {other:?}"))),
        };
        let tie = match parts[3].to_ascii_lowercase().as_str() {
            "favor_b" => TiePolicy::FavorB,
            "favor_notb" => TiePolicy::FavorNotB,
            "conservative" => TiePolicy::Conservative,
            other => return Err(CliError(format!("unknown tie policy {other:?}"))),
        };
        let seed = match parts.get(4) {
            None => false,
            Some(&"seed") => true,
            Some(other) => {
                return Err(CliError(format!("trailing component {other:?} in rule spec")))
            }
        };
        return Ok(RuleSpec::Threshold(UpdateRule::BestResponse { game, tie, seed }));
    }
    Err(CliError(format!("unknown rule spec {spec:?}")))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))
}

fn write_output(out: Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(&path, text)
                .map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    model_path: &Path,
    rule_spec: &str,
    steps: usize,
    orbit: bool,
    cap: Option<usize>,
    format: &str,
    frames: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let document = model_from_json(&read_file(model_path)?)?;
    let rule = parse_rule(rule_spec)?;
    match (document, rule) {
        (ModelDocument::Threshold(model), RuleSpec::Threshold(rule)) => {
            simulate_threshold(&model, &rule, steps, orbit, cap, format, frames, out)
        }
        (ModelDocument::Threshold(model), RuleSpec::ActionFile(action)) => {
            let rule = UpdateRule::ActionModel(action);
            simulate_threshold(&model, &rule, steps, orbit, cap, format, frames, out)
        }
        (ModelDocument::General(model), RuleSpec::Automaton(automaton)) => {
            let states = run_automaton(&model, &automaton, steps)?;
            simulate_general(&model, states, orbit, cap, format, frames, out, |m| {
                Ok(tam_core::belief::automaton_step(m, &automaton)?)
            })
        }
        (ModelDocument::General(model), RuleSpec::ActionFile(action)) => {
            let mut states = vec![model.clone()];
            for i in 0..steps {
                states.push(canonical_product(&states[i], &action)?);
            }
            simulate_general(&model, states, orbit, cap, format, frames, out, |m| {
                Ok(canonical_product(m, &action)?)
            })
        }
        (ModelDocument::General(_), RuleSpec::Threshold(_)) => Err(CliError(
            "this rule needs a threshold model (a document with \"behavior\" and \"theta\")"
                .to_string(),
        )),
        (ModelDocument::Threshold(_), RuleSpec::Automaton(_)) => Err(CliError(
            "automaton rules run on belief models (a document with \"valuation\")".to_string(),
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate_threshold(
    model: &ThresholdModel,
    rule: &UpdateRule,
    steps: usize,
    orbit: bool,
    cap: Option<usize>,
    format: &str,
    frames: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let trace: Trace = tam_core::run(model, rule, steps)?;
    match format {
        "csv" => write_output(out, &trace_to_csv(&trace))?,
        "dot" => match frames {
            Some(dir) => {
                fs::create_dir_all(&dir)
                    .map_err(|e| CliError(format!("cannot create {}: {e}", dir.display())))?;
                for step in 0..trace.len() {
                    let frame = threshold_model_to_dot(&trace.model_at(step));
                    let path = dir.join(format!("frame_{step:03}.dot"));
                    fs::write(&path, frame)
                        .map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))?;
                }
            }
            None => {
                write_output(out, &threshold_model_to_dot(&trace.model_at(trace.len() - 1)))?
            }
        },
        other => return Err(CliError(format!("unknown format {other:?}"))),
    }
    if orbit {
        let cap = cap.unwrap_or_else(|| orbit_cap_for(model.agent_count()));
        let result = detect_orbit(model, rule, cap)?;
        println!("transient={} period={}", result.transient, result.period);
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn simulate_general(
    model: &GeneralModel,
    states: Vec<GeneralModel>,
    orbit: bool,
    cap: Option<usize>,
    format: &str,
    frames: Option<PathBuf>,
    out: Option<PathBuf>,
    step: impl Fn(&GeneralModel) -> Result<GeneralModel, CliError>,
) -> Result<ExitCode, CliError> {
    match format {
        "csv" => write_output(out, &belief_trace_to_csv(&states))?,
        "dot" => match frames {
            Some(dir) => {
                fs::create_dir_all(&dir)
                    .map_err(|e| CliError(format!("cannot create {}: {e}", dir.display())))?;
                for (idx, state) in states.iter().enumerate() {
                    let path = dir.join(format!("frame_{idx:03}.dot"));
                    fs::write(&path, general_model_to_dot(state))
                        .map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))?;
                }
            }
            None => write_output(out, &general_model_to_dot(states.last().expect("nonempty")))?,
        },
        other => return Err(CliError(format!("unknown format {other:?}"))),
    }
    if orbit {
        let cap = cap.unwrap_or_else(|| orbit_cap_for(model.agent_count()).min(1 << 16));
        let mut seen: std::collections::BTreeMap<String, usize> =
            std::collections::BTreeMap::new();
        let mut current = model.clone();
        seen.insert(general_model_to_json(&current), 0);
        let mut found = None;
        for step_idx in 1..=cap {
            current = step(&current)?;
            let key = general_model_to_json(&current);
            if let Some(&first) = seen.get(&key) {
                found = Some((first, step_idx - first));
                break;
            }
            seen.insert(key, step_idx);
        }
        match found {
            Some((transient, period)) => println!("transient={transient} period={period}"),
            None => return Err(CliError(format!("no repetition within {cap} steps"))),
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// equiv
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn cmd_equiv(
    left_spec: &str,
    right_spec: &str,
    model: Option<PathBuf>,
    trials: usize,
    agents: usize,
    steps: usize,
    seed: Option<u64>,
    edge_p: f64,
    behavior_p: f64,
    theta: Option<String>,
) -> Result<ExitCode, CliError> {
    let seed = effective_seed(seed);
    let theta = theta.map(|t| t.parse::<Rat>()).transpose()?;
    let left = parse_rule(left_spec)?;
    let right = parse_rule(right_spec)?;

    // An automaton on either side moves the comparison to belief models.
    if matches!(left, RuleSpec::Automaton(_)) || matches!(right, RuleSpec::Automaton(_)) {
        let left = belief_rule_of_spec(left)?;
        let right = belief_rule_of_spec(right)?;
        return match model {
            Some(path) => {
                let doc = model_from_json(&read_file(&path)?)?;
                let ModelDocument::General(m) = doc else {
                    return Err(CliError(
                        "automaton rules compare on belief models (\"valuation\" documents)"
                            .to_string(),
                    ));
                };
                let code = belief_equiv_on(&m, &left, &right, steps, 0)?;
                if code == ExitCode::SUCCESS {
                    println!("PASS trials=1 steps={steps}");
                }
                Ok(code)
            }
            None => {
                let max_agents = agents.max(2);
                for trial in 0..trials {
                    let trial_seed = seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                    let n = 2 + trial % (max_agents - 1).max(1);
                    let m = tam_core::belief::random_belief_model(trial_seed, n, edge_p)?;
                    let code = belief_equiv_on(&m, &left, &right, steps, trial)?;
                    if code != ExitCode::SUCCESS {
                        return Ok(code);
                    }
                }
                println!("PASS trials={trials} steps={steps}");
                Ok(ExitCode::SUCCESS)
            }
        };
    }

    let as_update_rule = |spec: RuleSpec| -> UpdateRule {
        match spec {
            RuleSpec::Threshold(rule) => rule,
            RuleSpec::ActionFile(action) => UpdateRule::ActionModel(action),
            RuleSpec::Automaton(_) => unreachable!("handled above"),
        }
    };
    let left = as_update_rule(left);
    let right = as_update_rule(right);

    if let Some(path) = model {
        let doc = model_from_json(&read_file(&path)?)?;
        let Some(m) = doc.as_threshold() else {
            return Err(CliError("these rules need a threshold model file".to_string()));
        };
        return single_threshold_equiv(m, &left, &right, steps);
    }
    let config = TrialConfig {
        trials,
        min_agents: 2,
        max_agents: agents.max(2),
        edge_probability: edge_p,
        behavior_probability: behavior_p,
        steps,
        seed,
        theta,
    };
    let report = equivalence_trials(&left, &right, &config)?;
    match report.failure {
        None => {
            println!(
                "PASS trials={} steps={} tie_trials={}",
                report.trials_run, steps, report.tie_trials
            );
            Ok(ExitCode::SUCCESS)
        }
        Some(failure) => {
            println!(
                "FAIL trial={} step={} only_left={:?} only_right={:?}",
                failure.trial,
                failure.divergence.step,
                failure.divergence.only_left,
                failure.divergence.only_right
            );
            println!("  model: {}", failure.model);
            Ok(ExitCode::from(1))
        }
    }
}

enum BeliefRule {
    Automaton(Automaton),
    Action(ActionModel),
}

fn belief_rule_of_spec(spec: RuleSpec) -> Result<BeliefRule, CliError> {
    match spec {
        RuleSpec::Automaton(a) => Ok(BeliefRule::Automaton(a)),
        RuleSpec::ActionFile(a) => Ok(BeliefRule::Action(a)),
        RuleSpec::Threshold(_) => Err(CliError(
            "cannot compare a threshold rule against an automaton rule".to_string(),
        )),
    }
}

impl BeliefRule {
    fn apply(&self, model: &GeneralModel) -> Result<GeneralModel, CliError> {
        match self {
            BeliefRule::Automaton(a) => Ok(tam_core::belief::automaton_step(model, a)?),
            BeliefRule::Action(am) => Ok(canonical_product(model, am)?),
        }
    }
}

fn belief_equiv_on(
    model: &GeneralModel,
    left: &BeliefRule,
    right: &BeliefRule,
    steps: usize,
    trial: usize,
) -> Result<ExitCode, CliError> {
    let mut l = model.clone();
    let mut r = model.clone();
    for step in 1..=steps {
        l = left.apply(&l)?;
        r = right.apply(&r)?;
        if l.valuation() != r.valuation() {
            println!("FAIL trial={trial} step={step}");
            for (atom, ext) in l.valuation() {
                let rext = r.valuation().get(atom).cloned().unwrap_or_default();
                let only_left: Vec<&str> = ext.difference(&rext).map(|&a| model.name(a)).collect();
                let only_right: Vec<&str> = rext.difference(ext).map(|&a| model.name(a)).collect();
                if !only_left.is_empty() || !only_right.is_empty() {
                    println!("  atom {atom}: only_left={only_left:?} only_right={only_right:?}");
                }
            }
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn single_threshold_equiv(
    model: &ThresholdModel,
    left: &UpdateRule,
    right: &UpdateRule,
    steps: usize,
) -> Result<ExitCode, CliError> {
    match tam_core::check_stepwise_equivalence(model, left, right, steps)? {
        tam_core::EquivOutcome::Agree => {
            println!("PASS trials=1 steps={steps}");
            Ok(ExitCode::SUCCESS)
        }
        tam_core::EquivOutcome::Diverged(d) => {
            println!(
                "FAIL trial=0 step={} only_left={:?} only_right={:?}",
                d.step, d.only_left, d.only_right
            );
            Ok(ExitCode::from(1))
        }
    }
}

fn effective_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| {
            std::env::var("THRESHOLD_AM_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(7)
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

const CATALOG_ROW_PRES: [&str; 3] = ["<lt> B", "(=) B", "[gt] ~B"];

fn post_label(post: &tam_core::PostCondition) -> &'static str {
    match post.get(tam_core::Atom::B) {
        Some(true) => "B",
        Some(false) => "~B",
        None => "T",
    }
}

fn cmd_catalog(class: Option<String>, json: bool) -> Result<ExitCode, CliError> {
    let filter = class
        .map(|c| DynamicsClass::parse(&c).ok_or_else(|| CliError(format!("unknown class {c:?}"))))
        .transpose()?;
    let entries: Vec<_> = catalog()
        .into_iter()
        .filter(|e| filter.is_none_or(|f| e.class == f))
        .collect();
    if json {
        let rows: Vec<serde_json::Value> = entries
            .iter()
            .map(|e| {
                let states: Vec<serde_json::Value> = e
                    .model
                    .states()
                    .iter()
                    .zip(CATALOG_ROW_PRES)
                    .map(|(s, pre)| {
                        serde_json::json!({
                            "id": s.id,
                            "pre": pre,
                            "post": post_label(&s.post),
                        })
                    })
                    .collect();
                serde_json::json!({
                    "index": e.index,
                    "class": e.class.as_str(),
                    "states": states,
                })
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&rows).expect("serializable");
        text.push('\n');
        print!("{text}");
    } else {
        for e in &entries {
            let cells: Vec<String> = e
                .model
                .states()
                .iter()
                .zip(CATALOG_ROW_PRES)
                .map(|(s, pre)| format!("{pre} -> {}", post_label(&s.post)))
                .collect();
            println!("{:>2}: {} | class={}", e.index, cells.join(" | "), e.class);
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// translate
// ---------------------------------------------------------------------------

fn cmd_translate(input: &Path, to: &str, out: Option<PathBuf>) -> Result<ExitCode, CliError> {
    let text = read_file(input)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError(format!("invalid JSON: {e}")))?;
    let is_automaton = value.get("transitions").is_some();
    let rendered = match (is_automaton, to) {
        (true, "action-model") => {
            let automaton = automaton_from_json(&text)?;
            let action = tam_core::automaton_to_action_model(&automaton)?;
            action_model_to_json(&canonical_action_model(&action))
        }
        (true, "automaton") => {
            let automaton = automaton_from_json(&text)?;
            automaton_to_json(&canonical_automaton(&automaton))
        }
        (false, "automaton") => {
            let action = action_model_from_json(&text)?;
            let automaton = tam_core::action_model_to_automaton(&action)?;
            automaton_to_json(&canonical_automaton(&automaton))
        }
        (false, "action-model") => {
            let action = action_model_from_json(&text)?;
            action_model_to_json(&canonical_action_model(&action))
        }
        (_, other) => {
            return Err(CliError(format!(
                "unknown target {other:?}; use automaton or action-model"
            )))
        }
    };
    write_output(out, &rendered)?;
    Ok(ExitCode::SUCCESS)
}
