//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! The randomized criteria run on a frozen seeded corpus: 1000 models with
//! 2..=10 agents, edge and behavior probability 1/2, and tie-rich thresholds
//! drawn as p/q with q bounded by the realized maximum degree, so exact ties
//! actually occur.

use std::process::Command;
use std::time::Instant;

use tam_core::action::{catalog, e1, catalog_entry};
use tam_core::belief::{
    action_model_to_automaton, automaton_to_action_model, canonical_action_model,
    canonical_automaton, influence_automaton, first_translation_divergence, random_automaton,
    random_belief_model,
};
use tam_core::dynamics::{Game, TiePolicy};
use tam_core::logic::{
    eval, exhaustive_agreement_depth3, k_validity_exhaustive_depth2, parse,
};
use tam_core::orbit::{detect_orbit, equivalence_trials, orbit_cap_for, trial_model, TrialConfig};
use tam_core::{
    build_model, classify, extension, Atom, DynamicsClass, Formula, PostCondition, Rat,
    UpdateRule,
};

fn corpus_config() -> TrialConfig {
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

#[test]
fn c1_eq1_equals_e1_product() {
    let started = Instant::now();
    let report = equivalence_trials(
        &UpdateRule::Eq1,
        &UpdateRule::ActionModel(e1()),
        &corpus_config(),
    )
    .unwrap();
    let elapsed = started.elapsed();
    assert!(report.passed(), "divergence: {:?}", report.failure);
    assert_eq!(report.trials_run, 1000);
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "1000 trials took {elapsed:?}, budget is ~10 s"
    );
    println!(
        "acceptance c1 PASS: eq1 == am:e1 on 1000 models x 10 steps in {elapsed:?}"
    );
}

#[test]
fn c2_eq2_equals_entry_6_product_with_real_ties() {
    let report = equivalence_trials(
        &UpdateRule::Eq2,
        &UpdateRule::ActionModel(catalog_entry(6).unwrap()),
        &corpus_config(),
    )
    .unwrap();
    assert!(report.passed(), "divergence: {:?}", report.failure);
    assert_eq!(report.trials_run, 1000);
    assert!(
        report.tie_trials >= 50,
        "only {} of 1000 trials had an agent exactly at the tie",
        report.tie_trials
    );
    println!(
        "acceptance c2 PASS: eq2 == am:6 on 1000 models, {} tie-exhibiting trials",
        report.tie_trials
    );
}

#[test]
fn c3_anticoordination_equals_entry_22() {
    for (x, y) in [(1i64, 1i64), (1, 2), (3, 1)] {
        let game = Game::anticoordination(Rat::from_int(x), Rat::from_int(y)).unwrap();
        let left = UpdateRule::BestResponse {
            game,
            tie: TiePolicy::Conservative,
            seed: false,
        };
        let report = equivalence_trials(
            &left,
            &UpdateRule::ActionModel(catalog_entry(22).unwrap()),
            &corpus_config(),
        )
        .unwrap();
        assert!(
            report.passed(),
            "payoffs ({x},{y}): divergence {:?}",
            report.failure
        );
        assert_eq!(report.trials_run, 1000);
    }
    println!("acceptance c3 PASS: br:anti == am:22 for payoffs (1,1), (1,2), (3,1)");
}

#[test]
fn c4_finest_partition_on_every_trial_model() {
    let config = corpus_config();
    let b = Formula::atom(Atom::B);
    let above = Formula::diam_lt(b.clone());
    let at = Formula::eq_theta(b.clone());
    let below = Formula::box_gt(Formula::not(b));
    let mut agents_checked = 0usize;
    for trial in 0..config.trials {
        let model = trial_model(&config, trial, None).unwrap();
        let cells = [
            extension(model.general(), &above).unwrap(),
            extension(model.general(), &at).unwrap(),
            extension(model.general(), &below).unwrap(),
        ];
        for agent in model.agents() {
            let hits = cells.iter().filter(|c| c.contains(&agent)).count();
            assert_eq!(
                hits,
                1,
                "agent {} of trial {trial} sits in {hits} partition cells",
                model.name(agent)
            );
            agents_checked += 1;
        }
    }
    println!("acceptance c4 PASS: strict/tie/strict partition over {agents_checked} agents");
}

#[test]
fn c5_closed_form_checker_agrees_with_subset_oracle() {
    let config = TrialConfig {
        trials: 200,
        min_agents: 2,
        max_agents: 9, // degrees stay <= 8
        seed: 1105,
        ..corpus_config()
    };
    for trial in 0..config.trials {
        let model = trial_model(&config, trial, None).unwrap();
        assert!(model.general().max_degree() <= 8);
        if let Some(disagreement) = exhaustive_agreement_depth3(&model) {
            panic!("trial {trial}: {disagreement:?}");
        }
        assert!(
            k_validity_exhaustive_depth2(&model),
            "K fails on trial {trial}"
        );
    }

    // Stored duality-failure witnesses, one per direction.
    let box_b = parse("[le] B").unwrap();
    let negated_diamond = parse("~<le> ~B").unwrap();
    let witness1 = build_model(&["a", "b"], &[("a", "b")], &["b"], Rat::zero()).unwrap();
    let a = witness1.agent_id("a").unwrap();
    assert!(eval(witness1.general(), a, &box_b).unwrap());
    assert!(!eval(witness1.general(), a, &negated_diamond).unwrap());
    let witness2 = build_model(
        &["a", "b", "c"],
        &[("a", "b"), ("a", "c")],
        &["b"],
        Rat::new(3, 4),
    )
    .unwrap();
    let a = witness2.agent_id("a").unwrap();
    assert!(!eval(witness2.general(), a, &box_b).unwrap());
    assert!(eval(witness2.general(), a, &negated_diamond).unwrap());
    println!(
        "acceptance c5 PASS: all depth<=3 formulas on 200 models, K everywhere, duality witnesses"
    );
}

#[test]
fn c6_inflating_rule_always_reaches_a_fixed_point() {
    let config = corpus_config();
    for trial in 0..config.trials {
        let model = trial_model(&config, trial, None).unwrap();
        let n = model.agent_count();
        let orbit = detect_orbit(&model, &UpdateRule::Eq1, orbit_cap_for(n)).unwrap();
        assert_eq!(orbit.period, 1, "trial {trial}");
        assert!(
            orbit.transient <= n,
            "trial {trial}: transient {} > {n}",
            orbit.transient
        );
    }

    // Five agents, theta = 1/4: fixed point under the inflating rule,
    // 2-cycle under the conservative rule.
    let contrast = build_model(
        &["a", "b", "c", "d", "e"],
        &[
            ("a", "c"),
            ("a", "d"),
            ("a", "e"),
            ("b", "c"),
            ("b", "d"),
            ("b", "e"),
        ],
        &["a", "b"],
        Rat::new(1, 4),
    )
    .unwrap();
    let eq1 = detect_orbit(&contrast, &UpdateRule::Eq1, 64).unwrap();
    let eq2 = detect_orbit(&contrast, &UpdateRule::Eq2, 64).unwrap();
    assert_eq!(eq1.period, 1);
    assert!(eq1.transient <= 5);
    assert_eq!((eq2.transient, eq2.period), (0, 2));
    println!("acceptance c6 PASS: eq1 fixed points everywhere; 5-agent contrast reproduced");
}

#[test]
fn c7_catalog_columns_classes_and_the_e1_collapse() {
    let posts = |i: u32| -> Vec<PostCondition> {
        catalog_entry(i).unwrap().states().iter().map(|s| s.post.clone()).collect()
    };
    assert_eq!(
        posts(2),
        vec![PostCondition::adopt_b(), PostCondition::adopt_b(), PostCondition::keep()]
    );
    assert_eq!(
        posts(6),
        vec![PostCondition::adopt_b(), PostCondition::keep(), PostCondition::drop_b()]
    );
    assert_eq!(
        posts(22),
        vec![PostCondition::drop_b(), PostCondition::keep(), PostCondition::adopt_b()]
    );

    let report = equivalence_trials(
        &UpdateRule::ActionModel(e1()),
        &UpdateRule::ActionModel(catalog_entry(2).unwrap()),
        &corpus_config(),
    )
    .unwrap();
    assert!(report.passed(), "e1 vs entry 2: {:?}", report.failure);

    let classes: Vec<(u32, DynamicsClass)> =
        (1..=27).map(|i| (i, classify(i).unwrap())).collect();
    let of = |class: DynamicsClass| -> Vec<u32> {
        classes.iter().filter(|(_, c)| *c == class).map(|(i, _)| *i).collect()
    };
    assert_eq!(of(DynamicsClass::Trivial), vec![1, 14, 27]);
    assert_eq!(of(DynamicsClass::Nonsensical), vec![4, 7, 8, 16, 17, 24]);
    assert_eq!(of(DynamicsClass::CoordinationBr), vec![3, 6, 9]);
    assert_eq!(of(DynamicsClass::SeededCoordination), vec![2, 5, 15, 18]);
    assert_eq!(of(DynamicsClass::AnticoordinationBr), vec![19, 22, 25]);
    assert_eq!(of(DynamicsClass::SeededAnticoordination), vec![10, 13, 23, 26]);
    assert_eq!(of(DynamicsClass::Unclassified), vec![11, 12, 20, 21]);
    assert_eq!(catalog().len(), 27);
    println!("acceptance c7 PASS: columns 2/6/22 exact, e1 == entry 2, classes as catalogued");
}

#[test]
fn c8_automaton_equals_its_translation_and_round_trips_are_exact() {
    for seed in 0..500u64 {
        let n = 2 + (seed as usize % 9);
        let model = random_belief_model(seed.wrapping_mul(0x9E37_79B9), n, 0.5).unwrap();
        assert_eq!(
            first_translation_divergence(&model, &influence_automaton(), 10).unwrap(),
            None,
            "belief model seed {seed}"
        );
    }

    let original = canonical_automaton(&influence_automaton());
    let back = canonical_automaton(
        &action_model_to_automaton(&automaton_to_action_model(&influence_automaton()).unwrap()).unwrap(),
    );
    assert_eq!(original, back, "the transcribed automaton must round-trip");

    for seed in 0..100u64 {
        let action = automaton_to_action_model(&random_automaton(seed, 10)).unwrap();
        let rebuilt =
            automaton_to_action_model(&action_model_to_automaton(&action).unwrap()).unwrap();
        assert_eq!(
            canonical_action_model(&action),
            canonical_action_model(&rebuilt),
            "action model seed {seed}"
        );
    }
    println!(
        "acceptance c8 PASS: automaton == product on 500 models x 10 steps; round-trips exact"
    );
}

#[test]
fn c9_reruns_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_threshold-am");
    let tmp = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance_determinism");
    let _ = std::fs::remove_dir_all(&tmp);
    std::fs::create_dir_all(&tmp).unwrap();
    let model = tmp.join("two.json");
    std::fs::write(
        &model,
        r#"{"agents": ["a","b"], "edges": [["a","b"]], "behavior": ["a"], "theta": "3/5"}"#,
    )
    .unwrap();
    let automaton_path = tmp.join("influence_automaton.json");
    std::fs::write(&automaton_path, include_str!("../../core/src/data/influence_automaton.json")).unwrap();

    let model_arg = model.to_str().unwrap();
    let automaton_arg = automaton_path.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["simulate", "--model", model_arg, "--rule", "eq2", "--steps", "6", "--orbit"],
        vec!["simulate", "--model", model_arg, "--rule", "br:coord:1:1:conservative"],
        vec!["simulate", "--model", model_arg, "--rule", "eq1", "--format", "dot"],
        vec!["equiv", "--left", "eq1", "--right", "am:e1", "--trials", "120", "--seed", "99"],
        vec![
            "equiv", "--left", "br:anti:1:2:conservative", "--right", "am:22", "--trials",
            "120", "--seed", "99",
        ],
        vec!["catalog"],
        vec!["catalog", "--json"],
        vec!["translate", "--in", automaton_arg, "--to", "action-model"],
    ];
    for args in &commands {
        let first = Command::new(bin).args(args).output().unwrap();
        let second = Command::new(bin).args(args).output().unwrap();
        assert!(first.status.success(), "command {args:?} failed");
        assert_eq!(first.status.code(), second.status.code());
        assert_eq!(
            first.stdout, second.stdout,
            "stdout of {args:?} differs between reruns"
        );
    }
    println!("acceptance c9 PASS: {} commands byte-identical across reruns", commands.len());
}
