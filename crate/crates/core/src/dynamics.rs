//! Set-theoretic one-step update rules and best-response game stepping.
//!
//! These are the ground-truth dynamics the action-model engine is checked
//! against. All agents update simultaneously from the same input snapshot;
//! every function is pure.

use thiserror::Error;

use crate::model::{neighbor_fraction, AgentSet, ThresholdModel};
use crate::rational::Rat;

/// Pairwise game played against every neighbor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub kind: GameKind,
    x: Rat,
    y: Rat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    /// Coordinating on `B` pays `x`, coordinating on not-`B` pays `y`,
    /// miscoordination pays nothing.
    Coordination,
    /// Miscoordination pays (`y` to the `B`-player, `x` to the other);
    /// coordination pays nothing.
    Anticoordination,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("game payoffs must be positive, got x = {x}, y = {y}")]
pub struct NonPositivePayoff {
    pub x: Rat,
    pub y: Rat,
}

#[allow(clippy::result_large_err)]
impl Game {
    pub fn new(kind: GameKind, x: Rat, y: Rat) -> Result<Self, NonPositivePayoff> {
        if !x.is_positive() || !y.is_positive() {
            return Err(NonPositivePayoff { x, y });
        }
        Ok(Game { kind, x, y })
    }

    pub fn coordination(x: Rat, y: Rat) -> Result<Self, NonPositivePayoff> {
        Game::new(GameKind::Coordination, x, y)
    }

    pub fn anticoordination(x: Rat, y: Rat) -> Result<Self, NonPositivePayoff> {
        Game::new(GameKind::Anticoordination, x, y)
    }

    pub fn x(&self) -> &Rat {
        &self.x
    }

    pub fn y(&self) -> &Rat {
        &self.y
    }

    /// The threshold at which both strategies earn the same; agents compare
    /// their relevant neighbor fraction against the model threshold, so the
    /// tie cell `fraction = theta` is exactly the indifference point.
    ///
    /// For a best-response pairing against a catalog action model the model
    /// itself must carry `y/(x+y)` -- for coordination that equals this
    /// game threshold, for anti-coordination it is `1 -` this value.
    pub fn model_theta(&self) -> Rat {
        &self.y / &(&self.x + &self.y)
    }
}

/// What both strategies being best responses resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    /// Play `B` on a tie.
    FavorB,
    /// Play not-`B` on a tie.
    FavorNotB,
    /// Keep the current behavior on a tie.
    Conservative,
}

/// Best-response indifference threshold: `y/(x+y)` for coordination games,
/// `x/(x+y)` for anti-coordination games (measured against the fraction of
/// not-`B` neighbors in the latter case).
pub fn game_threshold(game: &Game) -> Rat {
    let total = &game.x + &game.y;
    match game.kind {
        GameKind::Coordination => &game.y / &total,
        GameKind::Anticoordination => &game.x / &total,
    }
}

/// The inflating rule: everyone whose `B`-neighbor fraction meets the
/// threshold adopts, and nobody ever drops `B`.
pub fn step_eq1(model: &ThresholdModel) -> ThresholdModel {
    let theta = model.theta();
    let behavior = model.behavior();
    let mut next: AgentSet = behavior.clone();
    for agent in model.agents() {
        let frac = neighbor_fraction(model.general(), agent, behavior)
            .expect("validated model has positive degrees");
        if &frac >= theta {
            next.insert(agent);
        }
    }
    model.with_behavior(next)
}

/// The non-inflating rule with conservative tie-breaking: strictly above the
/// threshold adopt, strictly below drop, exactly at the threshold keep the
/// current behavior.
pub fn step_eq2(model: &ThresholdModel) -> ThresholdModel {
    let theta = model.theta();
    let behavior = model.behavior();
    let mut next = AgentSet::new();
    for agent in model.agents() {
        let frac = neighbor_fraction(model.general(), agent, behavior)
            .expect("validated model has positive degrees");
        if &frac > theta || (&frac == theta && behavior.contains(&agent)) {
            next.insert(agent);
        }
    }
    model.with_behavior(next)
}

/// One round of simultaneous best responses. The model's own threshold is
/// ignored; the game determines the indifference point. `seed` additionally
/// retains all current `B`-players regardless of their best response.
///
/// For coordination games an agent adopts `B` iff its `B`-neighbor fraction
/// exceeds `y/(x+y)`; for anti-coordination games iff its not-`B`-neighbor
/// fraction exceeds `x/(x+y)`. Exact ties go to the tie policy.
pub fn best_response_step(
    model: &ThresholdModel,
    game: &Game,
    tie: TiePolicy,
    seed: bool,
) -> ThresholdModel {
    let threshold = game_threshold(game);
    let behavior = model.behavior();
    let all = model.general().all_agents();
    let complement: AgentSet = all.difference(behavior).copied().collect();
    let relevant = match game.kind {
        GameKind::Coordination => behavior,
        GameKind::Anticoordination => &complement,
    };
    let mut next = AgentSet::new();
    for agent in model.agents() {
        let frac = neighbor_fraction(model.general(), agent, relevant)
            .expect("validated model has positive degrees");
        let plays_b = if frac > threshold {
            true
        } else if frac == threshold {
            match tie {
                TiePolicy::FavorB => true,
                TiePolicy::FavorNotB => false,
                TiePolicy::Conservative => behavior.contains(&agent),
            }
        } else {
            false
        };
        if plays_b || (seed && behavior.contains(&agent)) {
            next.insert(agent);
        }
    }
    model.with_behavior(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;

    fn two_clique(behavior: &[&str], theta: Rat) -> ThresholdModel {
        build_model(&["a", "b"], &[("a", "b")], behavior, theta).unwrap()
    }

    fn names(m: &ThresholdModel) -> Vec<String> {
        m.behavior_names()
    }

    #[test]
    fn eq1_spreads_on_the_two_clique() {
        // frac_b = 1 >= 1/2 so b adopts; a is kept by inflation.
        let m = two_clique(&["a"], Rat::new(1, 2));
        assert_eq!(names(&step_eq1(&m)), vec!["a", "b"]);
    }

    #[test]
    fn eq1_saturation_is_a_fixed_point() {
        let m = two_clique(&["a", "b"], Rat::new(1, 2));
        assert_eq!(names(&step_eq1(&m)), vec!["a", "b"]);
    }

    #[test]
    fn eq1_theta_zero_adopts_everyone_in_one_step() {
        let m = build_model(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "c")],
            &[],
            Rat::zero(),
        )
        .unwrap();
        assert_eq!(names(&step_eq1(&m)), vec!["a", "b", "c"]);
    }

    #[test]
    fn eq2_loops_on_the_two_clique() {
        // theta = 3/5: a's fraction is 0 (drop), b's is 1 (adopt), so the
        // behavior set alternates between {a} and {b}.
        let m = two_clique(&["a"], Rat::new(3, 5));
        let one = step_eq2(&m);
        assert_eq!(names(&one), vec!["b"]);
        let two = step_eq2(&one);
        assert_eq!(names(&two), vec!["a"]);
    }

    #[test]
    fn eq2_conservative_tie_keeps_current_behavior() {
        // Square a-b-d-c-a with B = {a, b}, theta = 1/2: every agent sits
        // exactly at the tie, so everyone keeps the current behavior. In
        // particular N(a) = {b, c} with fraction 1/2 and a stays in, while c
        // at the same fraction stays out.
        let m = build_model(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
            &["a", "b"],
            Rat::new(1, 2),
        )
        .unwrap();
        let next = step_eq2(&m);
        assert_eq!(next.behavior(), m.behavior());
        let a = m.agent_id("a").unwrap();
        let c = m.agent_id("c").unwrap();
        assert!(next.behavior().contains(&a));
        assert!(!next.behavior().contains(&c));
    }

    #[test]
    fn eq2_empty_behavior_stays_empty() {
        let m = two_clique(&[], Rat::new(1, 2));
        assert!(step_eq2(&m).behavior().is_empty());
    }

    #[test]
    fn game_threshold_values() {
        let sym = Game::coordination(Rat::one(), Rat::one()).unwrap();
        assert_eq!(game_threshold(&sym), Rat::new(1, 2));
        let coord = Game::coordination(Rat::from_int(3), Rat::one()).unwrap();
        assert_eq!(game_threshold(&coord), Rat::new(1, 4));
        let anti = Game::anticoordination(Rat::one(), Rat::from_int(2)).unwrap();
        assert_eq!(game_threshold(&anti), Rat::new(1, 3));
    }

    #[test]
    fn non_positive_payoffs_rejected() {
        assert!(Game::coordination(Rat::zero(), Rat::one()).is_err());
        assert!(Game::anticoordination(Rat::one(), Rat::new(-1, 2)).is_err());
    }

    #[test]
    fn conservative_best_response_matches_eq2() {
        // On a model whose theta equals the game threshold the two coincide.
        let game = Game::coordination(Rat::from_int(2), Rat::from_int(3)).unwrap();
        let theta = game_threshold(&game);
        let m = build_model(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("a", "c"), ("b", "c"), ("c", "d"), ("d", "e"), ("b", "e")],
            &["a", "d"],
            theta,
        )
        .unwrap();
        let br = best_response_step(&m, &game, TiePolicy::Conservative, false);
        let eq2 = step_eq2(&m);
        assert_eq!(br.behavior(), eq2.behavior());
    }

    #[test]
    fn seeded_favor_b_best_response_matches_eq1() {
        let game = Game::coordination(Rat::from_int(3), Rat::from_int(1)).unwrap();
        let theta = game_threshold(&game);
        let m = build_model(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
            &["b"],
            theta,
        )
        .unwrap();
        let br = best_response_step(&m, &game, TiePolicy::FavorB, true);
        let eq1 = step_eq1(&m);
        assert_eq!(br.behavior(), eq1.behavior());
    }

    #[test]
    fn anticoordination_two_clique_oscillates() {
        // Both start in B: each sees zero not-B neighbors, so not-B is the
        // unique best response and both leave; next step both re-enter.
        let game = Game::anticoordination(Rat::one(), Rat::one()).unwrap();
        let m = two_clique(&["a", "b"], Rat::new(1, 2));
        let step1 = best_response_step(&m, &game, TiePolicy::Conservative, false);
        assert!(step1.behavior().is_empty());
        let step2 = best_response_step(&step1, &game, TiePolicy::Conservative, false);
        assert_eq!(names(&step2), vec!["a", "b"]);
    }
}
