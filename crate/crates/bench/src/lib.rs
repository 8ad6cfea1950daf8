//! Shared fixtures for the criterion benchmarks.

use tam_core::orbit::random_model;
use tam_core::{Rat, ThresholdModel};

/// A reproducible benchmark model: moderately dense, tie-rich threshold.
pub fn fixture_model(agents: usize) -> ThresholdModel {
    random_model(0xBEEF, agents, 0.4, 0.5, Rat::new(1, 3)).expect("fixture generates")
}
