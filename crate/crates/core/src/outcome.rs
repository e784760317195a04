//! Shared result types for exhaustive checks.
//!
//! Every `check_*` entry point in this crate reports a [`CheckOutcome`]: a
//! pass/fail flag, a serialized counterexample when one exists, and counters
//! describing how much work the sweep actually did. The counters double as
//! regression oracles — tests pin them to exact expected values so a silently
//! shrunken search space cannot masquerade as a pass.

use serde::{Deserialize, Serialize};

/// Work counters for an exhaustive sweep. A field is zero when the notion
/// does not apply to the check that produced it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckStats {
    /// Global or extended states visited.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub states: u64,
    /// Steps (state transitions) examined.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub steps: u64,
    /// Complete histories enumerated.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub histories: u64,
    /// Distinct precedence orders considered.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub orders: u64,
    /// System executions considered.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub executions: u64,
}

fn is_zero(n: &u64) -> bool {
    *n == 0
}

impl CheckStats {
    /// Merge counters from a sub-check into this one.
    pub fn absorb(&mut self, other: &CheckStats) {
        self.states += other.states;
        self.steps += other.steps;
        self.histories += other.histories;
        self.orders += other.orders;
        self.executions += other.executions;
    }
}

/// Result of one exhaustive check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    /// Whether the property held everywhere in the swept space.
    pub pass: bool,
    /// First violation found, serialized for replay; `None` on a pass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
    /// How much the sweep covered.
    pub stats: CheckStats,
}

impl CheckOutcome {
    /// A passing outcome with the given counters.
    pub fn pass(stats: CheckStats) -> Self {
        CheckOutcome {
            pass: true,
            counterexample: None,
            stats,
        }
    }

    /// A failing outcome carrying a replayable witness.
    pub fn fail(counterexample: serde_json::Value, stats: CheckStats) -> Self {
        CheckOutcome {
            pass: false,
            counterexample: Some(counterexample),
            stats,
        }
    }
}
