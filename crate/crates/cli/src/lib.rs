//! Configuration, dispatch, and verdict types behind the `kishon-cli`
//! binary.
//!
//! Every check the workspace provides is reachable through one entry
//! point, [`run`], driven by a [`RunConfig`]. Configuration may come from
//! command-line flags, a JSON file, or both — flags win. The result is a
//! single [`Verdict`] JSON document with a machine-readable pass/fail
//! outcome, an optional counterexample, and work counts.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use kishon_core::bridge::check_seriality_theorem;
use kishon_core::executions::{
    check_lemmas, check_theorem33, RegisterSemantics,
};
use kishon_core::fol::{data_universe, russell_wiener_sentence, FiniteStructure};
use kishon_core::global_sem::{
    check_inductive_invariant, check_theorem1, check_theorem2, phi_invariant, Machine,
};
use kishon_core::nonrestricted::check_local_invariant;
use kishon_core::orders::{enumerate_two_chain_orders, realize_intervals, Precedence};
use kishon_core::outcome::{CheckOutcome, CheckStats};
use kishon_core::protocol::kishon_protocol;

use kishon_core::executions::two_chain_event;

/// Which verification to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckName {
    /// The global-state invariant is inductive.
    Invariant,
    /// Every interleaving yields correctly ordered verdicts.
    Theorem1,
    /// Invariant, final-state lemma, and interleaving sweep combined.
    Theorem2,
    /// The event-based trichotomy under a register semantics.
    Theorem33,
    /// The supporting lemmas of the event-based proof.
    Lemmas,
    /// The single-process local invariant and complete-run shape.
    Nonrestricted,
    /// Every history's image is a serial (hence regular) execution.
    Bridge,
    /// The two-chain interval order enumeration is sound.
    Orders,
    /// Everything above, under each check's expected polarity.
    All,
}

impl CheckName {
    pub const ALL: [CheckName; 9] = [
        CheckName::Invariant,
        CheckName::Theorem1,
        CheckName::Theorem2,
        CheckName::Theorem33,
        CheckName::Lemmas,
        CheckName::Nonrestricted,
        CheckName::Bridge,
        CheckName::Orders,
        CheckName::All,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Invariant => "invariant",
            CheckName::Theorem1 => "theorem1",
            CheckName::Theorem2 => "theorem2",
            CheckName::Theorem33 => "theorem33",
            CheckName::Lemmas => "lemmas",
            CheckName::Nonrestricted => "nonrestricted",
            CheckName::Bridge => "bridge",
            CheckName::Orders => "orders",
            CheckName::All => "all",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
                format!("unknown check `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

/// A bad flag combination or configuration value. The binary reports these
/// on stderr and exits with status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// One partial configuration layer: everything optional. Layers stack via
/// [`resolve_config`]; the JSON config file deserializes into this shape.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub check: Option<String>,
    pub bound: Option<i64>,
    pub registers: Option<String>,
    pub process: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub quiet: Option<bool>,
}

impl ConfigLayer {
    /// `self` on top of `under`: present fields of `self` win.
    pub fn over(self, under: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            check: self.check.or(under.check),
            bound: self.bound.or(under.bound),
            registers: self.registers.or(under.registers),
            process: self.process.or(under.process),
            output_path: self.output_path.or(under.output_path),
            quiet: self.quiet.or(under.quiet),
        }
    }
}

/// A fully resolved run request.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub check: CheckName,
    pub bound: i64,
    pub registers: RegisterSemantics,
    pub process: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub quiet: bool,
}

/// Validate a stacked configuration layer into a run request. Defaults:
/// bound 2, regular registers, both processes.
pub fn resolve_config(layer: ConfigLayer) -> Result<RunConfig, UsageError> {
    let check = layer
        .check
        .ok_or_else(|| UsageError("no check selected: pass --check or a subcommand".into()))?;
    let check = CheckName::from_str(&check).map_err(UsageError)?;
    let bound = layer.bound.unwrap_or(2);
    if bound < 1 {
        return Err(UsageError(format!("bound must be at least 1, got {bound}")));
    }
    let registers = match layer.registers {
        Some(s) => RegisterSemantics::from_str(&s).map_err(UsageError)?,
        None => RegisterSemantics::Regular,
    };
    if let Some(p) = layer.process {
        if p > 1 {
            return Err(UsageError(format!("process must be 0 or 1, got {p}")));
        }
    }
    Ok(RunConfig {
        check,
        bound,
        registers,
        process: layer.process,
        output_path: layer.output_path,
        quiet: layer.quiet.unwrap_or(false),
    })
}

/// Echo of the parameters a verdict was computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub bound: i64,
    pub registers: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunResult {
    Pass,
    Fail,
    Error,
}

/// Work counts plus wall-clock time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct VerdictStats {
    #[serde(flatten)]
    pub counts: CheckStats,
    pub elapsed_ms: u64,
}

/// The one JSON document a run emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub params: ParamsEcho,
    pub result: RunResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    pub stats: VerdictStats,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self.result {
            RunResult::Pass => 0,
            RunResult::Fail => 1,
            RunResult::Error => 2,
        }
    }
}

/// Sanity sweep over the two-chain interval orders: each enumerated order
/// satisfies the interval property by both the native check and the
/// first-order sentence, realizes as actual intervals that induce it back,
/// and has a write visible to the opposite read.
fn orders_outcome() -> Result<CheckOutcome, String> {
    let enumeration = enumerate_two_chain_orders(4);
    let sentence = russell_wiener_sentence();
    let mut stats = CheckStats {
        orders: enumeration.orders.len() as u64,
        ..CheckStats::default()
    };
    stats.steps = enumeration.interleavings;
    for (index, order) in enumeration.orders.iter().enumerate() {
        let fail = |reason: &str| {
            Ok(CheckOutcome::fail(
                json!({
                    "reason": reason,
                    "order_index": index,
                    "pairs": order.pairs().iter().collect::<Vec<_>>(),
                }),
                stats.clone(),
            ))
        };
        if !order.is_russell_wiener() {
            return fail("order is not an interval order");
        }
        if !order_sentence_eval(order, &sentence)? {
            return fail("first-order route disagrees with the native interval check");
        }
        let realization = realize_intervals(order).map_err(|e| e.to_string())?;
        if realization.induced_order() != *order {
            return fail("interval realization does not induce the order back");
        }
        if !kishon_core::executions::check_concurrency_lemma(order) {
            return fail("neither write precedes the opposite read");
        }
    }
    Ok(CheckOutcome::pass(stats))
}

/// Evaluate an order-level sentence by wrapping the order as an event
/// structure.
fn order_sentence_eval(
    order: &Precedence,
    sentence: &kishon_core::fol::Formula,
) -> Result<bool, String> {
    let mut s = FiniteStructure::empty(data_universe(0));
    s.events = (0..order.len()).map(two_chain_event).collect();
    for &(a, b) in order.pairs() {
        s.precedence.insert((two_chain_event(a), two_chain_event(b)));
    }
    s.eval_sentence(sentence).map_err(|e| e.to_string())
}

fn machine(bound: i64) -> Result<Machine, String> {
    Machine::new(kishon_protocol(), bound).map_err(|e| e.to_string())
}

fn single_outcome(config: &RunConfig) -> Result<CheckOutcome, String> {
    let protocol = kishon_protocol();
    match config.check {
        CheckName::Invariant => {
            let m = machine(config.bound)?;
            check_inductive_invariant(&m, &phi_invariant(&m)).map_err(|e| e.to_string())
        }
        CheckName::Theorem1 => {
            let m = machine(config.bound)?;
            check_theorem1(&m).map_err(|e| e.to_string())
        }
        CheckName::Theorem2 => {
            let m = machine(config.bound)?;
            check_theorem2(&m).map_err(|e| e.to_string())
        }
        CheckName::Theorem33 => {
            check_theorem33(&protocol, config.bound, config.registers).map_err(|e| e.to_string())
        }
        CheckName::Lemmas => check_lemmas(&protocol, config.bound).map_err(|e| e.to_string()),
        CheckName::Nonrestricted => {
            let processes: Vec<usize> = match config.process {
                Some(p) => vec![p],
                None => (0..protocol.processes.len()).collect(),
            };
            let mut stats = CheckStats::default();
            for p in processes {
                let outcome =
                    check_local_invariant(&protocol, p, config.bound).map_err(|e| e.to_string())?;
                stats.absorb(&outcome.stats);
                if !outcome.pass {
                    return Ok(CheckOutcome::fail(
                        json!({ "process": p, "violation": outcome.counterexample }),
                        stats,
                    ));
                }
            }
            Ok(CheckOutcome::pass(stats))
        }
        CheckName::Bridge => {
            let m = machine(config.bound)?;
            check_seriality_theorem(&m).map_err(|e| e.to_string())
        }
        CheckName::Orders => orders_outcome(),
        CheckName::All => unreachable!("the aggregate check is dispatched separately"),
    }
}

/// The sub-checks the aggregate runs, with the registers each uses and
/// whether it is expected to pass or to find a counterexample.
pub fn aggregate_plan(bound: i64) -> Vec<(CheckName, RegisterSemantics, bool)> {
    let safe_expected_pass = bound < 2;
    vec![
        (CheckName::Invariant, RegisterSemantics::Regular, true),
        (CheckName::Theorem1, RegisterSemantics::Regular, true),
        (CheckName::Theorem2, RegisterSemantics::Regular, true),
        (CheckName::Theorem33, RegisterSemantics::Serial, true),
        (CheckName::Theorem33, RegisterSemantics::Regular, true),
        (CheckName::Theorem33, RegisterSemantics::Safe, safe_expected_pass),
        (CheckName::Lemmas, RegisterSemantics::Regular, true),
        (CheckName::Nonrestricted, RegisterSemantics::Regular, true),
        (CheckName::Bridge, RegisterSemantics::Regular, true),
        (CheckName::Orders, RegisterSemantics::Regular, true),
    ]
}

fn aggregate_outcome(config: &RunConfig) -> Result<CheckOutcome, String> {
    let mut stats = CheckStats::default();
    let mut mismatches = Vec::new();
    for (check, registers, expected_pass) in aggregate_plan(config.bound) {
        let sub = RunConfig {
            check,
            registers,
            ..config.clone()
        };
        let outcome = single_outcome(&sub)?;
        stats.absorb(&outcome.stats);
        if outcome.pass != expected_pass {
            mismatches.push(json!({
                "check": check.as_str(),
                "registers": registers.to_string(),
                "expected": if expected_pass { "pass" } else { "fail" },
                "actual": if outcome.pass { "pass" } else { "fail" },
                "counterexample": outcome.counterexample,
            }));
        }
    }
    if mismatches.is_empty() {
        Ok(CheckOutcome::pass(stats))
    } else {
        Ok(CheckOutcome::fail(json!({ "mismatches": mismatches }), stats))
    }
}

/// Run the configured check and wrap the outcome as a verdict. Core
/// failures surface as counterexamples; unexpected internal errors surface
/// as `result: "error"`.
pub fn run(config: &RunConfig) -> Verdict {
    let started = Instant::now();
    let outcome = match config.check {
        CheckName::All => aggregate_outcome(config),
        _ => single_outcome(config),
    };
    let elapsed_ms = started.elapsed().as_millis() as u64;
    let (result, counterexample, counts) = match outcome {
        Ok(o) => (
            if o.pass { RunResult::Pass } else { RunResult::Fail },
            o.counterexample,
            o.stats,
        ),
        Err(message) => (
            RunResult::Error,
            Some(json!({ "message": message })),
            CheckStats::default(),
        ),
    };
    Verdict {
        check: config.check.to_string(),
        params: ParamsEcho {
            bound: config.bound,
            registers: config.registers.to_string(),
            process: config.process,
        },
        result,
        counterexample,
        stats: VerdictStats {
            counts,
            elapsed_ms,
        },
    }
}

/// JSON for one enumerated order, used by the order-listing command.
pub fn order_json(index: usize, order: &Precedence) -> Value {
    json!({
        "index": index,
        "events": order.len(),
        "pairs": order.pairs().iter().collect::<Vec<_>>(),
    })
}

/// The distinct two-chain orders, for listing.
pub fn listed_orders() -> Vec<Precedence> {
    enumerate_two_chain_orders(4).orders
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn layer(check: &str, bound: i64) -> ConfigLayer {
        ConfigLayer {
            check: Some(check.into()),
            bound: Some(bound),
            ..ConfigLayer::default()
        }
    }

    #[test]
    fn config_layers_stack_with_flags_on_top() {
        let file = ConfigLayer {
            check: Some("theorem1".into()),
            bound: Some(3),
            registers: Some("serial".into()),
            ..ConfigLayer::default()
        };
        let flags = ConfigLayer {
            bound: Some(1),
            ..ConfigLayer::default()
        };
        let resolved = resolve_config(flags.over(file)).unwrap();
        assert_eq!(resolved.check, CheckName::Theorem1);
        assert_eq!(resolved.bound, 1);
        assert_eq!(resolved.registers, RegisterSemantics::Serial);
        assert!(!resolved.quiet);
    }

    #[test]
    fn bad_values_are_usage_errors() {
        assert!(resolve_config(ConfigLayer::default()).is_err());
        assert!(resolve_config(layer("nonsense", 2)).is_err());
        assert!(resolve_config(layer("theorem1", 0)).is_err());
        let mut bad_process = layer("nonrestricted", 2);
        bad_process.process = Some(7);
        assert!(resolve_config(bad_process).is_err());
    }

    #[test]
    fn check_names_round_trip() {
        for check in CheckName::ALL {
            assert_eq!(CheckName::from_str(check.as_str()), Ok(check));
        }
    }

    #[test]
    fn verdict_round_trips_through_json() {
        let verdict = Verdict {
            check: "theorem33".into(),
            params: ParamsEcho {
                bound: 2,
                registers: "safe".into(),
                process: None,
            },
            result: RunResult::Fail,
            counterexample: Some(json!({ "reason": "witness" })),
            stats: VerdictStats {
                counts: CheckStats {
                    executions: 42,
                    ..CheckStats::default()
                },
                elapsed_ms: 7,
            },
        };
        let text = serde_json::to_string_pretty(&verdict).unwrap();
        let parsed: Verdict = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, verdict);
    }

    #[test]
    fn identical_configs_agree_apart_from_timing() {
        let config = resolve_config(layer("theorem1", 2)).unwrap();
        let a = run(&config);
        let b = run(&config);
        assert_eq!(a.result, b.result);
        assert_eq!(a.counterexample, b.counterexample);
        assert_eq!(a.stats.counts, b.stats.counts);
    }

    #[test]
    fn orders_check_passes() {
        let config = resolve_config(layer("orders", 1)).unwrap();
        let verdict = run(&config);
        assert_eq!(verdict.result, RunResult::Pass);
        assert_eq!(verdict.stats.counts.orders, 1107);
        assert_eq!(verdict.stats.counts.steps, 12870);
    }

    #[test]
    fn aggregate_passes_at_bound_two_because_safe_fails() {
        let config = resolve_config(layer("all", 2)).unwrap();
        let verdict = run(&config);
        assert_eq!(verdict.result, RunResult::Pass, "{:?}", verdict.counterexample);
        // At bound 1 safe registers cannot misbehave, and the aggregate
        // expects that, too.
        let config = resolve_config(layer("all", 1)).unwrap();
        let verdict = run(&config);
        assert_eq!(verdict.result, RunResult::Pass, "{:?}", verdict.counterexample);
    }

    #[test]
    fn every_single_check_passes_at_bound_one() {
        let passing: BTreeSet<&str> = [
            "invariant",
            "theorem1",
            "theorem2",
            "lemmas",
            "nonrestricted",
            "bridge",
            "orders",
        ]
        .into();
        for name in passing {
            let config = resolve_config(layer(name, 1)).unwrap();
            let verdict = run(&config);
            assert_eq!(verdict.result, RunResult::Pass, "{name}");
        }
    }

    #[test]
    fn safe_check_fails_with_a_counterexample_at_bound_two() {
        let mut l = layer("theorem33", 2);
        l.registers = Some("safe".into());
        let config = resolve_config(l).unwrap();
        let verdict = run(&config);
        assert_eq!(verdict.result, RunResult::Fail);
        assert_eq!(verdict.exit_code(), 1);
        let cx = verdict.counterexample.expect("failure carries a witness");
        assert!(cx.get("execution").is_some());
    }
}
