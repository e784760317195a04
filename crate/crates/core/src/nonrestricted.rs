//! Single-process event semantics: extended local states, local steps, and
//! the local shape invariant.
//!
//! Here a process is studied *in isolation*: registers exist only as names
//! inside event predicates, and a read may return anything its type allows,
//! because no assumption at all is made about the communication devices.
//! A local state is an [`ExtendedState`]: a finite structure recording every
//! event the process has issued so far (its own history), the interpreted
//! local constants, and the program counter. Each step appends exactly one
//! new event after all existing ones, so successor states are end-extensions
//! of their predecessors.
//!
//! The payoff of this semantics is [`execution_shape_holds`]: every complete
//! run of a player, whatever values its reads returned, is a four-event
//! chain — assignment, the unique write publishing the same value, the
//! unique read of the opponent's register, and a return valued by the
//! decision rule. That shape is exactly what the event-based correctness
//! proof consumes, and it is established here by the inductive invariant
//! [`local_invariant_clause`] checked over the whole bounded step tree.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use thiserror::Error;

use crate::fol::{
    self, and, cmp, data_universe, event_eq, exists, forall, implies, less, lit, not, or, pred,
    val, CmpOp, EvalError, FiniteStructure, Formula, Signature,
};
use crate::outcome::{CheckOutcome, CheckStats};
use crate::protocol::{eval_expression_with, Instruction, Protocol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalSemError {
    #[error("process index {0} is out of range")]
    NoSuchProcess(usize),
    #[error("bound must be at least 1, got {0}")]
    BadBound(i64),
    #[error("local structure is missing constant `{0}`")]
    MissingConstant(String),
    #[error("formula evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

/// Name of the unary predicate holding all of process `i`'s events.
pub fn process_predicate_name(process: usize) -> String {
    format!("p_{process}")
}

/// Name of the event predicate for the instruction a process executes at
/// the given 1-based line.
pub fn event_predicate_name(protocol: &Protocol, process: usize, line: usize) -> String {
    match &protocol.processes[process].body[line - 1] {
        Instruction::Pick { target } => format!("Assignment-to-{target}"),
        Instruction::Write { register, .. } => format!("Write-on-{register}"),
        Instruction::Read { register, .. } => format!("Read-of-{register}"),
        Instruction::Compute { .. } => format!("Return_{process}"),
    }
}

/// The single-process event language: the process predicate, one predicate
/// per instruction, and the process's locals as data constants.
pub fn local_signature(protocol: &Protocol, process: usize) -> Signature {
    let mut predicates = BTreeSet::new();
    predicates.insert(process_predicate_name(process));
    for line in 1..=protocol.processes[process].body.len() {
        predicates.insert(event_predicate_name(protocol, process, line));
    }
    let constants = protocol.processes[process]
        .locals
        .iter()
        .map(|l| l.name.clone())
        .collect();
    Signature {
        predicates,
        constants,
    }
}

/// A local state that carries its own history: the events issued so far
/// (a chain under precedence), the interpreted local constants, and the
/// program counter.
///
/// The program counter lives outside the structure because its values are
/// program labels, not data — they need not fit in the data universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedState {
    pub process: usize,
    pub pc: i64,
    pub structure: FiniteStructure,
}

impl ExtendedState {
    /// The state before any step: no events, program counter 1, every local
    /// constant 0.
    pub fn initial(protocol: &Protocol, process: usize, bound: i64) -> Result<Self, LocalSemError> {
        if process >= protocol.processes.len() {
            return Err(LocalSemError::NoSuchProcess(process));
        }
        if bound < 1 {
            return Err(LocalSemError::BadBound(bound));
        }
        let mut structure = FiniteStructure::empty(data_universe(bound));
        for name in local_signature(protocol, process).predicates {
            structure.predicates.insert(name, BTreeSet::new());
        }
        for l in &protocol.processes[process].locals {
            structure.constants.insert(l.name.clone(), 0);
        }
        Ok(ExtendedState {
            process,
            pc: 1,
            structure,
        })
    }

    pub fn constant(&self, name: &str) -> Result<i64, LocalSemError> {
        self.structure
            .constants
            .get(name)
            .copied()
            .ok_or_else(|| LocalSemError::MissingConstant(name.to_string()))
    }

    /// Append one event after all existing ones, typed by the given
    /// predicates and carrying the given value.
    fn append_event(&mut self, index: u8, type_pred: &str, value: i64) {
        let e = fol::EventId::new(self.process as u8, index);
        for &old in &self.structure.events {
            self.structure.precedence.insert((old, e));
        }
        self.structure.events.push(e);
        self.structure.val.insert(e, value);
        for name in [process_predicate_name(self.process), type_pred.to_string()] {
            self.structure
                .predicates
                .get_mut(&name)
                .expect("initial() interpreted every signature predicate")
                .insert(e);
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pc": self.pc,
            "process": self.process,
            "structure": self.structure.to_canonical_json(),
        })
    }
}

/// One local step: the executed line and the two extended states around it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalStep {
    pub pre: ExtendedState,
    pub post: ExtendedState,
    pub line: i64,
}

/// Is `ext`'s event history a continuation of `base`'s? True when `base`'s
/// events form an initial segment of `ext`'s precedence order and `ext`
/// restricted to those events has exactly `base`'s predicates, precedence,
/// and values. Constants are deliberately not compared: they evolve while
/// the history is extended.
pub fn is_end_extension(base: &ExtendedState, ext: &ExtendedState) -> bool {
    if base.process != ext.process {
        return false;
    }
    let base_events: BTreeSet<_> = base.structure.events.iter().copied().collect();
    let ext_events: BTreeSet<_> = ext.structure.events.iter().copied().collect();
    if !base_events.is_subset(&ext_events) {
        return false;
    }
    // No new event may precede an old one.
    for &(x, y) in &ext.structure.precedence {
        if !base_events.contains(&x) && base_events.contains(&y) {
            return false;
        }
    }
    let reduct = ext.structure.restrict_events(|e| base_events.contains(&e));
    reduct.events == base.structure.events
        && reduct.predicates == base.structure.predicates
        && reduct.precedence == base.structure.precedence
        && reduct.val == base.structure.val
}

/// All steps the process can take from `s`. Picks branch over `{1..N}`;
/// reads branch over the whole value type `{0..N}` — nothing constrains
/// what a read returns at this level; writes and computes are deterministic.
pub fn local_successors(
    s: &ExtendedState,
    protocol: &Protocol,
    bound: i64,
) -> Result<Vec<LocalStep>, LocalSemError> {
    let body = &protocol.processes[s.process].body;
    if s.pc as usize > body.len() {
        return Ok(Vec::new());
    }
    let line = s.pc;
    let type_pred = event_predicate_name(protocol, s.process, line as usize);
    let event_index = line as u8;
    let mut out = Vec::new();
    let mut push = |assign: Option<(&str, i64)>, event_value: i64| {
        let mut post = s.clone();
        post.pc = line + 1;
        if let Some((name, v)) = assign {
            post.structure.constants.insert(name.to_string(), v);
        }
        post.append_event(event_index, &type_pred, event_value);
        out.push(LocalStep {
            pre: s.clone(),
            post,
            line,
        });
    };
    match &body[line as usize - 1] {
        Instruction::Pick { target } => {
            for n in 1..=bound {
                push(Some((target, n)), n);
            }
        }
        Instruction::Write { source, .. } => {
            let v = s.constant(source)?;
            push(None, v);
        }
        Instruction::Read { target, .. } => {
            for v in 0..=bound {
                push(Some((target, v)), v);
            }
        }
        Instruction::Compute { target, expr } => {
            let v = eval_expression_with(expr, &|name| s.structure.constants.get(name).copied())
                .expect("protocol expressions mention only declared locals");
            push(Some((target, v)), v);
        }
    }
    Ok(out)
}

/// Every complete run of the process: the final states (terminated program
/// counter) of all maximal local step sequences.
pub fn enumerate_nonrestricted_executions(
    protocol: &Protocol,
    process: usize,
    bound: i64,
) -> Result<Vec<ExtendedState>, LocalSemError> {
    let mut out = Vec::new();
    let mut stack = vec![ExtendedState::initial(protocol, process, bound)?];
    while let Some(s) = stack.pop() {
        let steps = local_successors(&s, protocol, bound)?;
        if steps.is_empty() {
            out.push(s);
        } else {
            for step in steps.into_iter().rev() {
                stack.push(step.post);
            }
        }
    }
    Ok(out)
}

fn chain_of(vars: &[&str]) -> Vec<Formula> {
    let mut fs = Vec::new();
    for i in 0..vars.len() {
        for j in (i + 1)..vars.len() {
            fs.push(less(vars[i], vars[j]));
        }
    }
    fs
}

fn covering(vars: &[&str]) -> Formula {
    forall(
        "x",
        or(vars.iter().map(|v| event_eq("x", v)).collect()),
    )
}

/// The complete-run shape as a sentence: four events forming a chain, the
/// first an assignment of a positive value, the second the unique write
/// carrying the same value, the third the unique read carrying a value in
/// `{0..N}`, the fourth a return valued by the decision rule.
pub fn execution_shape_sentence(protocol: &Protocol, process: usize, bound: i64) -> Formula {
    let assign = event_predicate_name(protocol, process, 1);
    let write = event_predicate_name(protocol, process, 2);
    let read = event_predicate_name(protocol, process, 3);
    let ret = event_predicate_name(protocol, process, 4);
    let p = process_predicate_name(process);
    let mut items = vec![forall("x", pred(&p, "x")), covering(&["e1", "e2", "e3", "e4"])];
    items.extend(chain_of(&["e1", "e2", "e3", "e4"]));
    items.extend([
        pred(&assign, "e1"),
        cmp(val("e1"), CmpOp::Gt, lit(0)),
        pred(&write, "e2"),
        cmp(val("e2"), CmpOp::Eq, val("e1")),
        forall("x", implies(pred(&write, "x"), event_eq("x", "e2"))),
        pred(&read, "e3"),
        cmp(val("e3"), CmpOp::Ge, lit(0)),
        cmp(val("e3"), CmpOp::Le, lit(bound)),
        forall("x", implies(pred(&read, "x"), event_eq("x", "e3"))),
        pred(&ret, "e4"),
        implies(
            or(vec![
                cmp(val("e3"), CmpOp::Eq, lit(0)),
                cmp(val("e3"), CmpOp::Eq, val("e1")),
            ]),
            cmp(val("e4"), CmpOp::Eq, lit(0)),
        ),
        implies(
            and(vec![
                cmp(val("e3"), CmpOp::Gt, lit(0)),
                cmp(val("e3"), CmpOp::Lt, val("e1")),
            ]),
            cmp(val("e4"), CmpOp::Eq, lit(1)),
        ),
        implies(
            cmp(val("e3"), CmpOp::Gt, val("e1")),
            cmp(val("e4"), CmpOp::Eq, lit(-1)),
        ),
    ]);
    exists(
        "e1",
        exists(
            "e2",
            exists(
                "e3",
                exists(
                    "e4",
                    and(std::iter::once(distinct(&["e1", "e2", "e3", "e4"]))
                        .chain(items)
                        .collect()),
                ),
            ),
        ),
    )
}

fn distinct(vars: &[&str]) -> Formula {
    let mut fs = Vec::new();
    for i in 0..vars.len() {
        for j in (i + 1)..vars.len() {
            fs.push(not(event_eq(vars[i], vars[j])));
        }
    }
    and(fs)
}

/// Native twin of [`execution_shape_sentence`]: the same property decided
/// procedurally. The two routes are asserted to agree on every structure
/// the crate enumerates.
pub fn execution_shape_holds(s: &FiniteStructure, protocol: &Protocol, process: usize) -> bool {
    if s.events.len() != 4 {
        return false;
    }
    let p = process_predicate_name(process);
    let Some(p_ext) = s.predicates.get(&p) else {
        return false;
    };
    if !s.events.iter().all(|e| p_ext.contains(e)) {
        return false;
    }
    // Order the events by how many of the others precede them; then demand
    // an actual chain.
    let mut ordered = s.events.clone();
    ordered.sort_by_key(|&e| s.events.iter().filter(|&&o| s.precedes(o, e)).count());
    for i in 0..4 {
        for j in (i + 1)..4 {
            if !s.precedes(ordered[i], ordered[j]) {
                return false;
            }
        }
    }
    let in_pred = |line: usize, e: fol::EventId| {
        s.predicates
            .get(&event_predicate_name(protocol, process, line))
            .is_some_and(|ext| ext.contains(&e))
    };
    let only = |line: usize, e: fol::EventId| {
        s.predicates
            .get(&event_predicate_name(protocol, process, line))
            .is_some_and(|ext| ext.iter().all(|&x| x == e))
    };
    let (a1, a2, a3, a4) = (ordered[0], ordered[1], ordered[2], ordered[3]);
    let (Some(v1), Some(v2), Some(v3), Some(v4)) =
        (s.val_of(a1), s.val_of(a2), s.val_of(a3), s.val_of(a4))
    else {
        return false;
    };
    in_pred(1, a1)
        && v1 > 0
        && in_pred(2, a2)
        && v2 == v1
        && only(2, a2)
        && in_pred(3, a3)
        && v3 >= 0
        && s.data_universe.contains(&v3)
        && only(3, a3)
        && in_pred(4, a4)
        && v4 == crate::protocol::verdict(v3, v1)
}

/// The local invariant, per program counter: with `pc = k` there are
/// exactly `k - 1` events, chained, all belonging to the process, and the
/// prefix of the complete-run shape established so far holds.
pub fn local_invariant_clause(
    protocol: &Protocol,
    process: usize,
    pc: i64,
    bound: i64,
) -> Formula {
    let p = process_predicate_name(process);
    let all_p = forall("x", pred(&p, "x"));
    let vars: Vec<&str> = ["e1", "e2", "e3", "e4"][..(pc.clamp(1, 5) as usize - 1)].to_vec();
    if vars.is_empty() {
        return and(vec![all_p, not(exists("x", event_eq("x", "x")))]);
    }
    let mut items = vec![distinct(&vars), covering(&vars)];
    items.extend(chain_of(&vars));
    items.push(pred(&event_predicate_name(protocol, process, 1), "e1"));
    items.push(cmp(val("e1"), CmpOp::Gt, lit(0)));
    if vars.len() >= 2 {
        items.push(pred(&event_predicate_name(protocol, process, 2), "e2"));
        items.push(cmp(val("e2"), CmpOp::Eq, val("e1")));
    }
    if vars.len() >= 3 {
        items.push(pred(&event_predicate_name(protocol, process, 3), "e3"));
        items.push(cmp(val("e3"), CmpOp::Ge, lit(0)));
        items.push(cmp(val("e3"), CmpOp::Le, lit(bound)));
    }
    if vars.len() >= 4 {
        items.push(pred(&event_predicate_name(protocol, process, 4), "e4"));
        items.push(implies(
            or(vec![
                cmp(val("e3"), CmpOp::Eq, lit(0)),
                cmp(val("e3"), CmpOp::Eq, val("e1")),
            ]),
            cmp(val("e4"), CmpOp::Eq, lit(0)),
        ));
        items.push(implies(
            and(vec![
                cmp(val("e3"), CmpOp::Gt, lit(0)),
                cmp(val("e3"), CmpOp::Lt, val("e1")),
            ]),
            cmp(val("e4"), CmpOp::Eq, lit(1)),
        ));
        items.push(implies(
            cmp(val("e3"), CmpOp::Gt, val("e1")),
            cmp(val("e4"), CmpOp::Eq, lit(-1)),
        ));
    }
    let mut f = and(items);
    for v in vars.iter().rev() {
        f = exists(v, f);
    }
    and(vec![all_p, f])
}

/// Does the extended state satisfy the local invariant for its own program
/// counter?
pub fn local_invariant_holds(
    s: &ExtendedState,
    protocol: &Protocol,
    bound: i64,
) -> Result<bool, LocalSemError> {
    let clause = local_invariant_clause(protocol, s.process, s.pc, bound);
    Ok(s.structure.eval_sentence(&clause)?)
}

/// Establish the local invariant inductively over the bounded step tree:
/// it holds initially, every reachable step preserves it, and every step is
/// an end-extension adding exactly one event. At termination the invariant
/// yields the complete-run shape, which is re-checked by both routes on
/// every final state.
pub fn check_local_invariant(
    protocol: &Protocol,
    process: usize,
    bound: i64,
) -> Result<CheckOutcome, LocalSemError> {
    let mut stats = CheckStats::default();
    let mut stack = vec![ExtendedState::initial(protocol, process, bound)?];
    while let Some(s) = stack.pop() {
        stats.states += 1;
        if !local_invariant_holds(&s, protocol, bound)? {
            return Ok(CheckOutcome::fail(
                json!({ "reason": "local invariant violated", "state": s.to_json() }),
                stats,
            ));
        }
        let terminal = s.pc as usize > protocol.processes[process].body.len();
        if terminal {
            stats.executions += 1;
            let native = execution_shape_holds(&s.structure, protocol, process);
            let sentence = execution_shape_sentence(protocol, process, bound);
            let formal = s.structure.eval_sentence(&sentence)?;
            if !native || !formal {
                return Ok(CheckOutcome::fail(
                    json!({
                        "reason": "a complete run does not have the required shape",
                        "native": native,
                        "formal": formal,
                        "state": s.to_json(),
                    }),
                    stats,
                ));
            }
        }
        for step in local_successors(&s, protocol, bound)? {
            stats.steps += 1;
            let one_new = step.post.structure.events.len() == s.structure.events.len() + 1;
            if !one_new || !is_end_extension(&s, &step.post) {
                return Ok(CheckOutcome::fail(
                    json!({
                        "reason": "a step is not a one-event end-extension",
                        "line": step.line,
                        "pre": s.to_json(),
                        "post": step.post.to_json(),
                    }),
                    stats,
                ));
            }
            stack.push(step.post);
        }
    }
    Ok(CheckOutcome::pass(stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::check_structure;
    use crate::protocol::kishon_protocol;

    fn initial(process: usize, bound: i64) -> ExtendedState {
        ExtendedState::initial(&kishon_protocol(), process, bound).unwrap()
    }

    /// Walk one deterministic path: pick `n`, write, read `v`, decide.
    fn run(process: usize, bound: i64, n: i64, v: i64) -> ExtendedState {
        let protocol = kishon_protocol();
        let mut s = initial(process, bound);
        for _ in 0..4 {
            let steps = local_successors(&s, &protocol, bound).unwrap();
            let step = steps
                .into_iter()
                .find(|st| {
                    let last = *st.post.structure.events.last().unwrap();
                    let value = st.post.structure.val_of(last).unwrap();
                    match st.line {
                        1 => value == n,
                        3 => value == v,
                        _ => true,
                    }
                })
                .expect("requested branch exists");
            s = step.post;
        }
        s
    }

    #[test]
    fn initial_state_is_empty_and_well_formed() {
        let protocol = kishon_protocol();
        for process in 0..2 {
            let s = initial(process, 3);
            assert_eq!(s.structure.events.len(), 0);
            assert_eq!(s.pc, 1);
            for name in [format!("n_{process}"), format!("v_{process}"), format!("val_{process}")] {
                assert_eq!(s.constant(&name).unwrap(), 0);
            }
            assert!(check_structure(&s.structure).is_valid());
            assert!(local_signature(&protocol, process)
                .check(&s.structure)
                .is_valid());
        }
    }

    #[test]
    fn pick_branches_and_end_extension() {
        let protocol = kishon_protocol();
        let s = initial(0, 2);
        let steps = local_successors(&s, &protocol, 2).unwrap();
        assert_eq!(steps.len(), 2);
        for step in &steps {
            assert_eq!(step.line, 1);
            assert_eq!(step.post.structure.events.len(), 1);
            assert!(is_end_extension(&s, &step.post));
            assert!(is_end_extension(&step.post, &step.post));
            let e = step.post.structure.events[0];
            let n = step.post.structure.val_of(e).unwrap();
            assert!(n > 0);
            assert_eq!(step.post.constant("n_0").unwrap(), n);
        }
        // Different branches are not extensions of one another.
        assert!(!is_end_extension(&steps[0].post, &steps[1].post));
        assert!(!is_end_extension(&steps[1].post, &steps[0].post));
    }

    #[test]
    fn read_branches_over_the_whole_type() {
        let protocol = kishon_protocol();
        let mut s = initial(1, 2);
        for _ in 0..2 {
            s = local_successors(&s, &protocol, 2).unwrap()[0].post.clone();
        }
        assert_eq!(s.pc, 3);
        let steps = local_successors(&s, &protocol, 2).unwrap();
        assert_eq!(steps.len(), 3); // read 0, 1, or 2
        let read_values: Vec<i64> = steps
            .iter()
            .map(|st| {
                let e = *st.post.structure.events.last().unwrap();
                st.post.structure.val_of(e).unwrap()
            })
            .collect();
        assert_eq!(read_values, vec![0, 1, 2]);
    }

    #[test]
    fn decide_step_is_deterministic_and_valued_by_the_rule() {
        let s = run(0, 2, 2, 1);
        assert_eq!(s.pc, 5);
        let e4 = s.structure.events[3];
        assert_eq!(s.structure.val_of(e4).unwrap(), 1); // 0 < 1 < 2: a win
        assert_eq!(s.constant("val_0").unwrap(), 1);
    }

    #[test]
    fn enumeration_counts_and_shape() {
        let protocol = kishon_protocol();
        for (bound, expected) in [(1i64, 2usize), (2, 6), (3, 12)] {
            for process in 0..2 {
                let all = enumerate_nonrestricted_executions(&protocol, process, bound).unwrap();
                assert_eq!(all.len(), expected, "bound {bound} process {process}");
                for s in &all {
                    assert_eq!(s.pc, 5);
                    assert_eq!(s.structure.events.len(), 4);
                    assert!(check_structure(&s.structure).is_valid());
                    // Events form a chain.
                    for i in 0..4 {
                        for j in (i + 1)..4 {
                            assert!(s
                                .structure
                                .precedes(s.structure.events[i], s.structure.events[j]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn every_complete_run_has_the_shape_by_both_routes() {
        let protocol = kishon_protocol();
        for process in 0..2 {
            let sentence = execution_shape_sentence(&protocol, process, 3);
            for s in enumerate_nonrestricted_executions(&protocol, process, 3).unwrap() {
                let native = execution_shape_holds(&s.structure, &protocol, process);
                let formal = s.structure.eval_sentence(&sentence).unwrap();
                assert!(native);
                assert_eq!(native, formal);
            }
        }
    }

    #[test]
    fn tampered_write_value_breaks_the_shape() {
        let protocol = kishon_protocol();
        let mut s = run(0, 3, 2, 1);
        let a2 = s.structure.events[1];
        s.structure.val.insert(a2, 3); // the write no longer publishes the pick
        assert!(!execution_shape_holds(&s.structure, &protocol, 0));
        let sentence = execution_shape_sentence(&protocol, 0, 3);
        assert!(!s.structure.eval_sentence(&sentence).unwrap());
    }

    #[test]
    fn a_second_write_event_breaks_the_shape() {
        let protocol = kishon_protocol();
        let mut s = run(0, 3, 2, 1);
        let a3 = s.structure.events[2];
        s.structure
            .predicates
            .get_mut("Write-on-R_0")
            .unwrap()
            .insert(a3);
        assert!(!execution_shape_holds(&s.structure, &protocol, 0));
        let sentence = execution_shape_sentence(&protocol, 0, 3);
        assert!(!s.structure.eval_sentence(&sentence).unwrap());
    }

    #[test]
    fn local_invariant_holds_along_a_run_and_fails_on_a_forgery() {
        let protocol = kishon_protocol();
        let s0 = initial(0, 2);
        assert!(local_invariant_holds(&s0, &protocol, 2).unwrap());
        let s5 = run(0, 2, 1, 2);
        assert!(local_invariant_holds(&s5, &protocol, 2).unwrap());
        // A state claiming one event that is a write, not an assignment.
        let mut forged = initial(0, 2);
        forged.pc = 2;
        forged.append_event(1, "Write-on-R_0", 1);
        assert!(!local_invariant_holds(&forged, &protocol, 2).unwrap());
    }

    #[test]
    fn local_invariant_is_inductive_over_the_step_tree() {
        let protocol = kishon_protocol();
        for process in 0..2 {
            let outcome = check_local_invariant(&protocol, process, 3).unwrap();
            assert!(outcome.pass, "{:?}", outcome.counterexample);
            // 1 initial, 3 picked, 3 written, 12 read, 12 terminated.
            assert_eq!(outcome.stats.states, 31);
            assert_eq!(outcome.stats.steps, 30);
            assert_eq!(outcome.stats.executions, 12);
        }
    }
}
