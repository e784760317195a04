//! From interleaved histories to system executions — and the observation
//! that register seriality needs no assumption there.
//!
//! Every terminating history of the interleaved semantics executes exactly
//! eight instructions, one per step. Mapping each step to a single-instant
//! event (valued by what the step assigned, wrote, read, or returned) and
//! ordering events by step position yields a system execution whose
//! precedence is a total order. On such executions each register
//! automatically behaves serially: its read and write are comparable, and
//! the read returns the last preceding write's value or the initial value.
//! [`check_seriality_theorem`] verifies this exhaustively — seriality is a
//! consequence of interleaving, not an extra axiom — and cross-checks that
//! every bridged execution also satisfies the regularity sentence, since a
//! serial register is in particular regular.

use std::collections::BTreeSet;

use serde_json::json;
use thiserror::Error;

use crate::executions::{
    allowed_read_values, is_restricted_execution, register_roles, regularity_sentence,
    two_chain_index, ExecError, RegisterSemantics, SystemExecution,
};
use crate::fol::{data_universe, EventId, FiniteStructure};
use crate::global_sem::{History, Machine, SemError};
use crate::nonrestricted::{event_predicate_name, process_predicate_name};
use crate::outcome::{CheckOutcome, CheckStats};
use crate::protocol::Instruction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error("history is not terminating: it has {0} steps, expected 8")]
    NotTerminating(usize),
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// A history together with its image as a system execution. The eight
/// events correspond one-to-one to the eight steps; precedence is the
/// total order of step positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgedExecution {
    pub history: History,
    pub execution: SystemExecution,
}

/// Interpret each step of a terminating history as one event: the event is
/// labeled by the executed line, valued by the step's effect (the picked,
/// written, read, or returned value), and placed after every earlier step's
/// event.
pub fn history_to_execution(h: &History, machine: &Machine) -> Result<BridgedExecution, BridgeError> {
    if h.labels.len() != 8 {
        return Err(BridgeError::NotTerminating(h.labels.len()));
    }
    let protocol = machine.protocol();
    let mut s = FiniteStructure::empty(data_universe(machine.bound()));
    for name in crate::executions::execution_signature(protocol).predicates {
        s.predicates.insert(name, BTreeSet::new());
    }
    for role in register_roles(protocol) {
        s.constants.insert(role.initial_constant, 0);
    }
    for (i, label) in h.labels.iter().enumerate() {
        let line = label.line as usize;
        let e = EventId::new(label.process as u8, line as u8);
        let post = &h.states[i + 1];
        let value_source = match &protocol.processes[label.process].body[line - 1] {
            Instruction::Pick { target } => target,
            Instruction::Write { register, .. } => register,
            Instruction::Read { target, .. } => target,
            Instruction::Compute { target, .. } => target,
        };
        let value = machine.value(post, value_source)?;
        for &old in &s.events {
            s.precedence.insert((old, e));
        }
        s.events.push(e);
        s.val.insert(e, value);
        let type_pred = event_predicate_name(protocol, label.process, line);
        for name in [process_predicate_name(label.process), type_pred] {
            s.predicates
                .get_mut(&name)
                .expect("interpreted above")
                .insert(e);
        }
    }
    Ok(BridgedExecution {
        history: h.clone(),
        execution: SystemExecution { structure: s },
    })
}

/// Does some register of the execution violate the serial specification?
/// Returns a description of the first violating read, or `None` when both
/// registers behave serially: read comparable with the write, and the read
/// value equal to the last preceding write's value (or the initial value).
pub fn find_serial_violation(
    e: &SystemExecution,
    protocol: &crate::protocol::Protocol,
    bound: i64,
) -> Result<Option<serde_json::Value>, ExecError> {
    let order = e.order()?;
    for role in register_roles(protocol) {
        let write_value = e
            .structure
            .val_of(role.write_event)
            .expect("writes are valued");
        let read_value = e.structure.val_of(role.read_event).expect("reads are valued");
        let allowed = match allowed_read_values(
            two_chain_index(role.read_event),
            &order,
            &[(two_chain_index(role.write_event), write_value)],
            0,
            RegisterSemantics::Serial,
            bound,
        ) {
            Ok(set) => set,
            Err(ExecError::SerialityViolated { .. }) => {
                return Ok(Some(json!({
                    "reason": "read and write on the register are concurrent",
                    "register": role.name,
                    "read": role.read_event.to_string(),
                })));
            }
            Err(other) => return Err(other),
        };
        if !allowed.contains(&read_value) {
            return Ok(Some(json!({
                "reason": "read value is not the last written value",
                "register": role.name,
                "read": role.read_event.to_string(),
                "value": read_value,
                "allowed": allowed,
            })));
        }
    }
    Ok(None)
}

/// Seriality as a theorem: bridge every terminating history and verify
/// that the image is a valid restricted execution on which both registers
/// satisfy the serial specification — and, since serial registers are
/// regular, the regularity sentence as well.
pub fn check_seriality_theorem(machine: &Machine) -> Result<CheckOutcome, BridgeError> {
    let protocol = machine.protocol();
    let sentences: Vec<_> = (0..protocol.registers.len())
        .map(|r| regularity_sentence(protocol, r))
        .collect();
    let mut stats = CheckStats::default();
    for h in machine.enumerate_histories() {
        stats.histories += 1;
        let bridged = history_to_execution(&h, machine)?;
        stats.executions += 1;
        let fail = |reason: serde_json::Value| {
            Ok(CheckOutcome::fail(
                json!({
                    "violation": reason,
                    "history": machine.history_json(&h),
                    "execution": bridged.execution.to_json(),
                }),
                stats.clone(),
            ))
        };
        if !is_restricted_execution(&bridged.execution, protocol) {
            return fail(json!("bridged image is not a restricted system execution"));
        }
        if let Some(violation) =
            find_serial_violation(&bridged.execution, protocol, machine.bound())?
        {
            return fail(violation);
        }
        for sentence in &sentences {
            let regular = bridged
                .execution
                .structure
                .eval_sentence(sentence)
                .map_err(ExecError::from)?;
            if !regular {
                return fail(json!("bridged image is not regular"));
            }
        }
    }
    Ok(CheckOutcome::pass(stats))
}
