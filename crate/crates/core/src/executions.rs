//! Two-process event semantics: register behavior specifications and
//! exhaustive enumeration of restricted system executions.
//!
//! A restricted system execution combines the two players' local histories
//! (each a four-event chain, see [`crate::nonrestricted`]) into one
//! eight-event structure whose precedence is an interval order extending
//! both chains, and constrains the values returned by reads with a register
//! specification:
//!
//! * **serial** — reads and writes on a register are linearly ordered and a
//!   read returns the last preceding write's value (or the initial value);
//! * **regular** — a read returns the last preceding write's value, the
//!   initial value when no write precedes it, or the value of any write
//!   concurrent with it;
//! * **safe** — a read concurrent with no write behaves serially; a read
//!   concurrent with some write may return *anything* of the right type.
//!
//! The checkers in this module establish, by exhausting every order, pick
//! pair, and allowed read value up to a bound, that the game is correct for
//! serial and regular registers (the player who picked the smaller number
//! gets the strictly smaller verdict, equal picks draw) — and that safe
//! registers are *not* enough, exhibiting a concrete counterexample.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::fol::{
    and, cmp, concurrent, cnst, data_universe, exists, forall, implies, is_system_execution,
    less, not, or, pred, val, CmpOp, EvalError, EventId, FiniteStructure, Formula, Signature,
};
use crate::nonrestricted::{
    execution_shape_holds, local_signature, process_predicate_name,
};
use crate::orders::{enumerate_two_chain_orders, OrderError, Precedence};
use crate::outcome::{CheckOutcome, CheckStats};
use crate::protocol::{verdict, Instruction, Protocol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("bound must be at least 1, got {0}")]
    BadBound(i64),
    #[error("serial semantics violated: read event {read} is concurrent with write event {write}")]
    SerialityViolated { read: usize, write: usize },
    #[error("event index {0} is outside the order")]
    EventOutOfRange(usize),
    #[error("formula evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("order construction failed: {0}")]
    Order(#[from] OrderError),
}

/// Which behavior specification constrains the registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegisterSemantics {
    Serial,
    Regular,
    Safe,
}

impl std::fmt::Display for RegisterSemantics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegisterSemantics::Serial => "serial",
            RegisterSemantics::Regular => "regular",
            RegisterSemantics::Safe => "safe",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for RegisterSemantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "serial" => Ok(RegisterSemantics::Serial),
            "regular" => Ok(RegisterSemantics::Regular),
            "safe" => Ok(RegisterSemantics::Safe),
            other => Err(format!(
                "unknown register semantics `{other}` (expected serial, regular, or safe)"
            )),
        }
    }
}

/// How one register is used by the protocol: who writes it, which events
/// touch it, and the names derived from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterRole {
    pub name: String,
    pub writer: usize,
    pub write_pred: String,
    pub read_pred: String,
    pub initial_constant: String,
    pub write_event: EventId,
    pub read_event: EventId,
}

/// Derive each register's role from the protocol text.
pub fn register_roles(protocol: &Protocol) -> Vec<RegisterRole> {
    protocol
        .registers
        .iter()
        .map(|reg| {
            let mut write_event = None;
            let mut read_event = None;
            for (process, def) in protocol.processes.iter().enumerate() {
                for (i, instr) in def.body.iter().enumerate() {
                    match instr {
                        Instruction::Write { register, .. } if *register == reg.name => {
                            write_event = Some(EventId::new(process as u8, i as u8 + 1));
                        }
                        Instruction::Read { register, .. } if *register == reg.name => {
                            read_event = Some(EventId::new(process as u8, i as u8 + 1));
                        }
                        _ => {}
                    }
                }
            }
            RegisterRole {
                name: reg.name.clone(),
                writer: reg.writer,
                write_pred: format!("Write-on-{}", reg.name),
                read_pred: format!("Read-of-{}", reg.name),
                initial_constant: format!("d_{}", reg.name),
                write_event: write_event.expect("each register is written"),
                read_event: read_event.expect("each register is read"),
            }
        })
        .collect()
}

/// The two-process event language: both processes' predicates plus the
/// registers' initial-value constants.
pub fn execution_signature(protocol: &Protocol) -> Signature {
    let mut predicates = BTreeSet::new();
    for process in 0..protocol.processes.len() {
        predicates.extend(local_signature(protocol, process).predicates);
    }
    let constants = register_roles(protocol)
        .into_iter()
        .map(|r| r.initial_constant)
        .collect();
    Signature {
        predicates,
        constants,
    }
}

/// Map an element of a two-chain order (chain length 4) to its event: the
/// first four positions are one player's chain, the last four the other's.
pub fn two_chain_event(index: usize) -> EventId {
    if index < 4 {
        EventId::new(0, index as u8 + 1)
    } else {
        EventId::new(1, index as u8 - 3)
    }
}

/// Inverse of [`two_chain_event`].
pub fn two_chain_index(e: EventId) -> usize {
    e.process as usize * 4 + e.index as usize - 1
}

/// The values a read is allowed to return under the given register
/// semantics, for an arbitrary set of writes on the register.
///
/// * regular: the union of — the initial value if no write precedes the
///   read; the value of any latest preceding write; the value of any write
///   concurrent with the read.
/// * serial: the read must be comparable with every write; the allowed set
///   is then the regular set without the concurrent clause.
/// * safe: as serial when no write is concurrent with the read, otherwise
///   the whole type `{0..N}`.
pub fn allowed_read_values(
    read: usize,
    order: &Precedence,
    writes: &[(usize, i64)],
    initial: i64,
    sem: RegisterSemantics,
    bound: i64,
) -> Result<BTreeSet<i64>, ExecError> {
    if read >= order.len() {
        return Err(ExecError::EventOutOfRange(read));
    }
    if let Some(&(w, _)) = writes.iter().find(|&&(w, _)| w >= order.len()) {
        return Err(ExecError::EventOutOfRange(w));
    }
    let concurrent_writes: Vec<&(usize, i64)> = writes
        .iter()
        .filter(|&&(w, _)| order.concurrent(w, read))
        .collect();
    if sem == RegisterSemantics::Serial {
        if let Some(&&(write, _)) = concurrent_writes.first() {
            return Err(ExecError::SerialityViolated { read, write });
        }
    }
    if sem == RegisterSemantics::Safe && !concurrent_writes.is_empty() {
        return Ok((0..=bound).collect());
    }
    let preceding: Vec<&(usize, i64)> = writes.iter().filter(|&&(w, _)| order.lt(w, read)).collect();
    let mut allowed = BTreeSet::new();
    if preceding.is_empty() {
        allowed.insert(initial);
    }
    for &&(w, v) in &preceding {
        let shadowed = preceding
            .iter()
            .any(|&&(u, _)| u != w && order.lt(w, u) && order.lt(u, read));
        if !shadowed {
            allowed.insert(v);
        }
    }
    if sem == RegisterSemantics::Regular {
        for &&(_, v) in &concurrent_writes {
            allowed.insert(v);
        }
    }
    Ok(allowed)
}

/// An eight-event structure combining both players' complete runs under
/// one precedence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemExecution {
    pub structure: FiniteStructure,
}

impl SystemExecution {
    /// Assemble the execution from its degrees of freedom: the order, the
    /// picks, and the two read values. Return values follow the decision
    /// rule; every other value is forced.
    pub fn assemble(
        protocol: &Protocol,
        order: &Precedence,
        picks: (i64, i64),
        reads: (i64, i64),
        bound: i64,
    ) -> Self {
        let mut s = FiniteStructure::empty(data_universe(bound));
        for name in execution_signature(protocol).predicates {
            s.predicates.insert(name, BTreeSet::new());
        }
        for role in register_roles(protocol) {
            s.constants.insert(role.initial_constant, 0);
        }
        let events: Vec<EventId> = (0..8).map(two_chain_event).collect();
        s.events = events.clone();
        for &(x, y) in order.pairs() {
            s.precedence.insert((two_chain_event(x), two_chain_event(y)));
        }
        let values = [
            [picks.0, picks.0, reads.0, verdict(reads.0, picks.0)],
            [picks.1, picks.1, reads.1, verdict(reads.1, picks.1)],
        ];
        for process in 0..2 {
            for line in 1..=4 {
                let e = EventId::new(process as u8, line as u8);
                s.val.insert(e, values[process][line - 1]);
                let type_pred =
                    crate::nonrestricted::event_predicate_name(protocol, process, line);
                for name in [process_predicate_name(process), type_pred] {
                    s.predicates.get_mut(&name).expect("interpreted above").insert(e);
                }
            }
        }
        SystemExecution { structure: s }
    }

    pub fn value(&self, process: usize, line: usize) -> i64 {
        self.structure
            .val_of(EventId::new(process as u8, line as u8))
            .expect("eight-event executions value every event")
    }

    /// The precedence order in two-chain index space.
    pub fn order(&self) -> Result<Precedence, ExecError> {
        let pairs = self
            .structure
            .precedence
            .iter()
            .map(|&(x, y)| (two_chain_index(x), two_chain_index(y)))
            .collect();
        Ok(Precedence::from_closed(8, pairs)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.structure.to_canonical_json()
    }
}

/// The native reading of what makes an eight-event structure a restricted
/// system execution, registers aside: a valid system execution whose events
/// are partitioned between the two processes, whose per-process reducts
/// each have the complete-run shape, and in which no event is both a read
/// and a write.
pub fn is_restricted_execution(e: &SystemExecution, protocol: &Protocol) -> bool {
    let s = &e.structure;
    if !is_system_execution(s) {
        return false;
    }
    let p: Vec<&BTreeSet<EventId>> = (0..2)
        .map(|i| {
            s.predicates
                .get(&process_predicate_name(i))
                .expect("process predicates interpreted")
        })
        .collect();
    let partitioned = s
        .events
        .iter()
        .all(|e| p[0].contains(e) != p[1].contains(e));
    if !partitioned {
        return false;
    }
    for process in 0..2 {
        let reduct = s.restrict_events(|e| p[process].contains(&e));
        if !execution_shape_holds(&reduct, protocol, process) {
            return false;
        }
    }
    for role in register_roles(protocol) {
        let writes = &s.predicates[&role.write_pred];
        let reads = &s.predicates[&role.read_pred];
        if !writes.is_disjoint(reads) {
            return false;
        }
    }
    true
}

/// The regularity specification for one register, as a sentence: every
/// read returns the initial value (if no write precedes it), the value of
/// a latest preceding write, or the value of a concurrent write.
pub fn regularity_sentence(protocol: &Protocol, register: usize) -> Formula {
    let role = &register_roles(protocol)[register];
    let w = |x: &str| pred(&role.write_pred, x);
    let initial_case = and(vec![
        cmp(val("r"), CmpOp::Eq, cnst(&role.initial_constant)),
        not(exists("w", and(vec![w("w"), less("w", "r")]))),
    ]);
    let latest_preceding = exists(
        "w",
        and(vec![
            w("w"),
            less("w", "r"),
            not(exists(
                "u",
                and(vec![w("u"), less("w", "u"), less("u", "r")]),
            )),
            cmp(val("r"), CmpOp::Eq, val("w")),
        ]),
    );
    let concurrent_write = exists(
        "w",
        and(vec![
            w("w"),
            concurrent("w", "r"),
            cmp(val("r"), CmpOp::Eq, val("w")),
        ]),
    );
    forall(
        "r",
        implies(
            pred(&role.read_pred, "r"),
            or(vec![initial_case, latest_preceding, concurrent_write]),
        ),
    )
}

/// Native twin of [`regularity_sentence`]: each register's read value is a
/// member of its regular allowed set.
pub fn reads_are_regular_native(
    e: &SystemExecution,
    protocol: &Protocol,
    bound: i64,
) -> Result<bool, ExecError> {
    let order = e.order()?;
    for role in register_roles(protocol) {
        let write_value = e
            .structure
            .val_of(role.write_event)
            .expect("writes are valued");
        let read_value = e.structure.val_of(role.read_event).expect("reads are valued");
        let allowed = allowed_read_values(
            two_chain_index(role.read_event),
            &order,
            &[(two_chain_index(role.write_event), write_value)],
            0,
            RegisterSemantics::Regular,
            bound,
        )?;
        if !allowed.contains(&read_value) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lazily enumerate every restricted system execution at the bound: every
/// interval order extending the two chains, every pick pair, every read
/// value the register semantics allows. Orders on which serial semantics
/// is impossible (a read concurrent with its register's write) produce no
/// serial executions.
pub fn enumerate_restricted_executions(
    protocol: &Protocol,
    bound: i64,
    sem: RegisterSemantics,
) -> Result<impl Iterator<Item = SystemExecution> + '_, ExecError> {
    if bound < 1 {
        return Err(ExecError::BadBound(bound));
    }
    let enumeration = enumerate_two_chain_orders(4);
    let roles = register_roles(protocol);
    let mut seeds: Vec<(usize, (i64, i64), (i64, i64))> = Vec::new();
    for (order_index, order) in enumeration.orders.iter().enumerate() {
        for n0 in 1..=bound {
            for n1 in 1..=bound {
                let picks = (n0, n1);
                let write_value = |role: &RegisterRole| if role.writer == 0 { n0 } else { n1 };
                let mut read_sets = Vec::new();
                for role in &roles {
                    let allowed = match allowed_read_values(
                        two_chain_index(role.read_event),
                        order,
                        &[(two_chain_index(role.write_event), write_value(role))],
                        0,
                        sem,
                        bound,
                    ) {
                        Ok(set) => set,
                        Err(ExecError::SerialityViolated { .. }) => BTreeSet::new(),
                        Err(e) => return Err(e),
                    };
                    read_sets.push(allowed);
                }
                // read_sets[i] constrains the read *of register i*, which
                // process 1−i performs; reads.0 is process 0's read value.
                for &va in &read_sets[1] {
                    for &vb in &read_sets[0] {
                        seeds.push((order_index, picks, (va, vb)));
                    }
                }
            }
        }
    }
    let orders = enumeration.orders;
    Ok(seeds.into_iter().map(move |(order_index, picks, reads)| {
        SystemExecution::assemble(protocol, &orders[order_index], picks, reads, bound)
    }))
}

/// Verdicts order exactly as picks do, with equal picks drawing at 0.
pub fn trichotomy_holds(e: &SystemExecution) -> bool {
    trichotomy_violation(e).is_none()
}

fn trichotomy_violation(e: &SystemExecution) -> Option<String> {
    let (n0, n1) = (e.value(0, 1), e.value(1, 1));
    let (r0, r1) = (e.value(0, 4), e.value(1, 4));
    match n0.cmp(&n1) {
        std::cmp::Ordering::Less if !(r0 < r1) => Some(format!(
            "picks {n0} < {n1} but verdicts {r0} and {r1} are not increasing"
        )),
        std::cmp::Ordering::Equal if !(r0 == 0 && r1 == 0) => Some(format!(
            "picks are both {n0} but verdicts {r0} and {r1} are not both 0"
        )),
        std::cmp::Ordering::Greater if !(r0 > r1) => Some(format!(
            "picks {n0} > {n1} but verdicts {r0} and {r1} are not decreasing"
        )),
        _ => None,
    }
}

/// The lower pick loses: over every restricted execution at the bound,
/// check that verdicts order exactly as picks do (equal picks draw with
/// both verdicts 0). Holds for serial and regular registers; fails for
/// safe registers at bounds ≥ 2, and the counterexample is reported.
pub fn check_theorem33(
    protocol: &Protocol,
    bound: i64,
    sem: RegisterSemantics,
) -> Result<CheckOutcome, ExecError> {
    let mut stats = CheckStats {
        orders: enumerate_two_chain_orders(4).orders.len() as u64,
        ..CheckStats::default()
    };
    for e in enumerate_restricted_executions(protocol, bound, sem)? {
        stats.executions += 1;
        if !is_restricted_execution(&e, protocol) {
            return Ok(CheckOutcome::fail(
                json!({
                    "reason": "enumerated structure is not a restricted system execution",
                    "execution": e.to_json(),
                }),
                stats,
            ));
        }
        if let Some(violation) = trichotomy_violation(&e) {
            return Ok(CheckOutcome::fail(
                json!({
                    "reason": violation,
                    "registers": sem.to_string(),
                    "execution": e.to_json(),
                }),
                stats,
            ));
        }
    }
    Ok(CheckOutcome::pass(stats))
}

/// Neither read may miss the opponent's write entirely when both picks are
/// positive — it is never the case that both reads return 0.
pub fn check_lemma_ml(e: &SystemExecution) -> bool {
    !(e.value(0, 3) == 0 && e.value(1, 3) == 0)
}

/// If the first player picked strictly less: a nonzero read decides the
/// game correctly on each side (the larger pick returns 1, the smaller −1).
pub fn check_lemma_lm1(e: &SystemExecution) -> bool {
    let (n0, n1) = (e.value(0, 1), e.value(1, 1));
    if n0 >= n1 {
        return true;
    }
    let first = e.value(1, 3) == 0 || e.value(1, 4) == 1;
    let second = e.value(0, 3) == 0 || e.value(0, 4) == -1;
    first && second
}

/// In every interval order extending the two chains, at least one write is
/// visible to the opposite read: the first player's write precedes the
/// second player's read, or vice versa.
pub fn check_concurrency_lemma(order: &Precedence) -> bool {
    let a2 = two_chain_index(EventId::new(0, 2));
    let a3 = two_chain_index(EventId::new(0, 3));
    let b2 = two_chain_index(EventId::new(1, 2));
    let b3 = two_chain_index(EventId::new(1, 3));
    order.lt(b2, a3) || order.lt(a2, b3)
}

/// All three supporting lemmas at once, over regular registers: the
/// concurrency lemma on every order, and the two value lemmas on every
/// enumerated execution.
pub fn check_lemmas(protocol: &Protocol, bound: i64) -> Result<CheckOutcome, ExecError> {
    let enumeration = enumerate_two_chain_orders(4);
    let mut stats = CheckStats {
        orders: enumeration.orders.len() as u64,
        ..CheckStats::default()
    };
    for (index, order) in enumeration.orders.iter().enumerate() {
        if !check_concurrency_lemma(order) {
            return Ok(CheckOutcome::fail(
                json!({
                    "reason": "neither write precedes the opposite read",
                    "order_index": index,
                    "order": order.pairs().iter().collect::<Vec<_>>(),
                }),
                stats,
            ));
        }
    }
    for e in enumerate_restricted_executions(protocol, bound, RegisterSemantics::Regular)? {
        stats.executions += 1;
        let ml = check_lemma_ml(&e);
        let lm1 = check_lemma_lm1(&e);
        if !ml || !lm1 {
            let reason = if ml {
                "a nonzero read fails to decide the game correctly"
            } else {
                "both reads returned 0"
            };
            return Ok(CheckOutcome::fail(
                json!({ "reason": reason, "execution": e.to_json() }),
                stats,
            ));
        }
    }
    Ok(CheckOutcome::pass(stats))
}
