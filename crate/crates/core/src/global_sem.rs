//! Interleaved global-state semantics: states, atomic steps, histories, and
//! exhaustive invariant checking.
//!
//! A global state assigns a value to every state variable — each process's
//! locals, the shared registers, and one program counter per process. Steps
//! are atomic: one process executes the instruction at its program counter
//! and advances it; everything else is untouched. A history is a maximal run
//! from the initial state, and with all domains bounded the whole state
//! space and every history can be enumerated outright.
//!
//! Correctness claims at this level are *sentential* formulas — boolean
//! combinations of comparisons between state variables and literals, with no
//! quantifiers — and [`check_inductive_invariant`] establishes them the
//! classical way: the formula holds initially and is preserved by **every**
//! step from **every** well-typed state satisfying it, reachable or not.
//! [`phi_invariant`] is the invariant that does the real work for the game:
//! per-process clauses tying locals to registers, a cross clause relating
//! the two readers, and typing.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::fol::CmpOp;
use crate::outcome::{CheckOutcome, CheckStats};
use crate::protocol::{eval_expression_with, validate_protocol, Expr, Instruction, Protocol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("bound must be at least 1, got {0}")]
    BadBound(i64),
    #[error("`{0}` is not a state variable")]
    UnknownVariable(String),
    #[error("value {1} is outside the domain of `{0}`")]
    OutOfDomain(String, i64),
}

/// A total assignment to the state variables, in the machine's layout order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalState {
    values: Vec<i64>,
}

/// Which instruction a step executed: the acting process and the 1-based
/// line (the program counter before the step).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepLabel {
    pub process: usize,
    pub line: i64,
}

/// One atomic step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalStep {
    pub pre: GlobalState,
    pub post: GlobalState,
    pub label: StepLabel,
}

/// A maximal run: `states[0]` is initial, `labels[i]` takes `states[i]` to
/// `states[i + 1]`, and the last state has no successors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub states: Vec<GlobalState>,
    pub labels: Vec<StepLabel>,
}

impl History {
    pub fn final_state(&self) -> &GlobalState {
        self.states.last().expect("a history contains at least the initial state")
    }
}

/// Terms of sentential formulas: a state variable or an integer literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateTerm {
    Var(String),
    Lit(i64),
}

/// Quantifier-free formulas over the state variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateFormula {
    Cmp(StateTerm, CmpOp, StateTerm),
    Not(Box<StateFormula>),
    And(Vec<StateFormula>),
    Or(Vec<StateFormula>),
    Implies(Box<StateFormula>, Box<StateFormula>),
}

pub fn var(name: &str) -> StateTerm {
    StateTerm::Var(name.to_string())
}

pub fn num(n: i64) -> StateTerm {
    StateTerm::Lit(n)
}

pub fn atom(a: StateTerm, op: CmpOp, b: StateTerm) -> StateFormula {
    StateFormula::Cmp(a, op, b)
}

pub fn neg(f: StateFormula) -> StateFormula {
    StateFormula::Not(Box::new(f))
}

pub fn conj(fs: Vec<StateFormula>) -> StateFormula {
    StateFormula::And(fs)
}

pub fn disj(fs: Vec<StateFormula>) -> StateFormula {
    StateFormula::Or(fs)
}

pub fn imp(a: StateFormula, b: StateFormula) -> StateFormula {
    StateFormula::Implies(Box::new(a), Box::new(b))
}

/// A sentential formula with variable names resolved to layout slots, for
/// evaluation in tight loops.
#[derive(Debug, Clone)]
pub struct CompiledStateFormula {
    repr: CFormula,
}

#[derive(Debug, Clone)]
enum CTerm {
    Slot(usize),
    Lit(i64),
}

#[derive(Debug, Clone)]
enum CFormula {
    Cmp(CTerm, CmpOp, CTerm),
    Not(Box<CFormula>),
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
}

impl CompiledStateFormula {
    pub fn holds(&self, s: &GlobalState) -> bool {
        Self::eval(&self.repr, &s.values)
    }

    fn eval(f: &CFormula, values: &[i64]) -> bool {
        match f {
            CFormula::Cmp(a, op, b) => {
                let read = |t: &CTerm| match *t {
                    CTerm::Slot(i) => values[i],
                    CTerm::Lit(n) => n,
                };
                op.test(read(a), read(b))
            }
            CFormula::Not(g) => !Self::eval(g, values),
            CFormula::And(gs) => gs.iter().all(|g| Self::eval(g, values)),
            CFormula::Or(gs) => gs.iter().any(|g| Self::eval(g, values)),
            CFormula::Implies(a, b) => !Self::eval(a, values) || Self::eval(b, values),
        }
    }
}

#[derive(Debug, Clone)]
struct LayoutEntry {
    name: String,
    lo: i64,
    hi: i64,
}

/// Instruction operands resolved to layout slots.
#[derive(Debug, Clone)]
enum CompiledInstr {
    Pick { target: usize },
    Write { register: usize, source: usize },
    Read { target: usize, register: usize },
    Compute { target: usize, expr: Expr, locals: Vec<(String, usize)> },
}

/// The bounded transition system of a protocol: state layout, compiled
/// instructions, and everything needed to enumerate states, steps, and
/// histories.
#[derive(Debug, Clone)]
pub struct Machine {
    protocol: Protocol,
    bound: i64,
    entries: Vec<LayoutEntry>,
    index: BTreeMap<String, usize>,
    compiled: Vec<Vec<CompiledInstr>>,
    pc_slots: Vec<usize>,
}

impl Machine {
    /// Compile a validated protocol at the given domain bound.
    pub fn new(protocol: Protocol, bound: i64) -> Result<Self, SemError> {
        if bound < 1 {
            return Err(SemError::BadBound(bound));
        }
        let report = validate_protocol(&protocol);
        if !report.is_valid() {
            return Err(SemError::InvalidProtocol(report.violations.join("; ")));
        }
        let mut entries = Vec::new();
        let mut index = BTreeMap::new();
        let mut push = |entries: &mut Vec<LayoutEntry>, name: &str, lo: i64, hi: i64| {
            index.insert(name.to_string(), entries.len());
            entries.push(LayoutEntry { name: name.to_string(), lo, hi });
        };
        for proc in &protocol.processes {
            for l in &proc.locals {
                let (lo, hi) = l.kind.range(bound);
                push(&mut entries, &l.name, lo, hi);
            }
        }
        for r in &protocol.registers {
            push(&mut entries, &r.name, 0, bound);
        }
        let mut pc_slots = Vec::new();
        for (i, proc) in protocol.processes.iter().enumerate() {
            let name = format!("PC_{i}");
            pc_slots.push(entries.len());
            push(&mut entries, &name, 1, proc.body.len() as i64 + 1);
        }
        let compiled = protocol
            .processes
            .iter()
            .map(|proc| {
                let locals: Vec<(String, usize)> = proc
                    .locals
                    .iter()
                    .map(|l| (l.name.clone(), index[&l.name]))
                    .collect();
                proc.body
                    .iter()
                    .map(|instr| match instr {
                        Instruction::Pick { target } => CompiledInstr::Pick {
                            target: index[target],
                        },
                        Instruction::Write { register, source } => CompiledInstr::Write {
                            register: index[register],
                            source: index[source],
                        },
                        Instruction::Read { target, register } => CompiledInstr::Read {
                            target: index[target],
                            register: index[register],
                        },
                        Instruction::Compute { target, expr } => CompiledInstr::Compute {
                            target: index[target],
                            expr: expr.clone(),
                            locals: locals.clone(),
                        },
                    })
                    .collect()
            })
            .collect();
        Ok(Machine {
            protocol,
            bound,
            entries,
            index,
            compiled,
            pc_slots,
        })
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Names of all state variables, in layout order.
    pub fn variable_names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    fn slot(&self, name: &str) -> Result<usize, SemError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| SemError::UnknownVariable(name.to_string()))
    }

    /// Read a state variable by name.
    pub fn value(&self, s: &GlobalState, name: &str) -> Result<i64, SemError> {
        Ok(s.values[self.slot(name)?])
    }

    /// All variables at the low end of their domains and program counters at
    /// line 1 — every local and register starts at 0.
    pub fn initial_state(&self) -> GlobalState {
        let values = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| if self.pc_slots.contains(&i) { 1 } else { e.lo.max(0).min(0) })
            .collect();
        GlobalState { values }
    }

    /// The initial state with the given variables overridden; rejects
    /// unknown names and out-of-domain values.
    pub fn state_with(&self, pairs: &[(&str, i64)]) -> Result<GlobalState, SemError> {
        let mut s = self.initial_state();
        for &(name, v) in pairs {
            let slot = self.slot(name)?;
            let e = &self.entries[slot];
            if v < e.lo || v > e.hi {
                return Err(SemError::OutOfDomain(name.to_string(), v));
            }
            s.values[slot] = v;
        }
        Ok(s)
    }

    /// Is every variable within its declared domain?
    pub fn well_typed(&self, s: &GlobalState) -> bool {
        s.values.len() == self.entries.len()
            && s.values
                .iter()
                .zip(&self.entries)
                .all(|(v, e)| e.lo <= *v && *v <= e.hi)
    }

    /// Number of well-typed states.
    pub fn state_count(&self) -> u64 {
        self.entries
            .iter()
            .map(|e| (e.hi - e.lo + 1) as u64)
            .product()
    }

    /// Iterate over every well-typed state, in odometer order.
    pub fn well_typed_states(&self) -> impl Iterator<Item = GlobalState> + '_ {
        StateIter {
            machine: self,
            current: Some(self.entries.iter().map(|e| e.lo).collect()),
        }
    }

    /// All steps some process can take from `s`. Pick instructions branch
    /// over every positive number up to the bound; the other instructions
    /// are deterministic.
    pub fn successors(&self, s: &GlobalState) -> Vec<GlobalStep> {
        let mut out = Vec::new();
        for (i, body) in self.compiled.iter().enumerate() {
            let pc = s.values[self.pc_slots[i]];
            if pc as usize > body.len() {
                continue; // terminated
            }
            let label = StepLabel { process: i, line: pc };
            let mut take = |mutate: &dyn Fn(&mut Vec<i64>)| {
                let mut values = s.values.clone();
                mutate(&mut values);
                values[self.pc_slots[i]] = pc + 1;
                out.push(GlobalStep {
                    pre: s.clone(),
                    post: GlobalState { values },
                    label,
                });
            };
            match &body[pc as usize - 1] {
                CompiledInstr::Pick { target } => {
                    for n in 1..=self.bound {
                        take(&|values: &mut Vec<i64>| values[*target] = n);
                    }
                }
                CompiledInstr::Write { register, source } => {
                    take(&|values: &mut Vec<i64>| values[*register] = values[*source]);
                }
                CompiledInstr::Read { target, register } => {
                    take(&|values: &mut Vec<i64>| values[*target] = values[*register]);
                }
                CompiledInstr::Compute { target, expr, locals } => {
                    let v = eval_expression_with(expr, &|name| {
                        locals
                            .iter()
                            .find(|(n, _)| n == name)
                            .map(|(_, slot)| s.values[*slot])
                    })
                    .expect("compiled expressions mention only declared locals");
                    take(&|values: &mut Vec<i64>| values[*target] = v);
                }
            }
        }
        out
    }

    /// Can some process take the system from `pre` to `post` in one step?
    pub fn is_step(&self, pre: &GlobalState, post: &GlobalState) -> bool {
        self.successors(pre).iter().any(|step| step.post == *post)
    }

    /// Every maximal run from the initial state, in deterministic order
    /// (process 0 before process 1, pick branches ascending).
    pub fn enumerate_histories(&self) -> Vec<History> {
        let mut out = Vec::new();
        let mut states = vec![self.initial_state()];
        let mut labels = Vec::new();
        self.history_dfs(&mut states, &mut labels, &mut out);
        out
    }

    fn history_dfs(
        &self,
        states: &mut Vec<GlobalState>,
        labels: &mut Vec<StepLabel>,
        out: &mut Vec<History>,
    ) {
        let succ = self.successors(states.last().expect("path is nonempty"));
        if succ.is_empty() {
            out.push(History {
                states: states.clone(),
                labels: labels.clone(),
            });
            return;
        }
        for step in succ {
            states.push(step.post);
            labels.push(step.label);
            self.history_dfs(states, labels, out);
            states.pop();
            labels.pop();
        }
    }

    /// Evaluate a sentential formula by name lookup; unknown variables are
    /// an error, not `false`.
    pub fn eval_sentential(&self, f: &StateFormula, s: &GlobalState) -> Result<bool, SemError> {
        Ok(self.compile(f)?.holds(s))
    }

    /// Resolve a sentential formula against this machine's layout.
    pub fn compile(&self, f: &StateFormula) -> Result<CompiledStateFormula, SemError> {
        Ok(CompiledStateFormula { repr: self.compile_inner(f)? })
    }

    fn compile_inner(&self, f: &StateFormula) -> Result<CFormula, SemError> {
        let term = |t: &StateTerm| -> Result<CTerm, SemError> {
            Ok(match t {
                StateTerm::Var(name) => CTerm::Slot(self.slot(name)?),
                StateTerm::Lit(n) => CTerm::Lit(*n),
            })
        };
        Ok(match f {
            StateFormula::Cmp(a, op, b) => CFormula::Cmp(term(a)?, *op, term(b)?),
            StateFormula::Not(g) => CFormula::Not(Box::new(self.compile_inner(g)?)),
            StateFormula::And(gs) => CFormula::And(
                gs.iter().map(|g| self.compile_inner(g)).collect::<Result<_, _>>()?,
            ),
            StateFormula::Or(gs) => CFormula::Or(
                gs.iter().map(|g| self.compile_inner(g)).collect::<Result<_, _>>()?,
            ),
            StateFormula::Implies(a, b) => CFormula::Implies(
                Box::new(self.compile_inner(a)?),
                Box::new(self.compile_inner(b)?),
            ),
        })
    }

    /// A state as a JSON object keyed by variable name.
    pub fn state_json(&self, s: &GlobalState) -> Value {
        let map: BTreeMap<&str, i64> = self
            .entries
            .iter()
            .map(|e| e.name.as_str())
            .zip(s.values.iter().copied())
            .collect();
        json!(map)
    }

    pub fn label_json(&self, l: &StepLabel) -> Value {
        json!({ "line": l.line, "process": l.process })
    }

    pub fn history_json(&self, h: &History) -> Value {
        json!({
            "labels": h.labels.iter().map(|l| self.label_json(l)).collect::<Vec<_>>(),
            "states": h.states.iter().map(|s| self.state_json(s)).collect::<Vec<_>>(),
        })
    }
}

struct StateIter<'a> {
    machine: &'a Machine,
    current: Option<Vec<i64>>,
}

impl Iterator for StateIter<'_> {
    type Item = GlobalState;

    fn next(&mut self) -> Option<GlobalState> {
        let values = self.current.take()?;
        let mut next = values.clone();
        let mut advanced = false;
        for (i, e) in self.machine.entries.iter().enumerate().rev() {
            if next[i] < e.hi {
                next[i] += 1;
                advanced = true;
                break;
            }
            next[i] = e.lo;
        }
        if advanced {
            self.current = Some(next);
        }
        Some(GlobalState { values })
    }
}

// ---------------------------------------------------------------------------
// The invariant for Kishon's game.
// ---------------------------------------------------------------------------

/// Per-process clause of the invariant, relating process `i`'s locals to its
/// own register:
///
/// 1. past the pick, the chosen number is positive;
/// 2. before the publish, the own register still holds 0;
/// 3. past the publish, the own register holds the chosen number;
/// 4. a nonzero observation equals the opponent's register;
/// 5. at termination, the verdict matches the decision rule on `v` and `n`.
pub fn process_clause(i: usize) -> StateFormula {
    let pc = format!("PC_{i}");
    let n = format!("n_{i}");
    let v = format!("v_{i}");
    let val = format!("val_{i}");
    let own_reg = format!("R_{i}");
    let other_reg = format!("R_{}", 1 - i);
    conj(vec![
        imp(
            atom(var(&pc), CmpOp::Ge, num(2)),
            atom(var(&n), CmpOp::Gt, num(0)),
        ),
        imp(
            atom(var(&pc), CmpOp::Le, num(2)),
            atom(var(&own_reg), CmpOp::Eq, num(0)),
        ),
        imp(
            atom(var(&pc), CmpOp::Ge, num(3)),
            atom(var(&own_reg), CmpOp::Eq, var(&n)),
        ),
        imp(
            atom(var(&v), CmpOp::Ne, num(0)),
            atom(var(&v), CmpOp::Eq, var(&other_reg)),
        ),
        imp(
            atom(var(&pc), CmpOp::Eq, num(5)),
            conj(vec![
                imp(
                    atom(var(&v), CmpOp::Eq, num(0)),
                    atom(var(&val), CmpOp::Eq, num(0)),
                ),
                imp(
                    atom(var(&v), CmpOp::Eq, var(&n)),
                    atom(var(&val), CmpOp::Eq, num(0)),
                ),
                imp(
                    conj(vec![
                        atom(var(&v), CmpOp::Gt, num(0)),
                        atom(var(&v), CmpOp::Lt, var(&n)),
                    ]),
                    atom(var(&val), CmpOp::Eq, num(1)),
                ),
                imp(
                    atom(var(&v), CmpOp::Gt, var(&n)),
                    atom(var(&val), CmpOp::Eq, num(-1)),
                ),
            ]),
        ),
    ])
}

/// Once both processes are past their reads, at least one of them observed
/// the opponent's final register value.
pub fn cross_clause() -> StateFormula {
    imp(
        conj(vec![
            atom(var("PC_0"), CmpOp::Ge, num(4)),
            atom(var("PC_1"), CmpOp::Ge, num(4)),
        ]),
        disj(vec![
            atom(var("v_0"), CmpOp::Eq, var("R_1")),
            atom(var("v_1"), CmpOp::Eq, var("R_0")),
        ]),
    )
}

/// Every state variable lies within its declared domain.
pub fn typing_clause(m: &Machine) -> StateFormula {
    conj(
        m.entries
            .iter()
            .flat_map(|e| {
                [
                    atom(var(&e.name), CmpOp::Ge, num(e.lo)),
                    atom(var(&e.name), CmpOp::Le, num(e.hi)),
                ]
            })
            .collect(),
    )
}

/// The full invariant: both per-process clauses, the cross clause, and
/// typing.
pub fn phi_invariant(m: &Machine) -> StateFormula {
    conj(vec![
        process_clause(0),
        process_clause(1),
        cross_clause(),
        typing_clause(m),
    ])
}

// ---------------------------------------------------------------------------
// Exhaustive checks.
// ---------------------------------------------------------------------------

/// Is `f` an inductive invariant? Checks that `f` holds in the initial
/// state and that every step from every well-typed state satisfying `f`
/// lands in a state satisfying `f` — quantifying over *all* well-typed
/// states, not only reachable ones.
pub fn check_inductive_invariant(
    m: &Machine,
    f: &StateFormula,
) -> Result<CheckOutcome, SemError> {
    let compiled = m.compile(f)?;
    let mut stats = CheckStats::default();
    let init = m.initial_state();
    if !compiled.holds(&init) {
        return Ok(CheckOutcome::fail(
            json!({ "reason": "violated in the initial state", "state": m.state_json(&init) }),
            stats,
        ));
    }
    for s in m.well_typed_states() {
        stats.states += 1;
        if !compiled.holds(&s) {
            continue;
        }
        for step in m.successors(&s) {
            stats.steps += 1;
            if !compiled.holds(&step.post) {
                return Ok(CheckOutcome::fail(
                    json!({
                        "reason": "not preserved by a step",
                        "pre": m.state_json(&step.pre),
                        "label": m.label_json(&step.label),
                        "post": m.state_json(&step.post),
                    }),
                    stats,
                ));
            }
        }
    }
    Ok(CheckOutcome::pass(stats))
}

/// The terminal-state lemma: in every well-typed state satisfying the
/// invariant with both processes terminated, equal picks give two zero
/// verdicts and the smaller pick gets the strictly smaller verdict.
pub fn check_final_state_lemma(m: &Machine) -> Result<CheckOutcome, SemError> {
    let phi = m.compile(&phi_invariant(m))?;
    let mut stats = CheckStats::default();
    let terminal = (m.protocol.processes[0].body.len() + 1) as i64;
    let slots = FinalSlots::resolve(m)?;
    for s in m.well_typed_states() {
        stats.states += 1;
        if !phi.holds(&s) {
            continue;
        }
        if s.values[slots.pc[0]] != terminal || s.values[slots.pc[1]] != terminal {
            continue;
        }
        if let Some(reason) = slots.trichotomy_violation(&s) {
            return Ok(CheckOutcome::fail(
                json!({ "reason": reason, "state": m.state_json(&s) }),
                stats,
            ));
        }
    }
    Ok(CheckOutcome::pass(stats))
}

struct FinalSlots {
    pc: [usize; 2],
    n: [usize; 2],
    val: [usize; 2],
}

impl FinalSlots {
    fn resolve(m: &Machine) -> Result<Self, SemError> {
        Ok(FinalSlots {
            pc: [m.slot("PC_0")?, m.slot("PC_1")?],
            n: [m.slot("n_0")?, m.slot("n_1")?],
            val: [m.slot("val_0")?, m.slot("val_1")?],
        })
    }

    /// `None` when the verdicts order exactly like the picks.
    fn trichotomy_violation(&self, s: &GlobalState) -> Option<&'static str> {
        let n = [s.values[self.n[0]], s.values[self.n[1]]];
        let val = [s.values[self.val[0]], s.values[self.val[1]]];
        if n[0] == n[1] && !(val[0] == 0 && val[1] == 0) {
            return Some("equal picks must both yield verdict 0");
        }
        if n[0] < n[1] && !(val[0] < val[1]) {
            return Some("the smaller pick must get the strictly smaller verdict");
        }
        if n[1] < n[0] && !(val[1] < val[0]) {
            return Some("the smaller pick must get the strictly smaller verdict");
        }
        None
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut result = 1u64;
    for i in 0..k {
        result = result * (n - i) / (i + 1);
    }
    result
}

/// The trichotomy theorem, by the direct route: enumerate every complete
/// history, compare the verdicts at the final state against the picks, and
/// assert the exact per-pick history count (the number of interleavings of
/// the two straight-line bodies).
pub fn check_theorem1(m: &Machine) -> Result<CheckOutcome, SemError> {
    let mut stats = CheckStats::default();
    let slots = FinalSlots::resolve(m)?;
    let mut per_pick: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for h in m.enumerate_histories() {
        stats.histories += 1;
        let s = h.final_state();
        if let Some(reason) = slots.trichotomy_violation(s) {
            return Ok(CheckOutcome::fail(
                json!({ "reason": reason, "history": m.history_json(&h) }),
                stats,
            ));
        }
        let picks = (s.values[slots.n[0]], s.values[slots.n[1]]);
        *per_pick.entry(picks).or_insert(0) += 1;
    }
    let l0 = m.protocol.processes[0].body.len() as u64;
    let l1 = m.protocol.processes[1].body.len() as u64;
    let expected = binomial(l0 + l1, l0);
    for n0 in 1..=m.bound {
        for n1 in 1..=m.bound {
            let count = per_pick.get(&(n0, n1)).copied().unwrap_or(0);
            if count != expected {
                return Ok(CheckOutcome::fail(
                    json!({
                        "reason": "unexpected history count for a pick pair",
                        "picks": [n0, n1],
                        "count": count,
                        "expected": expected,
                    }),
                    stats,
                ));
            }
        }
    }
    Ok(CheckOutcome::pass(stats))
}

/// The trichotomy theorem by the invariant route: the invariant is
/// inductive, the terminal-state lemma holds under it, and the direct
/// history sweep agrees.
pub fn check_theorem2(m: &Machine) -> Result<CheckOutcome, SemError> {
    let mut stats = CheckStats::default();
    for outcome in [
        check_inductive_invariant(m, &phi_invariant(m))?,
        check_final_state_lemma(m)?,
        check_theorem1(m)?,
    ] {
        stats.absorb(&outcome.stats);
        if !outcome.pass {
            return Ok(CheckOutcome {
                stats,
                ..outcome
            });
        }
    }
    Ok(CheckOutcome::pass(stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::kishon_protocol;

    fn machine(bound: i64) -> Machine {
        Machine::new(kishon_protocol(), bound).expect("the game protocol compiles")
    }

    #[test]
    fn layout_and_initial_state() {
        let m = machine(3);
        assert_eq!(
            m.variable_names(),
            ["n_0", "v_0", "val_0", "n_1", "v_1", "val_1", "R_0", "R_1", "PC_0", "PC_1"]
        );
        let init = m.initial_state();
        for name in ["n_0", "v_0", "val_0", "n_1", "v_1", "val_1", "R_0", "R_1"] {
            assert_eq!(m.value(&init, name).unwrap(), 0);
        }
        assert_eq!(m.value(&init, "PC_0").unwrap(), 1);
        assert_eq!(m.value(&init, "PC_1").unwrap(), 1);
        assert!(m.well_typed(&init));
    }

    #[test]
    fn state_count_is_the_domain_product() {
        // 4 naturals in {0..3} and 2 registers in {0..3}: 4^6; two verdicts:
        // 3^2; two program counters: 5^2.
        assert_eq!(machine(3).state_count(), 4096 * 9 * 25);
        assert_eq!(machine(1).state_count(), 64 * 9 * 25);
        assert_eq!(
            machine(3).well_typed_states().count() as u64,
            machine(3).state_count()
        );
    }

    #[test]
    fn initial_successors_are_the_picks() {
        let m = machine(3);
        let steps = m.successors(&m.initial_state());
        assert_eq!(steps.len(), 6);
        for step in &steps {
            assert_eq!(step.label.line, 1);
            let n = m
                .value(&step.post, &format!("n_{}", step.label.process))
                .unwrap();
            assert!(n > 0);
            assert!(m.well_typed(&step.post));
            assert!(m.is_step(&step.pre, &step.post));
        }
    }

    #[test]
    fn read_step_copies_the_register() {
        let m = machine(3);
        let s = m
            .state_with(&[("n_0", 2), ("R_0", 2), ("R_1", 3), ("n_1", 3), ("PC_0", 3), ("PC_1", 5)])
            .unwrap();
        let steps = m.successors(&s);
        assert_eq!(steps.len(), 1); // process 1 is terminated
        assert_eq!(steps[0].label, StepLabel { process: 0, line: 3 });
        assert_eq!(m.value(&steps[0].post, "v_0").unwrap(), 3);
        assert_eq!(m.value(&steps[0].post, "PC_0").unwrap(), 4);
        // Frame condition: nothing else moved.
        for name in ["n_0", "val_0", "n_1", "v_1", "val_1", "R_0", "R_1", "PC_1"] {
            assert_eq!(
                m.value(&steps[0].post, name).unwrap(),
                m.value(&s, name).unwrap(),
                "{name} must be untouched by the read"
            );
        }
    }

    #[test]
    fn terminated_state_has_no_successors() {
        let m = machine(2);
        let s = m.state_with(&[("PC_0", 5), ("PC_1", 5)]).unwrap();
        assert!(m.successors(&s).is_empty());
    }

    #[test]
    fn out_of_domain_state_is_rejected() {
        let m = machine(2);
        assert_eq!(
            m.state_with(&[("n_0", 7)]),
            Err(SemError::OutOfDomain("n_0".to_string(), 7))
        );
        assert!(matches!(
            m.state_with(&[("ghost", 0)]),
            Err(SemError::UnknownVariable(_))
        ));
    }

    #[test]
    fn every_successor_of_a_well_typed_state_is_well_typed() {
        let m = machine(2);
        for s in m.well_typed_states() {
            for step in m.successors(&s) {
                assert!(m.well_typed(&step.post));
            }
        }
    }

    #[test]
    fn history_counts_scale_with_the_square_of_the_bound() {
        for bound in 1..=3 {
            let m = machine(bound);
            let histories = m.enumerate_histories();
            assert_eq!(histories.len() as i64, 70 * bound * bound);
            for h in &histories {
                assert_eq!(h.states.len(), 9);
                assert_eq!(h.labels.len(), 8);
                assert!(m.successors(h.final_state()).is_empty());
            }
        }
    }

    #[test]
    fn histories_are_made_of_valid_steps() {
        let m = machine(1);
        for h in m.enumerate_histories() {
            assert_eq!(h.states[0], m.initial_state());
            for w in h.states.windows(2) {
                assert!(m.is_step(&w[0], &w[1]));
            }
        }
    }

    #[test]
    fn sentential_evaluation_and_errors() {
        let m = machine(3);
        let s = m.state_with(&[("n_0", 3), ("v_0", 2)]).unwrap();
        let f = atom(var("v_0"), CmpOp::Lt, var("n_0"));
        assert!(m.eval_sentential(&f, &s).unwrap());
        let g = atom(var("PC_0"), CmpOp::Le, num(2));
        assert!(m.eval_sentential(&g, &s).unwrap());
        assert!(matches!(
            m.eval_sentential(&atom(var("nope"), CmpOp::Eq, num(0)), &s),
            Err(SemError::UnknownVariable(_))
        ));
    }

    #[test]
    fn invariant_holds_initially_and_fails_on_a_crafted_state() {
        let m = machine(3);
        let phi = phi_invariant(&m);
        assert!(m.eval_sentential(&phi, &m.initial_state()).unwrap());
        // A nonzero observation that matches nothing: clause 4 is violated.
        let bad = m.state_with(&[("v_0", 1)]).unwrap();
        assert!(!m.eval_sentential(&phi, &bad).unwrap());
    }

    #[test]
    fn the_invariant_is_inductive_at_small_bounds() {
        for bound in 1..=2 {
            let m = machine(bound);
            let outcome = check_inductive_invariant(&m, &phi_invariant(&m)).unwrap();
            assert!(outcome.pass, "bound {bound}: {:?}", outcome.counterexample);
            assert_eq!(outcome.stats.states, m.state_count());
        }
    }

    #[test]
    fn typing_alone_is_inductive() {
        let m = machine(2);
        let outcome = check_inductive_invariant(&m, &typing_clause(&m)).unwrap();
        assert!(outcome.pass);
    }

    #[test]
    fn a_non_invariant_yields_a_step_counterexample() {
        let m = machine(2);
        let f = atom(var("R_0"), CmpOp::Eq, num(0));
        let outcome = check_inductive_invariant(&m, &f).unwrap();
        assert!(!outcome.pass);
        let cx = outcome.counterexample.unwrap();
        assert_eq!(cx["reason"], "not preserved by a step");
        assert_ne!(cx["post"]["R_0"], 0);
        // The offending step must really be a step of the machine.
        let pre = cx["pre"].as_object().unwrap();
        let pairs: Vec<(&str, i64)> = pre
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_i64().unwrap()))
            .collect();
        let pre_state = m.state_with(&pairs).unwrap();
        let post = cx["post"].as_object().unwrap();
        let pairs: Vec<(&str, i64)> = post
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_i64().unwrap()))
            .collect();
        let post_state = m.state_with(&pairs).unwrap();
        assert!(m.is_step(&pre_state, &post_state));
    }

    #[test]
    fn final_state_lemma_and_both_theorem_routes_pass() {
        let m = machine(2);
        assert!(check_final_state_lemma(&m).unwrap().pass);
        let t1 = check_theorem1(&m).unwrap();
        assert!(t1.pass);
        assert_eq!(t1.stats.histories, 280);
        assert!(check_theorem2(&m).unwrap().pass);
    }

    /// Replay of a specific overlapping round: player 0 picks 1, player 1
    /// picks 2, player 1 reads before player 0 has published. Player 1 sees
    /// 0 (undecided), player 0 sees 2 and loses.
    #[test]
    fn a_known_interleaving_reaches_the_expected_verdicts() {
        let m = machine(2);
        let script: [(usize, i64, Option<i64>); 8] = [
            (0, 1, Some(1)), // player 0 picks 1
            (1, 1, Some(2)), // player 1 picks 2
            (1, 2, None),    // player 1 publishes
            (1, 3, None),    // player 1 reads R_0 = 0
            (0, 2, None),    // player 0 publishes
            (0, 3, None),    // player 0 reads R_1 = 2
            (0, 4, None),    // player 0 decides
            (1, 4, None),    // player 1 decides
        ];
        let mut s = m.initial_state();
        for (process, line, pick) in script {
            let step = m
                .successors(&s)
                .into_iter()
                .find(|step| {
                    step.label == StepLabel { process, line }
                        && pick.is_none_or(|n| {
                            m.value(&step.post, &format!("n_{process}")).unwrap() == n
                        })
                })
                .expect("scripted step exists");
            s = step.post;
        }
        assert_eq!(m.value(&s, "val_0").unwrap(), -1);
        assert_eq!(m.value(&s, "val_1").unwrap(), 0);
        assert_eq!(m.value(&s, "v_1").unwrap(), 0);
        assert_eq!(m.value(&s, "v_0").unwrap(), 2);
    }

    /// On every reachable state with both reads done, at least one process
    /// observed the opponent's (by then final) register value.
    #[test]
    fn cross_clause_holds_on_all_reachable_states() {
        let m = machine(2);
        let cross = m.compile(&cross_clause()).unwrap();
        let mut checked = 0;
        for h in m.enumerate_histories() {
            for s in &h.states {
                if m.value(s, "PC_0").unwrap() >= 4 && m.value(s, "PC_1").unwrap() >= 4 {
                    assert!(cross.holds(s));
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn state_json_is_stable_and_complete() {
        let m = machine(2);
        let s = m.state_with(&[("n_0", 1), ("R_0", 1), ("PC_0", 3)]).unwrap();
        let j = m.state_json(&s);
        assert_eq!(j["n_0"], 1);
        assert_eq!(j["PC_0"], 3);
        assert_eq!(j.as_object().unwrap().len(), 10);
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            serde_json::to_string(&m.state_json(&s)).unwrap()
        );
    }
}
