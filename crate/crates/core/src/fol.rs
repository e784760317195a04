//! Finite first-order structures over an event sort, and formula evaluation.
//!
//! A [`FiniteStructure`] is a two-sorted Tarskian structure: finitely many
//! *events*, each carrying a data value through the function symbol `Val`, a
//! binary precedence relation `<` on events, unary event predicates, and a
//! handful of named data constants drawn from a bounded integer universe.
//! Quantifiers range over events only; data values appear solely through
//! `Val(x)`, constants, and integer literals, so sentences stay within the
//! fragment where exhaustive evaluation is exact.
//!
//! [`Formula`] is the abstract syntax for that fragment and
//! [`FiniteStructure::eval`] its evaluator. The evaluator never panics on a
//! malformed structure — unknown names and missing `Val` entries surface as
//! [`EvalError`] so that adversarial inputs (for example fuzzer-generated
//! JSON) are rejected rather than trusted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

/// Identifier of an event: which process issued it and its 1-based position
/// in that process's program order. Displayed as `a3` (process 0, third
/// event) or `b1` (process 1, first event).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId {
    pub process: u8,
    pub index: u8,
}

impl EventId {
    pub fn new(process: u8, index: u8) -> Self {
        EventId { process, index }
    }

    /// Parse a label of the form `a<digits>` or `b<digits>`.
    pub fn parse(label: &str) -> Result<Self, EvalError> {
        let mut chars = label.chars();
        let process = match chars.next() {
            Some('a') => 0,
            Some('b') => 1,
            _ => return Err(EvalError::BadEventLabel(label.to_string())),
        };
        let rest = chars.as_str();
        let index: u8 = rest
            .parse()
            .map_err(|_| EvalError::BadEventLabel(label.to_string()))?;
        Ok(EventId { process, index })
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = if self.process == 0 { 'a' } else { 'b' };
        write!(f, "{}{}", p, self.index)
    }
}

/// Comparison operators usable between data terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn test(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// A data-sorted term: the value of an event variable, a named constant, or
/// an integer literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataTerm {
    /// `Val(x)` for an event variable `x`.
    ValOf(String),
    /// A named data constant of the structure.
    Const(String),
    /// An integer literal.
    Lit(i64),
}

/// First-order formulas over the event sort.
///
/// There is no quantification over data: the only data-sorted atoms are
/// comparisons between [`DataTerm`]s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    /// `P(x)` for a unary event predicate `P`.
    Pred(String, String),
    /// `x < y` — temporal precedence between events.
    Less(String, String),
    /// `x = y` — identity of events.
    EventEq(String, String),
    /// Comparison of two data terms.
    Cmp(DataTerm, CmpOp, DataTerm),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

// Free-function builders so that formula construction reads close to the
// mathematical notation.

pub fn pred(name: &str, var: &str) -> Formula {
    Formula::Pred(name.to_string(), var.to_string())
}

pub fn less(a: &str, b: &str) -> Formula {
    Formula::Less(a.to_string(), b.to_string())
}

pub fn event_eq(a: &str, b: &str) -> Formula {
    Formula::EventEq(a.to_string(), b.to_string())
}

pub fn val(var: &str) -> DataTerm {
    DataTerm::ValOf(var.to_string())
}

pub fn cnst(name: &str) -> DataTerm {
    DataTerm::Const(name.to_string())
}

pub fn lit(n: i64) -> DataTerm {
    DataTerm::Lit(n)
}

pub fn cmp(a: DataTerm, op: CmpOp, b: DataTerm) -> Formula {
    Formula::Cmp(a, op, b)
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn and(fs: Vec<Formula>) -> Formula {
    Formula::And(fs)
}

pub fn or(fs: Vec<Formula>) -> Formula {
    Formula::Or(fs)
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn forall(var: &str, f: Formula) -> Formula {
    Formula::Forall(var.to_string(), Box::new(f))
}

pub fn exists(var: &str, f: Formula) -> Formula {
    Formula::Exists(var.to_string(), Box::new(f))
}

/// `x` and `y` overlap in time: neither precedes the other.
pub fn concurrent(a: &str, b: &str) -> Formula {
    not(or(vec![less(a, b), less(b, a)]))
}

/// Errors raised during formula evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("predicate `{0}` is not interpreted by the structure")]
    UnknownPredicate(String),
    #[error("constant `{0}` is not interpreted by the structure")]
    UnknownConstant(String),
    #[error("event `{0}` has no Val entry")]
    ValMissing(String),
    #[error("`{0}` is not a valid event label")]
    BadEventLabel(String),
    #[error("malformed structure JSON: {0}")]
    BadJson(String),
}

/// Vocabulary of a structure: which predicate and constant names it must
/// interpret. `Val` and `<` are always part of the language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeSet<String>,
    pub constants: BTreeSet<String>,
}

impl Signature {
    pub fn new<S: Into<String>>(
        predicates: impl IntoIterator<Item = S>,
        constants: impl IntoIterator<Item = S>,
    ) -> Self {
        Signature {
            predicates: predicates.into_iter().map(Into::into).collect(),
            constants: constants.into_iter().map(Into::into).collect(),
        }
    }

    /// Structural violations of `s` against this vocabulary, in addition to
    /// the signature-independent ones from [`check_structure`].
    pub fn check(&self, s: &FiniteStructure) -> ValidationReport {
        let mut report = check_structure(s);
        for name in s.predicates.keys() {
            if !self.predicates.contains(name) {
                report
                    .violations
                    .push(format!("predicate `{name}` is not in the signature"));
            }
        }
        for name in &self.predicates {
            if !s.predicates.contains_key(name) {
                report
                    .violations
                    .push(format!("predicate `{name}` is not interpreted"));
            }
        }
        for name in s.constants.keys() {
            if !self.constants.contains(name) {
                report
                    .violations
                    .push(format!("constant `{name}` is not in the signature"));
            }
        }
        for name in &self.constants {
            if !s.constants.contains_key(name) {
                report
                    .violations
                    .push(format!("constant `{name}` is not interpreted"));
            }
        }
        report
    }
}

/// Outcome of a structural well-formedness check: empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A finite two-sorted structure: events with precedence, predicates, and
/// data values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    /// The event universe.
    pub events: Vec<EventId>,
    /// The bounded data universe; every `Val` image and constant must lie in it.
    pub data_universe: BTreeSet<i64>,
    /// Interpretation of each unary event predicate.
    pub predicates: BTreeMap<String, BTreeSet<EventId>>,
    /// Interpretation of `<` as a set of ordered pairs.
    pub precedence: BTreeSet<(EventId, EventId)>,
    /// Interpretation of the function symbol `Val`, total on events.
    pub val: BTreeMap<EventId, i64>,
    /// Interpretation of the data constants.
    pub constants: BTreeMap<String, i64>,
}

/// The data universe `{-1, 0, ..., bound}` used throughout this crate.
pub fn data_universe(bound: i64) -> BTreeSet<i64> {
    (-1..=bound).collect()
}

impl FiniteStructure {
    /// The empty structure over a given data universe: no events, no
    /// predicates, no constants.
    pub fn empty(data_universe: BTreeSet<i64>) -> Self {
        FiniteStructure {
            events: Vec::new(),
            data_universe,
            predicates: BTreeMap::new(),
            precedence: BTreeSet::new(),
            val: BTreeMap::new(),
            constants: BTreeMap::new(),
        }
    }

    pub fn val_of(&self, e: EventId) -> Option<i64> {
        self.val.get(&e).copied()
    }

    pub fn precedes(&self, a: EventId, b: EventId) -> bool {
        self.precedence.contains(&(a, b))
    }

    /// Neither `a < b` nor `b < a`; distinct concurrent events overlap in time.
    pub fn concurrent(&self, a: EventId, b: EventId) -> bool {
        !self.precedes(a, b) && !self.precedes(b, a)
    }

    /// The substructure induced by the events satisfying `keep`. Predicates,
    /// precedence, and `Val` are restricted; the data universe and constants
    /// are carried over unchanged.
    pub fn restrict_events(&self, keep: impl Fn(EventId) -> bool) -> FiniteStructure {
        let events: Vec<EventId> = self.events.iter().copied().filter(|&e| keep(e)).collect();
        let set: BTreeSet<EventId> = events.iter().copied().collect();
        FiniteStructure {
            events,
            data_universe: self.data_universe.clone(),
            predicates: self
                .predicates
                .iter()
                .map(|(name, ext)| (name.clone(), ext.intersection(&set).copied().collect()))
                .collect(),
            precedence: self
                .precedence
                .iter()
                .copied()
                .filter(|(a, b)| set.contains(a) && set.contains(b))
                .collect(),
            val: self
                .val
                .iter()
                .filter(|(e, _)| set.contains(e))
                .map(|(e, v)| (*e, *v))
                .collect(),
            constants: self.constants.clone(),
        }
    }

    /// Evaluate a sentence (no free variables).
    pub fn eval_sentence(&self, f: &Formula) -> Result<bool, EvalError> {
        self.eval(f, &BTreeMap::new())
    }

    /// Evaluate `f` under an assignment of its free event variables.
    pub fn eval(&self, f: &Formula, env: &BTreeMap<String, EventId>) -> Result<bool, EvalError> {
        let mut scope: Vec<(String, EventId)> =
            env.iter().map(|(k, v)| (k.clone(), *v)).collect();
        self.eval_inner(f, &mut scope)
    }

    fn lookup(scope: &[(String, EventId)], var: &str) -> Result<EventId, EvalError> {
        scope
            .iter()
            .rev()
            .find(|(name, _)| name == var)
            .map(|(_, e)| *e)
            .ok_or_else(|| EvalError::UnboundVariable(var.to_string()))
    }

    fn eval_data_term(
        &self,
        t: &DataTerm,
        scope: &[(String, EventId)],
    ) -> Result<i64, EvalError> {
        match t {
            DataTerm::ValOf(var) => {
                let e = Self::lookup(scope, var)?;
                self.val_of(e).ok_or_else(|| EvalError::ValMissing(e.to_string()))
            }
            DataTerm::Const(name) => self
                .constants
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnknownConstant(name.clone())),
            DataTerm::Lit(n) => Ok(*n),
        }
    }

    fn eval_inner(
        &self,
        f: &Formula,
        scope: &mut Vec<(String, EventId)>,
    ) -> Result<bool, EvalError> {
        match f {
            Formula::Pred(name, var) => {
                let e = Self::lookup(scope, var)?;
                let ext = self
                    .predicates
                    .get(name)
                    .ok_or_else(|| EvalError::UnknownPredicate(name.clone()))?;
                Ok(ext.contains(&e))
            }
            Formula::Less(a, b) => {
                let ea = Self::lookup(scope, a)?;
                let eb = Self::lookup(scope, b)?;
                Ok(self.precedes(ea, eb))
            }
            Formula::EventEq(a, b) => {
                Ok(Self::lookup(scope, a)? == Self::lookup(scope, b)?)
            }
            Formula::Cmp(l, op, r) => {
                let lv = self.eval_data_term(l, scope)?;
                let rv = self.eval_data_term(r, scope)?;
                Ok(op.test(lv, rv))
            }
            Formula::Not(g) => Ok(!self.eval_inner(g, scope)?),
            Formula::And(gs) => {
                for g in gs {
                    if !self.eval_inner(g, scope)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.eval_inner(g, scope)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Implies(a, b) => {
                if self.eval_inner(a, scope)? {
                    self.eval_inner(b, scope)
                } else {
                    Ok(true)
                }
            }
            Formula::Forall(var, body) => {
                for i in 0..self.events.len() {
                    let e = self.events[i];
                    scope.push((var.clone(), e));
                    let r = self.eval_inner(body, scope);
                    scope.pop();
                    if !r? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Exists(var, body) => {
                for i in 0..self.events.len() {
                    let e = self.events[i];
                    scope.push((var.clone(), e));
                    let r = self.eval_inner(body, scope);
                    scope.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Canonical JSON form: stable key order, events as sorted labels,
    /// precedence as a sorted pair list.
    pub fn to_canonical_json(&self) -> Value {
        let mut events: Vec<EventId> = self.events.clone();
        events.sort();
        json!({
            "constants": self.constants,
            "data_universe": self.data_universe.iter().collect::<Vec<_>>(),
            "events": events.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "precedence": self
                .precedence
                .iter()
                .map(|(a, b)| vec![a.to_string(), b.to_string()])
                .collect::<Vec<_>>(),
            "predicates": self
                .predicates
                .iter()
                .map(|(name, ext)| {
                    (name.clone(), ext.iter().map(|e| e.to_string()).collect::<Vec<_>>())
                })
                .collect::<BTreeMap<_, _>>(),
            "val": self
                .val
                .iter()
                .map(|(e, v)| (e.to_string(), *v))
                .collect::<BTreeMap<_, _>>(),
        })
    }

    /// Parse the canonical JSON form. Inverse of [`Self::to_canonical_json`]
    /// up to event ordering. Rejects anything that does not fit the shape;
    /// semantic well-formedness is still [`check_structure`]'s job.
    pub fn from_canonical_json(v: &Value) -> Result<Self, EvalError> {
        let obj = v
            .as_object()
            .ok_or_else(|| EvalError::BadJson("top level must be an object".into()))?;
        let field = |name: &str| -> Result<&Value, EvalError> {
            obj.get(name)
                .ok_or_else(|| EvalError::BadJson(format!("missing field `{name}`")))
        };
        let as_label = |v: &Value| -> Result<EventId, EvalError> {
            let s = v
                .as_str()
                .ok_or_else(|| EvalError::BadJson("event label must be a string".into()))?;
            EventId::parse(s)
        };
        let as_i64 = |v: &Value| -> Result<i64, EvalError> {
            v.as_i64()
                .ok_or_else(|| EvalError::BadJson("expected an integer".into()))
        };
        let events = as_array(field("events")?)?
            .iter()
            .map(as_label)
            .collect::<Result<Vec<_>, _>>()?;
        let data_universe = as_array(field("data_universe")?)?
            .iter()
            .map(as_i64)
            .collect::<Result<BTreeSet<_>, _>>()?;
        let mut predicates = BTreeMap::new();
        for (name, ext) in as_object(field("predicates")?)? {
            let ext = as_array(ext)?
                .iter()
                .map(as_label)
                .collect::<Result<BTreeSet<_>, _>>()?;
            predicates.insert(name.clone(), ext);
        }
        let mut precedence = BTreeSet::new();
        for pair in as_array(field("precedence")?)? {
            let pair = as_array(pair)?;
            if pair.len() != 2 {
                return Err(EvalError::BadJson("precedence pair must have length 2".into()));
            }
            precedence.insert((as_label(&pair[0])?, as_label(&pair[1])?));
        }
        let mut val_map = BTreeMap::new();
        for (label, v) in as_object(field("val")?)? {
            val_map.insert(EventId::parse(label)?, as_i64(v)?);
        }
        let mut constants = BTreeMap::new();
        for (name, v) in as_object(field("constants")?)? {
            constants.insert(name.clone(), as_i64(v)?);
        }
        Ok(FiniteStructure {
            events,
            data_universe,
            predicates,
            precedence,
            val: val_map,
            constants,
        })
    }
}

fn as_array(v: &Value) -> Result<&Vec<Value>, EvalError> {
    v.as_array()
        .ok_or_else(|| EvalError::BadJson("expected an array".into()))
}

fn as_object(v: &Value) -> Result<&serde_json::Map<String, Value>, EvalError> {
    v.as_object()
        .ok_or_else(|| EvalError::BadJson("expected an object".into()))
}

/// Signature-independent well-formedness: predicates, precedence, and `Val`
/// mention only universe events; `Val` is total; all data lies in the data
/// universe. Returns every violation found, not just the first.
pub fn check_structure(s: &FiniteStructure) -> ValidationReport {
    let mut violations = Vec::new();
    let set: BTreeSet<EventId> = s.events.iter().copied().collect();
    if set.len() != s.events.len() {
        violations.push("duplicate event identifiers".to_string());
    }
    for (name, ext) in &s.predicates {
        for e in ext {
            if !set.contains(e) {
                violations.push(format!("predicate `{name}` mentions unknown event `{e}`"));
            }
        }
    }
    for (a, b) in &s.precedence {
        if !set.contains(a) || !set.contains(b) {
            violations.push(format!("precedence pair ({a}, {b}) mentions an unknown event"));
        }
    }
    for e in &s.events {
        match s.val.get(e) {
            None => violations.push(format!("Val is not defined on event `{e}`")),
            Some(v) if !s.data_universe.contains(v) => {
                violations.push(format!("Val({e}) = {v} lies outside the data universe"))
            }
            _ => {}
        }
    }
    for (e, _) in s.val.iter().filter(|(e, _)| !set.contains(*e)) {
        violations.push(format!("Val is defined on unknown event `{e}`"));
    }
    for (name, v) in &s.constants {
        if !s.data_universe.contains(v) {
            violations.push(format!("constant `{name}` = {v} lies outside the data universe"));
        }
    }
    ValidationReport { violations }
}

/// Is `<` a strict partial order satisfying the interval-order axiom?
///
/// This is the native (procedural) twin of evaluating
/// [`system_execution_sentence`]; tests assert the two routes agree.
pub fn is_system_execution(s: &FiniteStructure) -> bool {
    for &e in &s.events {
        if s.precedes(e, e) {
            return false;
        }
    }
    for &(a, b) in &s.precedence {
        for &(c, d) in &s.precedence {
            if b == c && !s.precedes(a, d) {
                return false;
            }
        }
    }
    russell_wiener_holds(s)
}

/// Native check of the interval-order axiom: whenever `a < b`, `c < d`, and
/// `c` does not precede `b`, then `a < d`.
pub fn russell_wiener_holds(s: &FiniteStructure) -> bool {
    for &(a, b) in &s.precedence {
        for &(c, d) in &s.precedence {
            if !s.precedes(c, b) && !s.precedes(a, d) {
                return false;
            }
        }
    }
    true
}

/// The interval-order axiom as a sentence:
/// `forall a b c d. (a<b and c<d and not c<b) implies a<d`.
pub fn russell_wiener_sentence() -> Formula {
    forall(
        "a",
        forall(
            "b",
            forall(
                "c",
                forall(
                    "d",
                    implies(
                        and(vec![less("a", "b"), less("c", "d"), not(less("c", "b"))]),
                        less("a", "d"),
                    ),
                ),
            ),
        ),
    )
}

/// Irreflexivity and transitivity of `<` as a sentence.
pub fn strict_partial_order_sentence() -> Formula {
    and(vec![
        forall("a", not(less("a", "a"))),
        forall(
            "a",
            forall(
                "b",
                forall(
                    "c",
                    implies(and(vec![less("a", "b"), less("b", "c")]), less("a", "c")),
                ),
            ),
        ),
    ])
}

/// The full system-execution condition as a single sentence.
pub fn system_execution_sentence() -> Formula {
    and(vec![strict_partial_order_sentence(), russell_wiener_sentence()])
}
