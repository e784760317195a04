//! The verified algorithm as data: typed local variables, single-writer
//! registers, and straight-line instruction lists.
//!
//! Keeping the program text first-class (rather than hard-coding its
//! transition relation) lets the interleaved semantics in
//! [`crate::global_sem`] and the single-process semantics in
//! [`crate::nonrestricted`] execute *the same* program, and lets tests tamper
//! with the text to confirm that the validators notice.
//!
//! [`kishon_protocol`] builds the game under study: each player picks a
//! positive number, publishes it in their own register, reads the opponent's
//! register, and computes a verdict — `0` for a tie or an undecided round
//! (the opponent's number was not visible), `1` for a win, `-1` for a loss.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::fol::{CmpOp, ValidationReport};

/// Value domain of a local variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// Bounded natural number `0..=bound`.
    Nat,
    /// Verdict value in `{-1, 0, 1}`.
    Outcome,
}

impl VarKind {
    /// Inclusive value range under the given bound.
    pub fn range(self, bound: i64) -> (i64, i64) {
        match self {
            VarKind::Nat => (0, bound),
            VarKind::Outcome => (-1, 1),
        }
    }
}

/// A process-local variable declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDecl {
    pub name: String,
    pub kind: VarKind,
}

/// A shared single-writer register declaration. Registers hold bounded
/// naturals and start at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterDecl {
    pub name: String,
    pub writer: usize,
}

/// Boolean guards inside expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    Cmp(Expr, CmpOp, Expr),
    Any(Vec<Cond>),
    All(Vec<Cond>),
    Not(Box<Cond>),
}

/// Integer expressions over a process's local variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Lit(i64),
    Var(String),
    If(Box<Cond>, Box<Expr>, Box<Expr>),
}

/// One instruction; the program counter ranges over `1..=body.len() + 1`,
/// with the final value meaning "terminated".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    /// Nondeterministically choose a positive number for `target`.
    Pick { target: String },
    /// Publish the value of local `source` into an owned register.
    Write { register: String, source: String },
    /// Copy the current value of a register into local `target`.
    Read { target: String, register: String },
    /// Deterministically assign the value of `expr` to `target`.
    Compute { target: String, expr: Expr },
}

/// A single process: its locals and its straight-line body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessDef {
    pub locals: Vec<LocalDecl>,
    pub body: Vec<Instruction>,
}

/// A two-process shared-register program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protocol {
    pub registers: Vec<RegisterDecl>,
    pub processes: Vec<ProcessDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("variable `{0}` is not declared")]
    UndeclaredVariable(String),
}

/// Evaluate an expression, resolving variables through `lookup`.
pub fn eval_expression_with(
    e: &Expr,
    lookup: &impl Fn(&str) -> Option<i64>,
) -> Result<i64, ProtocolError> {
    match e {
        Expr::Lit(n) => Ok(*n),
        Expr::Var(name) => {
            lookup(name).ok_or_else(|| ProtocolError::UndeclaredVariable(name.clone()))
        }
        Expr::If(c, t, f) => {
            if eval_cond(c, lookup)? {
                eval_expression_with(t, lookup)
            } else {
                eval_expression_with(f, lookup)
            }
        }
    }
}

fn eval_cond(c: &Cond, lookup: &impl Fn(&str) -> Option<i64>) -> Result<bool, ProtocolError> {
    match c {
        Cond::Cmp(a, op, b) => Ok(op.test(
            eval_expression_with(a, lookup)?,
            eval_expression_with(b, lookup)?,
        )),
        Cond::Any(cs) => {
            for c in cs {
                if eval_cond(c, lookup)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Cond::All(cs) => {
            for c in cs {
                if !eval_cond(c, lookup)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Cond::Not(c) => Ok(!eval_cond(c, lookup)?),
    }
}

/// Evaluate an expression under a total assignment of the local variables.
pub fn eval_expression(e: &Expr, locals: &BTreeMap<String, i64>) -> Result<i64, ProtocolError> {
    eval_expression_with(e, &|name| locals.get(name).copied())
}

/// Names a process's variables for building state layouts.
pub fn local_names(p: &ProcessDef) -> Vec<&str> {
    p.locals.iter().map(|l| l.name.as_str()).collect()
}

/// Static sanity of a protocol: unique names, single-writer discipline,
/// and instructions that mention only declared variables and registers.
pub fn validate_protocol(p: &Protocol) -> ValidationReport {
    let mut violations = Vec::new();
    if p.processes.len() != 2 {
        violations.push(format!(
            "expected exactly 2 processes, found {}",
            p.processes.len()
        ));
    }
    let mut register_names = BTreeSet::new();
    for r in &p.registers {
        if !register_names.insert(r.name.as_str()) {
            violations.push(format!("register `{}` is declared twice", r.name));
        }
        if r.writer >= p.processes.len() {
            violations.push(format!(
                "register `{}` names process {} as writer, but there is no such process",
                r.name, r.writer
            ));
        }
    }
    let mut all_locals = BTreeSet::new();
    for (i, proc) in p.processes.iter().enumerate() {
        for l in &proc.locals {
            if !all_locals.insert(l.name.as_str()) {
                violations.push(format!("local `{}` is declared twice", l.name));
            }
        }
        if proc.body.is_empty() {
            violations.push(format!("process {i} has an empty body"));
        }
        let locals: BTreeSet<&str> = proc.locals.iter().map(|l| l.name.as_str()).collect();
        let check_local = |violations: &mut Vec<String>, name: &str, role: &str| {
            if !locals.contains(name) {
                violations.push(format!(
                    "process {i} {role} `{name}` is not one of its locals"
                ));
            }
        };
        for instr in &proc.body {
            match instr {
                Instruction::Pick { target } => check_local(&mut violations, target, "pick target"),
                Instruction::Write { register, source } => {
                    check_local(&mut violations, source, "write source");
                    match p.registers.iter().find(|r| r.name == *register) {
                        None => violations.push(format!(
                            "process {i} writes unknown register `{register}`"
                        )),
                        Some(r) if r.writer != i => violations.push(format!(
                            "process {i} writes register `{register}` owned by process {}",
                            r.writer
                        )),
                        Some(_) => {}
                    }
                }
                Instruction::Read { target, register } => {
                    check_local(&mut violations, target, "read target");
                    if !p.registers.iter().any(|r| r.name == *register) {
                        violations
                            .push(format!("process {i} reads unknown register `{register}`"));
                    }
                }
                Instruction::Compute { target, expr } => {
                    check_local(&mut violations, target, "compute target");
                    let mut vars = Vec::new();
                    collect_vars(expr, &mut vars);
                    for v in vars {
                        check_local(&mut violations, v, "expression variable");
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

fn collect_vars<'a>(e: &'a Expr, out: &mut Vec<&'a str>) {
    match e {
        Expr::Lit(_) => {}
        Expr::Var(name) => out.push(name),
        Expr::If(c, t, f) => {
            collect_cond_vars(c, out);
            collect_vars(t, out);
            collect_vars(f, out);
        }
    }
}

fn collect_cond_vars<'a>(c: &'a Cond, out: &mut Vec<&'a str>) {
    match c {
        Cond::Cmp(a, _, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        Cond::Any(cs) | Cond::All(cs) => cs.iter().for_each(|c| collect_cond_vars(c, out)),
        Cond::Not(c) => collect_cond_vars(c, out),
    }
}

/// The verdict rule of the game: `0` if the observed value is `0` or equals
/// the own number, `1` if it is smaller, `-1` if it is larger.
pub fn verdict_expr(read_var: &str, own_var: &str) -> Expr {
    let v = || Expr::Var(read_var.to_string());
    let n = || Expr::Var(own_var.to_string());
    Expr::If(
        Box::new(Cond::Any(vec![
            Cond::Cmp(v(), CmpOp::Eq, Expr::Lit(0)),
            Cond::Cmp(v(), CmpOp::Eq, n()),
        ])),
        Box::new(Expr::Lit(0)),
        Box::new(Expr::If(
            Box::new(Cond::Cmp(v(), CmpOp::Lt, n())),
            Box::new(Expr::Lit(1)),
            Box::new(Expr::Lit(-1)),
        )),
    )
}

/// Kishon's poker game: the two-player pick/publish/read/decide program.
pub fn kishon_protocol() -> Protocol {
    let process = |i: usize| {
        let n = format!("n_{i}");
        let v = format!("v_{i}");
        let val = format!("val_{i}");
        let own_reg = format!("R_{i}");
        let other_reg = format!("R_{}", 1 - i);
        ProcessDef {
            locals: vec![
                LocalDecl {
                    name: n.clone(),
                    kind: VarKind::Nat,
                },
                LocalDecl {
                    name: v.clone(),
                    kind: VarKind::Nat,
                },
                LocalDecl {
                    name: val.clone(),
                    kind: VarKind::Outcome,
                },
            ],
            body: vec![
                Instruction::Pick { target: n.clone() },
                Instruction::Write {
                    register: own_reg,
                    source: n.clone(),
                },
                Instruction::Read {
                    target: v.clone(),
                    register: other_reg,
                },
                Instruction::Compute {
                    target: val,
                    expr: verdict_expr(&v, &n),
                },
            ],
        }
    };
    Protocol {
        registers: vec![
            RegisterDecl {
                name: "R_0".to_string(),
                writer: 0,
            },
            RegisterDecl {
                name: "R_1".to_string(),
                writer: 1,
            },
        ],
        processes: vec![process(0), process(1)],
    }
}

/// Apply the verdict rule directly; the reference point for tests and for
/// event-based checks that do not go through [`Expr`] evaluation.
pub fn verdict(read_value: i64, own_number: i64) -> i64 {
    if read_value == 0 || read_value == own_number {
        0
    } else if read_value < own_number {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kishon_protocol_shape() {
        let p = kishon_protocol();
        assert_eq!(p.processes.len(), 2);
        assert_eq!(p.registers.len(), 2);
        for (i, proc) in p.processes.iter().enumerate() {
            assert_eq!(proc.body.len(), 4);
            assert!(matches!(&proc.body[0], Instruction::Pick { target } if *target == format!("n_{i}")));
            assert!(matches!(&proc.body[1], Instruction::Write { register, .. } if *register == format!("R_{i}")));
            assert!(matches!(&proc.body[2], Instruction::Read { register, .. } if *register == format!("R_{}", 1 - i)));
            assert!(matches!(&proc.body[3], Instruction::Compute { .. }));
        }
        assert!(validate_protocol(&p).is_valid());
    }

    #[test]
    fn verdict_expression_matches_the_rule() {
        let e = verdict_expr("v", "n");
        let cases = [
            // (v, n) -> verdict
            ((0, 3), 0),  // nothing observed yet: undecided
            ((3, 3), 0),  // same number: tie
            ((2, 3), 1),  // observed a smaller number: win
            ((3, 2), -1), // observed a larger number: loss
            ((1, 1), 0),
        ];
        for ((v, n), want) in cases {
            let locals: BTreeMap<String, i64> =
                [("v".to_string(), v), ("n".to_string(), n)].into_iter().collect();
            assert_eq!(eval_expression(&e, &locals).unwrap(), want, "v={v} n={n}");
            assert_eq!(verdict(v, n), want);
        }
    }

    #[test]
    fn undeclared_variable_is_an_error() {
        let e = Expr::Var("ghost".to_string());
        assert_eq!(
            eval_expression(&e, &BTreeMap::new()),
            Err(ProtocolError::UndeclaredVariable("ghost".to_string()))
        );
        let inside_if = verdict_expr("v", "n");
        let locals: BTreeMap<String, i64> = [("v".to_string(), 1)].into_iter().collect();
        assert!(eval_expression(&inside_if, &locals).is_err());
    }

    #[test]
    fn validation_catches_foreign_register_writes() {
        let mut p = kishon_protocol();
        // Redirect process 0's write to the opponent's register.
        p.processes[0].body[1] = Instruction::Write {
            register: "R_1".to_string(),
            source: "n_0".to_string(),
        };
        let report = validate_protocol(&p);
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("owned by process 1")));
    }

    #[test]
    fn validation_catches_undeclared_names() {
        let mut p = kishon_protocol();
        p.processes[1].body[0] = Instruction::Pick {
            target: "mystery".to_string(),
        };
        let report = validate_protocol(&p);
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.contains("mystery")));
    }

    proptest! {
        /// The expression tree and the direct rule agree everywhere, and the
        /// verdict always lands in {-1, 0, 1}.
        #[test]
        fn verdict_expression_total_and_in_range(v in 0i64..=20, n in 0i64..=20) {
            let e = verdict_expr("v", "n");
            let locals: BTreeMap<String, i64> =
                [("v".to_string(), v), ("n".to_string(), n)].into_iter().collect();
            let got = eval_expression(&e, &locals).unwrap();
            prop_assert_eq!(got, verdict(v, n));
            prop_assert!((-1..=1).contains(&got));
        }
    }
}
