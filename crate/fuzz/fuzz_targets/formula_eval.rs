//! Fuzz the formula evaluator: on arbitrary structures and formulas the
//! evaluator must never panic, and a formula and its negation must be
//! consistently evaluable with opposite values.

#![no_main]

use arbitrary::Unstructured;
use kishon_core::fol::{
    and, cmp, cnst, data_universe, event_eq, exists, forall, implies, less, lit, not, or, pred,
    val, CmpOp, DataTerm, EventId, FiniteStructure, Formula,
};
use libfuzzer_sys::fuzz_target;

const VARS: [&str; 3] = ["x", "y", "z"];
const PREDS: [&str; 2] = ["P", "Q"];

fn arb_structure(u: &mut Unstructured) -> arbitrary::Result<FiniteStructure> {
    let bound = u.int_in_range(0..=3)?;
    let mut s = FiniteStructure::empty(data_universe(bound));
    let n = u.int_in_range(0..=5usize)?;
    s.events = (0..n)
        .map(|i| EventId::new((i % 2) as u8, (i / 2) as u8 + 1))
        .collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && u.ratio(1u8, 3u8)? {
                s.precedence.insert((s.events[i], s.events[j]));
            }
        }
    }
    for name in PREDS {
        let mut extension = std::collections::BTreeSet::new();
        for &e in &s.events {
            if u.ratio(1u8, 2u8)? {
                extension.insert(e);
            }
        }
        s.predicates.insert(name.to_string(), extension);
    }
    for &e in &s.events {
        if u.ratio(3u8, 4u8)? {
            s.val.insert(e, u.int_in_range(-1..=bound)?);
        }
    }
    if u.ratio(1u8, 2u8)? {
        s.constants.insert("c".to_string(), u.int_in_range(-1..=bound)?);
    }
    Ok(s)
}

fn arb_var(u: &mut Unstructured) -> arbitrary::Result<&'static str> {
    Ok(VARS[u.int_in_range(0..=2usize)?])
}

fn arb_term(u: &mut Unstructured) -> arbitrary::Result<DataTerm> {
    Ok(match u.int_in_range(0..=2u8)? {
        0 => val(arb_var(u)?),
        1 => cnst("c"),
        _ => lit(u.int_in_range(-2..=4)?),
    })
}

fn arb_op(u: &mut Unstructured) -> arbitrary::Result<CmpOp> {
    const OPS: [CmpOp; 6] = [
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Gt,
        CmpOp::Ge,
    ];
    Ok(OPS[u.int_in_range(0..=5usize)?])
}

fn arb_formula(u: &mut Unstructured, depth: u8) -> arbitrary::Result<Formula> {
    let leaf_only = depth >= 4 || u.is_empty();
    let choice = if leaf_only {
        u.int_in_range(0..=3u8)?
    } else {
        u.int_in_range(0..=9u8)?
    };
    Ok(match choice {
        0 => pred(PREDS[u.int_in_range(0..=1usize)?], arb_var(u)?),
        1 => less(arb_var(u)?, arb_var(u)?),
        2 => event_eq(arb_var(u)?, arb_var(u)?),
        3 => cmp(arb_term(u)?, arb_op(u)?, arb_term(u)?),
        4 => not(arb_formula(u, depth + 1)?),
        5 => and(vec![arb_formula(u, depth + 1)?, arb_formula(u, depth + 1)?]),
        6 => or(vec![arb_formula(u, depth + 1)?, arb_formula(u, depth + 1)?]),
        7 => implies(arb_formula(u, depth + 1)?, arb_formula(u, depth + 1)?),
        8 => forall(arb_var(u)?, arb_formula(u, depth + 1)?),
        _ => exists(arb_var(u)?, arb_formula(u, depth + 1)?),
    })
}

fuzz_target!(|data: &[u8]| {
    let mut u = Unstructured::new(data);
    let Ok(structure) = arb_structure(&mut u) else {
        return;
    };
    let Ok(formula) = arb_formula(&mut u, 0) else {
        return;
    };
    let direct = structure.eval_sentence(&formula);
    let negated = structure.eval_sentence(&not(formula));
    match (direct, negated) {
        (Ok(a), Ok(b)) => assert_ne!(a, b, "negation must flip the value"),
        (Err(_), Err(_)) => {}
        (a, b) => panic!("negation changed evaluability: {a:?} vs {b:?}"),
    }
});
