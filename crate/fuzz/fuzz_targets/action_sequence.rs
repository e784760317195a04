//! Fuzz the begin/end action-sequence decoder: arbitrary byte strings must
//! never panic it, and every accepted sequence must induce a genuine
//! interval order that realizes back to intervals.

#![no_main]

use kishon_core::orders::{order_from_action_sequence, realize_intervals, Action};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n_byte, rest)) = data.split_first() else {
        return;
    };
    let num_events = (n_byte as usize) % 7;
    let actions: Vec<Action> = rest
        .iter()
        .map(|&b| {
            let event = ((b >> 1) as usize) % num_events.max(1);
            if b & 1 == 0 {
                Action::Begin(event)
            } else {
                Action::End(event)
            }
        })
        .collect();
    if let Ok(order) = order_from_action_sequence(num_events, &actions) {
        assert!(order.is_russell_wiener());
        let realization = realize_intervals(&order).expect("interval orders realize");
        assert_eq!(realization.induced_order(), order);
    }
});
