//! Fuzz the canonical-JSON structure decoder: arbitrary bytes must never
//! panic it, and anything it accepts must print and reparse to a fixed
//! point.

#![no_main]

use kishon_core::fol::FiniteStructure;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(value) = serde_json::from_str::<serde_json::Value>(text) else {
        return;
    };
    if let Ok(parsed) = FiniteStructure::from_canonical_json(&value) {
        let printed = parsed.to_canonical_json();
        let reparsed =
            FiniteStructure::from_canonical_json(&printed).expect("canonical output reparses");
        assert_eq!(reparsed.to_canonical_json(), printed);
    }
});
