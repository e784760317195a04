//! Fuzz the run-configuration decoder: arbitrary JSON must be either
//! rejected or resolved without panicking, and resolved configs must be
//! within their documented ranges.

#![no_main]

use kishon_cli::{resolve_config, ConfigLayer};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(layer) = serde_json::from_str::<ConfigLayer>(text) else {
        return;
    };
    if let Ok(config) = resolve_config(layer) {
        assert!(config.bound >= 1);
        assert!(config.process.is_none_or(|p| p <= 1));
    }
});
