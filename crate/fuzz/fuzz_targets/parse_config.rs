#![no_main]

use libfuzzer_sys::fuzz_target;

// The configuration parser is the only surface that consumes untrusted
// bytes; it must reject garbage without panicking, and accepted documents
// must build a model without panicking either.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = simma::config::parse_config(text) {
        let _ = config.model();
        let _ = config.sim_plan();
        let _ = config.resolved_value();
    }
});
