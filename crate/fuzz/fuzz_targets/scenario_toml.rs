//! Totality of the scenario parser: arbitrary bytes must never panic it.
//! When parsing succeeds, the scenario's validation and re-serialization
//! must be panic-free too (returning errors is fine).

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(scenario) = lossywave::scenario::Scenario::from_toml(text) {
            let _ = scenario.validate();
            let _ = scenario.mesh();
            let _ = scenario.solver_config();
            let _ = scenario.to_toml();
        }
    }
});
