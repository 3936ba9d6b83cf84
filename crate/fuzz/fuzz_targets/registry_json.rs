//! Fuzz the convention-registry loader (sequence strings, angle ranges).

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotconv::ConventionRegistry;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let mut registry = ConventionRegistry::with_builtins();
        let _ = registry.load_json(text);
    }
});
