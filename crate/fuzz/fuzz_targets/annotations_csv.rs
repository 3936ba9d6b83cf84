//! Fuzz the CSV annotation parser: arbitrary bytes must never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotconv::ConventionRegistry;
use std::sync::LazyLock;

static REGISTRY: LazyLock<ConventionRegistry> = LazyLock::new(ConventionRegistry::with_builtins);

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = rotconv::parse_annotations_csv(text, &REGISTRY);
    }
});
