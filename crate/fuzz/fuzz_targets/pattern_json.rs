//! Fuzz the entry-pattern parser (cell constraint grammar inside JSON).

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotconv::EntryPattern;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = EntryPattern::parse_json(text);
    }
});
