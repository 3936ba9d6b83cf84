//! Fuzz the keypoint-set parser used by the alignment pipeline.

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotconv::KeypointSet;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = KeypointSet::parse_json(text);
    }
});
