//! Fuzz the augmentation-op grammar (`rotate:<deg>`, `flip:<deg>`, ...).

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotconv::AugmentOp;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = AugmentOp::parse(text, false);
        let _ = AugmentOp::parse(text, true);
    }
});
