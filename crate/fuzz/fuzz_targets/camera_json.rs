//! Fuzz the camera-extrinsic parser (rotation must be validated, not trusted).

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotconv::CameraExtrinsic;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = CameraExtrinsic::parse_json(text);
    }
});
