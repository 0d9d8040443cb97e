#![no_main]

use libfuzzer_sys::fuzz_target;
use safe_accel::config::parse_state;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_state(text) {
        assert!(s.is_finite());
    }
});
