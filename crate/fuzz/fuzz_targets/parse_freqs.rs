#![no_main]

use libfuzzer_sys::fuzz_target;
use safe_accel::config::parse_freqs;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_freqs(text) {
        assert!(f.iter().all(|x| x.is_finite() && *x > 0.0));
    }
});
