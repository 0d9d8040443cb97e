#![no_main]

use libfuzzer_sys::fuzz_target;
use safe_accel::config::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_config(text) {
        // anything accepted must survive a round trip
        assert_eq!(parse_config(&c.to_json()).unwrap(), c);
    }
});
