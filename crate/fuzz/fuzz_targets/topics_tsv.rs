#![no_main]

use flowrank::frames::parse_topics;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        let _ = parse_topics(src);
    }
});
