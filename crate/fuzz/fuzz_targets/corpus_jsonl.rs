#![no_main]

use flowrank::index::parse_corpus;
use flowrank::Index;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(docs) = parse_corpus(src) {
        let _ = Index::build(docs);
    }
});
