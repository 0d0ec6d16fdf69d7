#![no_main]

use flowrank::Index;
use libfuzzer_sys::fuzz_target;

// Input is meta, docs and postings separated by NUL bytes.
fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let mut parts = src.splitn(3, '\0');
    let (Some(meta), Some(docs), Some(postings)) = (parts.next(), parts.next(), parts.next()) else {
        return;
    };
    if let Ok(ix) = Index::from_files(meta, docs, postings) {
        let _ = ix.stats();
    }
});
