#![no_main]

use std::sync::{Arc, OnceLock};

use flowrank::dsl::{builtin_registry, compile, parse, render, Registry};
use flowrank::Index;
use libfuzzer_sys::fuzz_target;

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| {
        let ix = Index::build([("d1", "the quick brown fox"), ("d2", "lazy dog")]).unwrap();
        builtin_registry(Arc::new(ix))
    })
}

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let _ = parse(src);
    // Anything that compiles must render to something that compiles to the same text.
    if let Ok(node) = compile(src, registry()) {
        let text = render(&node);
        let again = compile(&text, registry()).expect("rendered pipeline compiles");
        assert_eq!(render(&again), text);
    }
});
