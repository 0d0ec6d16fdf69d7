#![no_main]

use std::sync::{Arc, OnceLock};

use flowrank::dsl::{builtin_registry, compile};
use flowrank::mcp::{McpService, ServerConfig};
use flowrank::Index;
use libfuzzer_sys::fuzz_target;

const TOY5: [(&str, &str); 5] = [
    ("d1", "the quick brown fox"),
    ("d2", "the lazy dog"),
    ("d3", "quick quick fox"),
    ("d4", "brown dog barks"),
    ("d5", "fox jumps over the lazy dog"),
];

fn service() -> &'static McpService {
    static SVC: OnceLock<McpService> = OnceLock::new();
    SVC.get_or_init(|| {
        let reg = builtin_registry(Arc::new(Index::build(TOY5).unwrap()));
        let mut config = ServerConfig::new();
        config
            .register("search", compile("bm25", &reg).unwrap(), "BM25 search")
            .unwrap()
            .register(
                "rag",
                compile("bm25 >> text_loader >> answer", &reg).unwrap(),
                "answers",
            )
            .unwrap();
        McpService::new(&config)
    })
}

fuzz_target!(|data: &[u8]| {
    let _ = service().handle(data);
});
