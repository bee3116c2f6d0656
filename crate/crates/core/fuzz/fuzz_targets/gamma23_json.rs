#![no_main]

use libfuzzer_sys::fuzz_target;
use superlie::gamma23::{classify_pair, SymPair};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (g1, g2) = text.split_once('\n').unwrap_or((text, text));
    if let Ok(p) = SymPair::parse_json(g1, g2) {
        let _ = classify_pair(&p);
    }
});
