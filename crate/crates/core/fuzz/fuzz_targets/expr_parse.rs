#![no_main]

use libfuzzer_sys::fuzz_target;
use superlie::scalars::rat_int;
use superlie::Expr;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if text.len() > 256 {
        return;
    }
    if let Ok(e) = Expr::parse(text) {
        let back = Expr::parse(&e.to_string()).expect("printed expressions parse");
        assert_eq!(back, e);
        let _ = e.eval(&rat_int(3));
    }
});
