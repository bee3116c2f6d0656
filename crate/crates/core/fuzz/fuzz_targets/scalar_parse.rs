#![no_main]

use libfuzzer_sys::fuzz_target;
use superlie::FieldElem;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(x) = FieldElem::parse(text) {
        let back = FieldElem::parse(&x.to_string()).expect("printed scalars parse");
        assert_eq!(back, x);
    }
});
