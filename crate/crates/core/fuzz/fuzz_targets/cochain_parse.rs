#![no_main]

use libfuzzer_sys::fuzz_target;
use superlie::cohomology::Cochain2Even;

fuzz_target!(|data: &[u8]| {
    let Some((&shape, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let (m, n) = ((shape % 4) as usize, (shape / 4 % 4) as usize);
    if let Ok(c) = Cochain2Even::parse(m, n, text) {
        assert_eq!(Cochain2Even::parse(m, n, &c.to_string()).expect("printed cochains parse"), c);
    }
});
