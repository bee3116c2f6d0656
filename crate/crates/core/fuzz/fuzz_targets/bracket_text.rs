#![no_main]

use libfuzzer_sys::fuzz_target;
use superlie::{FieldElem, SuperAlgebra};

fuzz_target!(|data: &[u8]| {
    let Some((&shape, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let (m, n) = ((shape % 4) as usize, (shape / 4 % 4) as usize);
    if let Ok(g) = SuperAlgebra::parse_brackets(m, n, text, &FieldElem::one()) {
        let back = SuperAlgebra::parse_brackets(m, n, &g.brackets_text(), &FieldElem::one()).expect("printed brackets parse");
        assert_eq!(back.structure_tensor(), g.structure_tensor());
    }
});
