#![no_main]

use libfuzzer_sys::fuzz_target;
use superlie::SuperAlgebra;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = SuperAlgebra::from_json(text) {
        if g.total_dim() > 6 {
            return;
        }
        let back = SuperAlgebra::from_json(&g.to_json()).expect("printed algebras parse");
        assert_eq!(back.structure_tensor(), g.structure_tensor());
        assert_eq!(g.check_jacobi().is_empty(), g.check_j1_j2().is_empty());
    }
});
