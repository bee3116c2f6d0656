#![no_main]

use libfuzzer_sys::fuzz_target;
use superlie::catalog::Catalog;
use superlie::orbitrel::{verify_in_catalog, DegenerationWitness};
use superlie::scalars::rat_int;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = DegenerationWitness::from_json(text) {
        let _ = verify_in_catalog(Catalog::builtin(), &w, &rat_int(2));
    }
});
