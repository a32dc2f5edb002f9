#![no_main]

use std::sync::Arc;

use invariant_ops::io::{self, SymbolFile};
use invariant_ops::ZeroTol;
use libfuzzer_sys::fuzz_target;

const SPECTRUM: &str = r#"{"manifold_dim":1,"elliptic_order":2.0,"blocks":[
    {"eigenvalue":0.0,"multiplicity":1},{"eigenvalue":1.0,"multiplicity":2},{"eigenvalue":4.0,"multiplicity":2}]}"#;

fuzz_target!(|data: &str| {
    let spectrum = Arc::new(io::spectrum_from_json(SPECTRUM).unwrap());
    if let Ok(file) = SymbolFile::from_json(data) {
        if let Ok(p) = file.into_symbol_unverified(spectrum) {
            let _ = p.is_normal(1e-9);
            for k in 0..3 {
                let _ = p.restricted_gain(k, &ZeroTol::default());
            }
        }
    }
});
