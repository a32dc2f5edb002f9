#![no_main]

use std::sync::Arc;

use invariant_ops::io::{self, FieldFile};
use libfuzzer_sys::fuzz_target;

const SPECTRUM: &str = r#"{"manifold_dim":2,"elliptic_order":2.0,"blocks":[
    {"eigenvalue":0.0,"multiplicity":1},{"eigenvalue":2.0,"multiplicity":3},{"eigenvalue":6.0,"multiplicity":5}]}"#;

fuzz_target!(|data: &str| {
    let spectrum = Arc::new(io::spectrum_from_json(SPECTRUM).unwrap());
    if let Ok(file) = FieldFile::from_json(data) {
        if let Ok(u) = file.into_field_unverified(spectrum) {
            let _ = u.sobolev_norm(1.0);
            let _ = u.decay_classify(0.5, 10.0, 2);
        }
    }
});
