#![no_main]

use std::sync::Arc;

use invariant_ops::io::{self, SystemFile};
use invariant_ops::Error;
use libfuzzer_sys::fuzz_target;

const SPECTRUM: &str = r#"{"manifold_dim":1,"elliptic_order":2.0,"blocks":[
    {"eigenvalue":0.0,"multiplicity":1},{"eigenvalue":1.0,"multiplicity":2}]}"#;

fuzz_target!(|data: &str| {
    let spectrum = Arc::new(io::spectrum_from_json(SPECTRUM).unwrap());
    if let Ok(file) = SystemFile::from_json(data) {
        let _ = file.into_system(spectrum, |p| Err(Error::Format(format!("no file {p}"))));
    }
});
