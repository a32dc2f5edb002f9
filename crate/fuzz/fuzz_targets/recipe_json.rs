#![no_main]

use std::sync::Arc;

use invariant_ops::io;
use invariant_ops::models::{synthetic_symbol, Recipe};
use libfuzzer_sys::fuzz_target;

const SPECTRUM: &str = r#"{"manifold_dim":2,"elliptic_order":2.0,"blocks":[
    {"eigenvalue":0.0,"multiplicity":1},{"eigenvalue":2.0,"multiplicity":3}]}"#;

fuzz_target!(|data: &str| {
    let spectrum = Arc::new(io::spectrum_from_json(SPECTRUM).unwrap());
    if let Ok(recipe) = serde_json::from_str::<Recipe>(data) {
        let _ = synthetic_symbol(&spectrum, &recipe, 0);
    }
});
