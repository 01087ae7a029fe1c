#![no_main]

use indexlab_cli::parse::{parse_grid, validate_grid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(points) = parse_grid(text) {
        assert!(validate_grid(&points).is_ok(), "{text:?} -> {points:?}");
    }
});
