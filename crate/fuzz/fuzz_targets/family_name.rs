#![no_main]

use indexlab::kernels::TransformFamily;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(family) = text.parse::<TransformFamily>() {
        // accepted names are valid and print back to themselves
        assert!(family.validate().is_ok(), "{text:?} parsed to invalid {family:?}");
        let again: TransformFamily = family.to_string().parse().expect("display form must parse");
        assert_eq!(again, family);
    }
});
