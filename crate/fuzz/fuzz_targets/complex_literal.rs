#![no_main]

use indexlab_cli::parse::parse_complex;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(z) = parse_complex(text) {
        assert!(z.re.is_finite() && z.im.is_finite(), "{text:?} -> {z}");
        let again = parse_complex(&format!("({:?},{:?})", z.re, z.im)).expect("pair form must parse");
        assert_eq!(again, z);
    }
});
