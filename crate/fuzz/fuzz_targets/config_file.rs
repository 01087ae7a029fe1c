#![no_main]

use indexlab_cli::config::{parse_config, RunConfig, CONFIG_KEYS};
use indexlab_cli::CommonArgs;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let Ok(map) = parse_config(text) else {
        return;
    };
    assert!(map.keys().all(|k| CONFIG_KEYS.contains(&k.as_str())));
    if let Ok(cfg) = RunConfig::from_sources(&CommonArgs::default(), None, &map) {
        assert!(!cfg.grid.is_empty());
        assert!(cfg.control.validate().is_ok());
    }
});
