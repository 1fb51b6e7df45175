#![no_main]

use libfuzzer_sys::fuzz_target;
use understudy::experiments::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::from_toml(text) {
        cfg.validate().unwrap();
        let _ = cfg.train_config();
    }
});
