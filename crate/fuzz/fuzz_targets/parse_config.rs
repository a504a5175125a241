#![no_main]

use libfuzzer_sys::fuzz_target;
use sampboost::boost::BoostConfig;
use sampboost_cli::config::ConfigEcho;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = serde_json::from_str::<BoostConfig>(text) {
        if cfg.validate().is_ok() {
            let _ = cfg.schedule(10, 2);
        }
    }
    if let Ok(echo) = serde_json::from_str::<ConfigEcho>(text) {
        let again: ConfigEcho = serde_json::from_str(&serde_json::to_string(&echo).unwrap()).expect("round trip");
        assert_eq!(again, echo);
    }
});
