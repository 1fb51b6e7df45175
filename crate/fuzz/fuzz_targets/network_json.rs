#![no_main]

use libfuzzer_sys::fuzz_target;
use understudy::bn::io::{network_from_json, network_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = network_from_json(text) {
        // anything accepted must survive a round trip unchanged
        let again = network_from_json(&network_to_json(&net).unwrap()).unwrap();
        assert_eq!(net.free_parameters(), again.free_parameters());
        assert_eq!(net.dag().edges(), again.dag().edges());
    }
});
