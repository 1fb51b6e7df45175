#![no_main]

use libfuzzer_sys::fuzz_target;
use understudy::nn::Checkpoint;
use understudy::understudy::UnderstudyModel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ck) = Checkpoint::from_json(text) {
        // shape errors must surface as errors, never as panics
        if let Ok(model) = UnderstudyModel::from_checkpoint(&ck) {
            assert_eq!(model.params.k(), model.layout.width());
        }
        let _ = ck.to_json();
    }
});
