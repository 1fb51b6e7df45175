#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use understudy::bn::io::{network_from_json, read_dataset_from, write_dataset_to};
use understudy::bn::DiscreteBayesNet;

fn asia() -> &'static DiscreteBayesNet {
    static NET: OnceLock<DiscreteBayesNet> = OnceLock::new();
    NET.get_or_init(|| network_from_json(include_str!("../../data/asia.json")).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let dag = asia().dag();
    if let Ok(ds) = read_dataset_from(data, dag) {
        ds.validate(dag).unwrap();
        let mut out = Vec::new();
        write_dataset_to(&mut out, dag, &ds).unwrap();
        assert_eq!(read_dataset_from(out.as_slice(), dag).unwrap().records, ds.records);
    }
});
