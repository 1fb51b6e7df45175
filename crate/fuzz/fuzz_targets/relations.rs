#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use understudy::bn::io::network_from_json;
use understudy::bn::DiscreteBayesNet;
use understudy::dsep::{parse_relations, relations_to_text};

fn asia() -> &'static DiscreteBayesNet {
    static NET: OnceLock<DiscreteBayesNet> = OnceLock::new();
    NET.get_or_init(|| network_from_json(include_str!("../../data/asia.json")).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let dag = asia().dag();
    if let Ok(rels) = parse_relations(text, dag) {
        assert_eq!(parse_relations(&relations_to_text(&rels, dag), dag).unwrap(), rels);
    }
});
