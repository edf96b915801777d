#![no_main]

use dctsteg::container::StegoContainer;
use dctsteg::engine::{extract, render, StegoArtifact};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(c) = StegoContainer::from_bytes(data) {
        assert_eq!(c.to_bytes(), data);
        let _ = render(&c);
        let _ = extract(&StegoArtifact::Container(c));
    }
});
