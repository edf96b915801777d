#![no_main]

use dctsteg::engine::{extract, StegoArtifact};
use dctsteg::image::read_pgm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = read_pgm(data) {
        if let Some(img) = img.into_gray8() {
            let _ = extract(&StegoArtifact::Image(img));
        }
    }
});
