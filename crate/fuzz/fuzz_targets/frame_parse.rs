#![no_main]

use dctsteg::bits::Bitstream;
use dctsteg::frame::parse_frame;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let bits = Bitstream::from_bytes(data, data.len() * 8).expect("whole bytes");
    if let Ok(parsed) = parse_frame(&bits) {
        if let Ok(secret) = parsed.decode_secret() {
            assert_eq!(secret.len(), parsed.header.symbol_count as usize);
        }
    }
});
