#![no_main]

use dctsteg::bits::Bitstream;
use dctsteg::huffman::{parse_table, serialize_table, TABLE_BITS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let data = &data[..data.len().min(TABLE_BITS / 8)];
    let bits = Bitstream::from_bytes(data, data.len() * 8).expect("whole bytes");
    if let Ok(table) = parse_table(&bits) {
        assert_eq!(serialize_table(&table), bits);
    }
});
