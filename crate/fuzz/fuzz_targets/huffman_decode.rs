#![no_main]

use dctsteg::bits::Bitstream;
use dctsteg::huffman::{decode, encode, HuffmanTable, ALPHABET};
use libfuzzer_sys::fuzz_target;

// Input: one length byte per symbol for the first 16 symbols, a u16 symbol
// count, then the code stream.
fuzz_target!(|data: &[u8]| {
    if data.len() < 18 {
        return;
    }
    let mut lengths = [0u8; ALPHABET];
    for (l, &b) in lengths.iter_mut().zip(&data[..16]) {
        *l = b % 20;
    }
    let Ok(table) = HuffmanTable::from_lengths(lengths) else {
        return;
    };
    let count = usize::from(u16::from_be_bytes([data[16], data[17]]));
    let body = &data[18..];
    let bits = Bitstream::from_bytes(body, body.len() * 8).expect("whole bytes");
    if let Ok(symbols) = decode(&bits, &table, count) {
        assert_eq!(symbols.len(), count);
        assert_eq!(encode(&symbols, &table).as_ref(), Ok(&bits));
    }
});
