#![no_main]

use dctsteg::image::{read_pgm, write_pgm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = read_pgm(data) {
        let canonical = write_pgm(&img);
        assert_eq!(read_pgm(&canonical).as_ref(), Ok(&img));
    }
});
