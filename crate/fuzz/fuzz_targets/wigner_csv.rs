#![no_main]

use fockdyn::io::{read_wigner_csv, write_wigner_csv};
use libfuzzer_sys::fuzz_target;

// Anything the reader accepts must survive a write/read cycle unchanged.
fuzz_target!(|data: &[u8]| {
    if let Ok(grid) = read_wigner_csv(data) {
        let mut buf = Vec::new();
        write_wigner_csv(&mut buf, &grid).unwrap();
        let again = read_wigner_csv(buf.as_slice()).unwrap();
        assert_eq!(again.values(), grid.values());
        assert_eq!((again.spec().nx, again.spec().np), (grid.spec().nx, grid.spec().np));
    }
});
