#![no_main]

use fockdyn::io::read_prep_report;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    _ = read_prep_report(data);
});
