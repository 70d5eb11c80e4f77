#![no_main]

use fockdyn::io::{read_sweep_csv, write_sweep_csv};
use libfuzzer_sys::fuzz_target;

fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = read_sweep_csv(data) {
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &samples).unwrap();
        let again = read_sweep_csv(buf.as_slice()).unwrap();
        assert_eq!(again.len(), samples.len());
        for (a, b) in again.iter().zip(&samples) {
            assert!(same(a.kappa_t, b.kappa_t) && same(a.g2a, b.g2a) && same(a.mean_n, b.mean_n));
            assert!(same(a.second_factorial_moment, b.second_factorial_moment));
            assert_eq!(a.g2.is_some(), b.g2.is_some());
        }
    }
});
