#![no_main]

use fockdyn::io::{read_measurement_csv, write_measurement_csv};
use libfuzzer_sys::fuzz_target;

fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_measurement_csv(data) {
        for r in &records {
            assert!((0.0..=1.0).contains(&r.p_e_phase0) && (0.0..=1.0).contains(&r.p_e_phase_pi));
        }
        let mut buf = Vec::new();
        write_measurement_csv(&mut buf, &records).unwrap();
        let again = read_measurement_csv(buf.as_slice()).unwrap();
        assert_eq!(again.len(), records.len());
        for (a, b) in again.iter().zip(&records) {
            assert!(same(a.x, b.x) && same(a.p, b.p) && same(a.w_estimate, b.w_estimate));
            assert_eq!((a.p_e_phase0, a.p_e_phase_pi, a.shots), (b.p_e_phase0, b.p_e_phase_pi, b.shots));
        }
    }
});
