//! Named parameter sets used by the defaults and the test suites.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use crate::qed::PrepParams;
use crate::wigner::InitialStateParams;

/// `|C1| = 1/3, |C2| = √2/2, φ = 0, ϕ = π`: negative at the origin and
/// non-classical until `κt = ln2/2`.
pub fn showcase_state() -> InitialStateParams {
    InitialStateParams::new(1.0 / 3.0, SQRT_2 / 2.0, 0.0, PI).expect("valid preset")
}

/// `(√6/6, √6/3, √6/6)`, the state produced by [`target_prep_params`].
pub fn prepared_state() -> InitialStateParams {
    let s6 = 6f64.sqrt();
    InitialStateParams::new(s6 / 3.0, s6 / 6.0, 0.0, 0.0).expect("valid preset")
}

/// Labelled `(|C1|, |C2|)` pairs for the correlation sweeps, all with
/// `φ = 0, ϕ = π`.
pub fn correlation_moduli() -> [(&'static str, f64, f64); 4] {
    let s6 = 6f64.sqrt();
    [
        ("s1", s6 / 6.0, s6 / 3.0),
        ("s2", 2.0 / 9.0, 2.0 / 3.0),
        ("s3", 1.0 / 3.0, 1.0 / 3.0),
        ("s4", 1.0 / 5.0, 1.0 / 3.0),
    ]
}

pub fn correlation_sets() -> Vec<(String, InitialStateParams)> {
    correlation_moduli()
        .into_iter()
        .map(|(label, c1, c2)| {
            let params = InitialStateParams::new(c1, c2, 0.0, PI).expect("valid preset");
            (label.to_string(), params)
        })
        .collect()
}

/// `φ1 = π, φ2 = 0, gt1 = gt2 = π/4, θ1 = 7π/2, θ2 = π/2`.
pub fn target_prep_params() -> PrepParams {
    PrepParams {
        gt1: FRAC_PI_4,
        gt2: FRAC_PI_4,
        theta1: 3.5 * PI,
        theta2: FRAC_PI_2,
        phi1: PI,
        phi2: 0.0,
    }
}

/// Snapshot times for the showcase Wigner series.
pub const SHOWCASE_SNAPSHOTS: [f64; 4] = [0.0, 0.2, 0.35, 3.0];
