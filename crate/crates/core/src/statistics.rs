//! Zero-delay photon correlations along the loss dynamics.
//!
//! `g2 = ⟨a†²a²⟩ / ⟨a†a⟩²` is unchanged by photon loss for any state, while
//! the anti-normally ordered `g2a = ⟨a²a†²⟩ / ⟨aa†⟩²` relaxes to the vacuum
//! value 2. Each quantity is available from closed forms in the state
//! parameters, from density-matrix traces, and from Wigner-grid quadrature.

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::wigner::{GridSpec, InitialStateParams, WignerGrid};

/// Mean photon numbers at or below this are treated as the vacuum, where
/// `g2` is undefined.
pub const VACUUM_THRESHOLD: f64 = 1e-12;

/// Default sweep: `κt ∈ [0, 3]`, 61 samples.
pub fn default_sweep_times() -> Vec<f64> {
    (0..=60).map(|k| k as f64 * 0.05).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSample {
    pub kappa_t: f64,
    /// `None` at the vacuum.
    pub g2: Option<f64>,
    pub g2a: f64,
    pub mean_n: f64,
    /// `⟨a†²a²⟩`.
    pub second_factorial_moment: f64,
}

fn check_time(kappa_t: f64) -> Result<()> {
    if kappa_t >= 0.0 && kappa_t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTime(kappa_t))
    }
}

/// `⟨a†a⟩(t)` as the four-term expression
/// `4|C2|²e^{-4κt} + 2|C2|²e^{-2κt}(1 − 2e^{-2κt}) + |C1|²e^{-2κt}`.
pub fn mean_photon_closed(params: &InitialStateParams, kappa_t: f64) -> Result<f64> {
    check_time(kappa_t)?;
    let c1 = params.mod_c1() * params.mod_c1();
    let c2 = params.mod_c2() * params.mod_c2();
    let e2 = (-2.0 * kappa_t).exp();
    let e4 = (-4.0 * kappa_t).exp();
    Ok(4.0 * c2 * e4 + 2.0 * c2 * e2 * (1.0 - 2.0 * e2) + c1 * e2)
}

/// `⟨a†²a²⟩(t) = 2|C2|²e^{-4κt}`.
pub fn second_factorial_moment_closed(params: &InitialStateParams, kappa_t: f64) -> Result<f64> {
    check_time(kappa_t)?;
    Ok(2.0 * params.mod_c2() * params.mod_c2() * (-4.0 * kappa_t).exp())
}

fn ratio(m2: f64, mean_n: f64) -> Result<f64> {
    if mean_n <= VACUUM_THRESHOLD {
        return Err(Error::UndefinedAtVacuum { mean_n });
    }
    Ok(m2 / (mean_n * mean_n))
}

/// Time-dependent ratio of the two closed-form moments.
pub fn g2_closed(params: &InitialStateParams, kappa_t: f64) -> Result<f64> {
    let mean_n = mean_photon_closed(params, kappa_t)?;
    let m2 = second_factorial_moment_closed(params, kappa_t)?;
    ratio(m2, mean_n)
}

/// `(Σ n ρ_nn, Σ n(n−1) ρ_nn)`.
pub fn moments_from_rho(rho: &DensityMatrix) -> (f64, f64) {
    rho.populations()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(m1, m2), (n, p)| {
            let n = n as f64;
            (m1 + n * p, m2 + n * (n - 1.0) * p)
        })
}

pub fn g2_from_rho(rho: &DensityMatrix) -> Result<f64> {
    let (mean_n, m2) = moments_from_rho(rho);
    ratio(m2, mean_n)
}

/// `(⟨a†²a²⟩ + 4⟨a†a⟩ + 2) / (⟨a†a⟩ + 1)²`.
pub fn g2_antinormal_from_moments(mean_n: f64, m2: f64) -> f64 {
    (m2 + 4.0 * mean_n + 2.0) / ((mean_n + 1.0) * (mean_n + 1.0))
}

/// Closed-form `g2a(t)` in the state parameters.
pub fn g2_antinormal_closed(params: &InitialStateParams, kappa_t: f64) -> Result<f64> {
    check_time(kappa_t)?;
    let c1 = params.mod_c1() * params.mod_c1();
    let c2 = params.mod_c2() * params.mod_c2();
    let e2 = (-2.0 * kappa_t).exp();
    let e4 = (-4.0 * kappa_t).exp();
    let num = 4.0 * c1 * e2 + 8.0 * c2 * e2 + 2.0 * c2 * e4 + 2.0;
    let den = c1 * e2 + 2.0 * c2 * e2 + 1.0;
    Ok(num / (den * den))
}

pub fn g2_antinormal_from_rho(rho: &DensityMatrix) -> f64 {
    let (mean_n, m2) = moments_from_rho(rho);
    g2_antinormal_from_moments(mean_n, m2)
}

/// Minimum half-width and resolution for [`moments_from_wigner`].
pub const WIGNER_MOMENT_MIN_HALF_WIDTH: f64 = 4.0;
pub const WIGNER_MOMENT_MIN_POINTS: usize = 101;

fn check_moment_grid(spec: &GridSpec) -> Result<()> {
    let h = WIGNER_MOMENT_MIN_HALF_WIDTH;
    let mut problems = Vec::new();
    if spec.x_min > -h || spec.x_max < h || spec.p_min > -h || spec.p_max < h {
        problems.push(format!("bounds must include |x|, |p| ≤ {h}"));
    }
    if spec.nx < WIGNER_MOMENT_MIN_POINTS || spec.np < WIGNER_MOMENT_MIN_POINTS {
        problems.push(format!(
            "need at least {WIGNER_MOMENT_MIN_POINTS} points per axis, got {}×{}",
            spec.nx, spec.np
        ));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::InsufficientCoverage(problems.join("; ")))
    }
}

/// `(⟨a†a⟩, ⟨a†²a²⟩)` from the symmetric-order symbols `|α|² − 1/2` and
/// `|α|⁴ − 2|α|² + 1/2` integrated against the grid.
pub fn moments_from_wigner(grid: &WignerGrid) -> Result<(f64, f64)> {
    check_moment_grid(grid.spec())?;
    let mean_n = grid.integrate(|pt, w| (pt.alpha().norm_sqr() - 0.5) * w);
    let m2 = grid.integrate(|pt, w| {
        let r2 = pt.alpha().norm_sqr();
        (0.5 - 2.0 * r2 + r2 * r2) * w
    });
    Ok((mean_n, m2))
}

/// One closed-form [`CorrelationSample`] per requested time.
pub fn correlation_sweep(
    params: &InitialStateParams,
    kappa_t_samples: &[f64],
) -> Result<Vec<CorrelationSample>> {
    kappa_t_samples
        .iter()
        .map(|&kappa_t| {
            let mean_n = mean_photon_closed(params, kappa_t)?;
            let m2 = second_factorial_moment_closed(params, kappa_t)?;
            let g2 = match g2_closed(params, kappa_t) {
                Ok(v) => Some(v),
                Err(Error::UndefinedAtVacuum { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(CorrelationSample {
                kappa_t,
                g2,
                g2a: g2_antinormal_closed(params, kappa_t)?,
                mean_n,
                second_factorial_moment: m2,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve_rk4, evolve_trajectory, DEFAULT_STEP};
    use crate::fock::{density_from_state, expectation, lowering, raising};
    use crate::wigner::{wigner_grid, WignerSource};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn showcase() -> InitialStateParams {
        InitialStateParams::new(1.0 / 3.0, 2f64.sqrt() / 2.0, 0.0, PI).unwrap()
    }

    fn balanced() -> InitialStateParams {
        let s6 = 6f64.sqrt();
        InitialStateParams::new(s6 / 6.0, s6 / 3.0, 0.0, PI).unwrap()
    }

    fn rho_of(p: &InitialStateParams) -> DensityMatrix {
        density_from_state(&p.to_state(8).unwrap())
    }

    #[test]
    fn mean_photon_values() {
        assert_abs_diff_eq!(
            mean_photon_closed(&showcase(), 0.0).unwrap(),
            10.0 / 9.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            mean_photon_closed(&showcase(), 0.5).unwrap(),
            10.0 / 9.0 * (-1f64).exp(),
            epsilon = 1e-15
        );
        assert_eq!(
            mean_photon_closed(&InitialStateParams::vacuum(), 2.0).unwrap(),
            0.0
        );
        assert!(mean_photon_closed(&showcase(), -1.0).is_err());
    }

    #[test]
    fn printed_mean_expression_simplifies() {
        for p in [showcase(), balanced()] {
            for k in 0..=1000 {
                let kt = k as f64 * 0.01;
                let simple = (p.mod_c1().powi(2) + 2.0 * p.mod_c2().powi(2)) * (-2.0 * kt).exp();
                assert!((mean_photon_closed(&p, kt).unwrap() - simple).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn second_moment_values() {
        assert_abs_diff_eq!(
            second_factorial_moment_closed(&showcase(), 0.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            second_factorial_moment_closed(&showcase(), 0.35).unwrap(),
            (-1.4f64).exp(),
            epsilon = 1e-15
        );
        let no_two = InitialStateParams::new(0.6, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(second_factorial_moment_closed(&no_two, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn g2_closed_values() {
        for kt in [0.0, 0.7, 2.5] {
            assert_abs_diff_eq!(g2_closed(&showcase(), kt).unwrap(), 0.81, epsilon = 1e-12);
            assert_abs_diff_eq!(
                g2_closed(&InitialStateParams::fock(2), kt).unwrap(),
                0.5,
                epsilon = 1e-12
            );
            assert_eq!(g2_closed(&InitialStateParams::fock(1), kt).unwrap(), 0.0);
        }
        assert!(matches!(
            g2_closed(&InitialStateParams::vacuum(), 0.0),
            Err(Error::UndefinedAtVacuum { .. })
        ));
    }

    #[test]
    fn g2_trace_route() {
        let s6 = 6f64.sqrt();
        let prepared = InitialStateParams::new(s6 / 3.0, s6 / 6.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            g2_from_rho(&rho_of(&prepared)).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            g2_from_rho(&rho_of(&balanced())).unwrap(),
            16.0 / 27.0,
            epsilon = 1e-14
        );
        let evolved = evolve_rk4(&rho_of(&showcase()), 1.0, DEFAULT_STEP).unwrap();
        assert_abs_diff_eq!(g2_from_rho(&evolved).unwrap(), 0.81, epsilon = 1e-6);
        assert!(g2_from_rho(&DensityMatrix::vacuum(8)).is_err());
    }

    #[test]
    fn g2a_values() {
        for p in [showcase(), balanced(), InitialStateParams::fock(2)] {
            assert_abs_diff_eq!(g2_antinormal_closed(&p, 10.0).unwrap(), 2.0, epsilon = 1e-6);
        }
        assert_abs_diff_eq!(
            g2_antinormal_closed(&balanced(), 0.0).unwrap(),
            112.0 / 75.0,
            epsilon = 1e-14
        );
        assert_eq!(
            g2_antinormal_closed(&InitialStateParams::vacuum(), 0.4).unwrap(),
            2.0
        );
        assert_eq!(g2_antinormal_from_rho(&DensityMatrix::vacuum(8)), 2.0);
        assert_abs_diff_eq!(
            g2_antinormal_from_rho(&rho_of(&showcase())),
            603.0 / 361.0,
            epsilon = 1e-14
        );
        let evolved = evolve_rk4(&rho_of(&showcase()), 0.5, DEFAULT_STEP).unwrap();
        assert_abs_diff_eq!(
            g2_antinormal_from_rho(&evolved),
            g2_antinormal_closed(&showcase(), 0.5).unwrap(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn ordering_identity_along_trajectory() {
        let d = 8;
        let a = lowering(d);
        let ad = raising(d);
        let normal = &ad * &ad * &a * &a;
        let anti = &a * &a * &ad * &ad;
        let n_op = &ad * &a;
        let traj =
            evolve_trajectory(&rho_of(&showcase()), &[0.0, 0.3, 1.0, 2.5], DEFAULT_STEP).unwrap();
        for (_, rho) in traj.iter() {
            let lhs = expectation(rho, &anti).unwrap().re;
            let rhs = expectation(rho, &normal).unwrap().re
                + 4.0 * expectation(rho, &n_op).unwrap().re
                + 2.0;
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn wigner_moments() {
        let spec = GridSpec::square(4.0, 161).unwrap();
        let grid = wigner_grid(WignerSource::Rho(&DensityMatrix::vacuum(8)), &spec).unwrap();
        let (m1, m2) = moments_from_wigner(&grid).unwrap();
        assert_abs_diff_eq!(m1, 0.0, epsilon = 1e-4);
        assert_abs_diff_eq!(m2, 0.0, epsilon = 1e-4);

        let params = showcase();
        let grid = wigner_grid(
            WignerSource::ClosedForm {
                params,
                kappa_t: 0.0,
            },
            &spec,
        )
        .unwrap();
        let (m1, m2) = moments_from_wigner(&grid).unwrap();
        assert_abs_diff_eq!(m1, 10.0 / 9.0, epsilon = 1e-3);
        assert_abs_diff_eq!(m2, 1.0, epsilon = 1e-3);

        let grid = wigner_grid(
            WignerSource::ClosedForm {
                params,
                kappa_t: 0.35,
            },
            &spec,
        )
        .unwrap();
        let (_, m2) = moments_from_wigner(&grid).unwrap();
        assert_abs_diff_eq!(m2, (-1.4f64).exp(), epsilon = 1e-3);
    }

    #[test]
    fn wigner_moments_reject_small_grids() {
        let vac = DensityMatrix::vacuum(4);
        let narrow = wigner_grid(
            WignerSource::Rho(&vac),
            &GridSpec::square(3.0, 121).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            moments_from_wigner(&narrow),
            Err(Error::InsufficientCoverage(_))
        ));
        let coarse =
            wigner_grid(WignerSource::Rho(&vac), &GridSpec::square(4.0, 51).unwrap()).unwrap();
        assert!(matches!(
            moments_from_wigner(&coarse),
            Err(Error::InsufficientCoverage(_))
        ));
    }

    #[test]
    fn sweeps() {
        let times = default_sweep_times();
        assert_eq!(times.len(), 61);
        let rows = correlation_sweep(&balanced(), &times).unwrap();
        for r in &rows {
            assert_abs_diff_eq!(r.g2.unwrap(), 16.0 / 27.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(rows[0].g2a, 112.0 / 75.0, epsilon = 1e-14);
        assert!(rows.windows(2).all(|w| w[1].g2a > w[0].g2a));
        assert!(rows.last().unwrap().g2a < 2.0);

        let rows = correlation_sweep(&InitialStateParams::vacuum(), &times).unwrap();
        assert!(rows.iter().all(|r| r.g2.is_none() && r.g2a == 2.0));
        assert!(correlation_sweep(&balanced(), &[0.0, -1.0]).is_err());
    }
}
