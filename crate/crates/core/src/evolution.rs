//! Zero-temperature photon loss: `dρ/dt = −κ(a†a ρ + ρ a†a − 2 a ρ a†)`.
//!
//! Public entry points work in the dimensionless time `κt`; the equation is
//! integrated with `κ = 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{lowering, number, DensityMatrix};

/// Default RK4 step in units of `κt`.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Loss coefficient `κ` (inverse time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParams {
    kappa: f64,
}

impl DecayParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa > 0.0 && kappa.is_finite() {
            Ok(Self { kappa })
        } else {
            Err(Error::InvalidParams(format!(
                "loss coefficient must be positive, got {kappa}"
            )))
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Dimensionless time `κt` for a physical time `t`.
    pub fn kappa_t(&self, t: f64) -> f64 {
        self.kappa * t
    }
}

/// Density matrices sampled at ascending `κt`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

/// Precomputed `a`, `a†`, `a†a` for one dimension.
struct Generator {
    a: DMatrix<Complex64>,
    a_dag: DMatrix<Complex64>,
    n: DMatrix<Complex64>,
}

impl Generator {
    fn new(dim: usize) -> Self {
        let a = lowering(dim);
        Self {
            a_dag: a.adjoint(),
            n: number(dim),
            a,
        }
    }

    fn apply(&self, rho: &DMatrix<Complex64>, kappa: f64) -> DMatrix<Complex64> {
        let jump = &self.a * rho * &self.a_dag;
        let anti = &self.n * rho + rho * &self.n;
        (anti - jump * Complex64::new(2.0, 0.0)) * Complex64::new(-kappa, 0.0)
    }

    fn rk4_step(&self, rho: &DMatrix<Complex64>, h: f64) -> DMatrix<Complex64> {
        let half = Complex64::new(h / 2.0, 0.0);
        let full = Complex64::new(h, 0.0);
        let k1 = self.apply(rho, 1.0);
        let k2 = self.apply(&(rho + &k1 * half), 1.0);
        let k3 = self.apply(&(rho + &k2 * half), 1.0);
        let k4 = self.apply(&(rho + &k3 * full), 1.0);
        let sum = k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4;
        rho + sum * Complex64::new(h / 6.0, 0.0)
    }

    /// Integrates from 0 to `span` with steps no larger than `step`.
    fn advance(&self, rho: DMatrix<Complex64>, span: f64, step: f64) -> DMatrix<Complex64> {
        if span <= 0.0 {
            return rho;
        }
        let n_steps = (span / step).ceil().max(1.0) as usize;
        let h = span / n_steps as f64;
        (0..n_steps).fold(rho, |r, _| self.rk4_step(&r, h))
    }
}

/// Right-hand side of the loss master equation at rate `kappa`.
pub fn lindblad_rhs(rho: &DensityMatrix, kappa: f64) -> DMatrix<Complex64> {
    Generator::new(rho.dim()).apply(rho.elements(), kappa)
}

fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidStep(step))
    }
}

fn check_time(kappa_t: f64) -> Result<()> {
    if kappa_t >= 0.0 && kappa_t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTime(kappa_t))
    }
}

/// Classical fixed-step RK4 from `κt = 0` to `kappa_t_final`.
pub fn evolve_rk4(rho0: &DensityMatrix, kappa_t_final: f64, step: f64) -> Result<DensityMatrix> {
    check_step(step)?;
    check_time(kappa_t_final)?;
    let gen = Generator::new(rho0.dim());
    Ok(DensityMatrix::from_raw(gen.advance(
        rho0.elements().clone(),
        kappa_t_final,
        step,
    )))
}

/// Single integration pass sampled at each requested `κt`.
pub fn evolve_trajectory(
    rho0: &DensityMatrix,
    kappa_t_samples: &[f64],
    step: f64,
) -> Result<Trajectory> {
    check_step(step)?;
    if kappa_t_samples
        .iter()
        .any(|t| !(t.is_finite() && *t >= 0.0))
        || kappa_t_samples.windows(2).any(|w| w[1] < w[0])
    {
        return Err(Error::UnsortedSamples);
    }
    let gen = Generator::new(rho0.dim());
    let mut current = rho0.elements().clone();
    let mut now = 0.0;
    let mut states = Vec::with_capacity(kappa_t_samples.len());
    for &t in kappa_t_samples {
        current = gen.advance(current, t - now, step);
        now = t;
        states.push(DensityMatrix::from_raw(current.clone()));
    }
    Ok(Trajectory {
        times: kappa_t_samples.to_vec(),
        states,
    })
}

/// Closed-form populations `(ρ00, ρ11, ρ22)` at `κt` for states supported
/// on `n ≤ 2`.
pub fn diagonals_analytic(initial: (f64, f64, f64), kappa_t: f64) -> Result<(f64, f64, f64)> {
    let (p0, p1, p2) = initial;
    if [p0, p1, p2].iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidPopulations(format!(
            "populations must be non-negative, got ({p0}, {p1}, {p2})"
        )));
    }
    if ((p0 + p1 + p2) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidPopulations(format!(
            "populations sum to {}",
            p0 + p1 + p2
        )));
    }
    check_time(kappa_t)?;
    let e2 = (-2.0 * kappa_t).exp();
    let e4 = (-4.0 * kappa_t).exp();
    let rho22 = p2 * e4;
    let rho11 = (p1 + 2.0 * p2) * e2 - 2.0 * p2 * e4;
    Ok((1.0 - rho11 - rho22, rho11, rho22))
}
