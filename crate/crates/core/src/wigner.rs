//! Wigner quasi-probability function, normalized to `∫ W d²α = 1`.
//!
//! Three independent evaluators are provided:
//!
//! * [`wigner_from_rho`] sums Fock-basis matrix elements of the Wigner
//!   operator against an arbitrary density matrix;
//! * [`wigner_initial_closed`] and [`wigner_evolved_closed`] are closed forms
//!   for `C0|0⟩ + C1|1⟩ + C2|2⟩` before and after photon loss;
//! * [`ConvolutionEvaluator`] propagates any initial Wigner function through
//!   the Gaussian loss kernel by tensor-product Gauss–Legendre quadrature.

use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{make_superposition, DensityMatrix, StateVector};
use crate::laguerre::{laguerre_assoc, laguerre_scaled};
use crate::quadrature::GaussLegendre;

/// A phase-space point `α = x + ip`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    alpha: Complex64,
}

impl PhasePoint {
    pub fn new(alpha: Complex64) -> Self {
        Self { alpha }
    }

    pub fn from_xp(x: f64, p: f64) -> Self {
        Self::new(Complex64::new(x, p))
    }

    pub fn from_polar(modulus: f64, theta: f64) -> Self {
        Self::new(Complex64::from_polar(modulus, theta))
    }

    pub fn origin() -> Self {
        Self::from_xp(0.0, 0.0)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn x(&self) -> f64 {
        self.alpha.re
    }

    pub fn p(&self) -> f64 {
        self.alpha.im
    }

    pub fn modulus(&self) -> f64 {
        self.alpha.norm()
    }

    pub fn theta(&self) -> f64 {
        self.alpha.arg()
    }
}

/// Moduli and phases of `C0 = |C0|e^{iφ}, C1 = |C1|, C2 = |C2|e^{iϕ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateParams {
    mod_c0: f64,
    mod_c1: f64,
    mod_c2: f64,
    phi: f64,
    varphi: f64,
}

impl InitialStateParams {
    /// `|C0|` is fixed by normalization.
    pub fn new(mod_c1: f64, mod_c2: f64, phi: f64, varphi: f64) -> Result<Self> {
        let rest = 1.0 - mod_c1 * mod_c1 - mod_c2 * mod_c2;
        if rest < -1e-12 {
            return Err(Error::InvalidParams(format!(
                "|C1|² + |C2|² = {} exceeds 1",
                1.0 - rest
            )));
        }
        Self::with_moduli(rest.max(0.0).sqrt(), mod_c1, mod_c2, phi, varphi)
    }

    pub fn with_moduli(
        mod_c0: f64,
        mod_c1: f64,
        mod_c2: f64,
        phi: f64,
        varphi: f64,
    ) -> Result<Self> {
        let all = [mod_c0, mod_c1, mod_c2, phi, varphi];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if mod_c0 < 0.0 || mod_c1 < 0.0 || mod_c2 < 0.0 {
            return Err(Error::InvalidParams("moduli must be non-negative".into()));
        }
        let norm = mod_c0 * mod_c0 + mod_c1 * mod_c1 + mod_c2 * mod_c2;
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "|C0|² + |C1|² + |C2|² = {norm}, expected 1"
            )));
        }
        Ok(Self {
            mod_c0,
            mod_c1,
            mod_c2,
            phi,
            varphi,
        })
    }

    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    /// `|n⟩` for `n ∈ {0, 1, 2}`.
    pub fn fock(n: usize) -> Self {
        let mut m = [0.0; 3];
        m[n] = 1.0;
        Self {
            mod_c0: m[0],
            mod_c1: m[1],
            mod_c2: m[2],
            phi: 0.0,
            varphi: 0.0,
        }
    }

    /// Reads the parameters off a pure state supported on `n ≤ 2`, removing
    /// the global phase so that `C1` is real and non-negative.
    pub fn from_state(psi: &StateVector) -> Result<Self> {
        if (3..psi.dim()).any(|n| psi.amplitude(n).norm() > 1e-12) {
            return Err(Error::InvalidParams(
                "state has support above two photons".into(),
            ));
        }
        let c1 = psi.amplitude(1);
        let gauge = if c1.norm() > 0.0 {
            c1.conj() / c1.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let c0 = psi.amplitude(0) * gauge;
        let c2 = psi.amplitude(2) * gauge;
        let norm = (c0.norm_sqr() + c1.norm_sqr() + c2.norm_sqr()).sqrt();
        Self::with_moduli(
            c0.norm() / norm,
            c1.norm() / norm,
            c2.norm() / norm,
            c0.arg(),
            c2.arg(),
        )
    }

    pub fn mod_c0(&self) -> f64 {
        self.mod_c0
    }

    pub fn mod_c1(&self) -> f64 {
        self.mod_c1
    }

    pub fn mod_c2(&self) -> f64 {
        self.mod_c2
    }

    /// Phase of `C0`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Phase of `C2`.
    pub fn varphi(&self) -> f64 {
        self.varphi
    }

    pub fn amplitudes(&self) -> [Complex64; 3] {
        [
            Complex64::from_polar(self.mod_c0, self.phi),
            Complex64::new(self.mod_c1, 0.0),
            Complex64::from_polar(self.mod_c2, self.varphi),
        ]
    }

    pub fn to_state(&self, dim: usize) -> Result<StateVector> {
        let [c0, c1, c2] = self.amplitudes();
        make_superposition(c0, c1, c2, dim)
    }
}

/// `2/π · e^{-2|α|²}`, the vacuum Wigner function.
pub fn vacuum_wigner(point: PhasePoint) -> f64 {
    FRAC_2_PI * (-2.0 * point.alpha.norm_sqr()).exp()
}

/// `⟨n|Δ(α)|m⟩` for the Wigner operator with `W = Tr(ρΔ)`.
///
/// For `n ≥ m`:
/// `(2/π)(-1)^m √(m!/n!) (2α)^{n-m} e^{-2|α|²} L_m^{(n-m)}(4|α|²)`;
/// the `n < m` elements follow from Hermiticity of `Δ`.
pub fn wigner_element(n: usize, m: usize, point: PhasePoint) -> Complex64 {
    if n < m {
        return wigner_element(m, n, point).conj();
    }
    let alpha = point.alpha;
    let r2 = alpha.norm_sqr();
    let k = n - m;
    let ratio = ((m + 1)..=n).fold(1.0, |acc, i| acc / (i as f64).sqrt());
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let radial =
        sign * FRAC_2_PI * ratio * (-2.0 * r2).exp() * laguerre_assoc(m as u32, k as u32, 4.0 * r2);
    (alpha * 2.0).powu(k as u32) * radial
}

/// `W(α) = Σ_{n,m} ρ_mn ⟨n|Δ|m⟩`.
pub fn wigner_from_rho(rho: &DensityMatrix, point: PhasePoint) -> f64 {
    let d = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..d {
        for m in 0..=n {
            let lower = rho.get(m, n);
            let upper = rho.get(n, m);
            if lower.norm_sqr() == 0.0 && upper.norm_sqr() == 0.0 {
                continue;
            }
            let el = wigner_element(n, m, point);
            acc += lower * el;
            if n != m {
                acc += upper * el.conj();
            }
        }
    }
    debug_assert!(
        acc.im.abs() < 1e-10 * (1.0 + acc.re.abs()),
        "Wigner function has imaginary residue {}",
        acc.im
    );
    acc.re
}

/// Closed-form Wigner function of `C0|0⟩ + C1|1⟩ + C2|2⟩`.
pub fn wigner_initial_closed(params: &InitialStateParams, point: PhasePoint) -> f64 {
    let r = point.modulus();
    let theta = point.theta();
    let x = 4.0 * r * r;
    let g = (-2.0 * r * r).exp();
    let (c0, c1, c2) = (params.mod_c0, params.mod_c1, params.mod_c2);
    let (phi, varphi) = (params.phi, params.varphi);

    FRAC_2_PI
        * (c0 * c0 - c1 * c1 * laguerre_assoc(1, 0, x) + c2 * c2 * laguerre_assoc(2, 0, x))
        * g
        + 8.0 * SQRT_2 / PI * g * c0 * c2 * r * r * (2.0 * theta - varphi + phi).cos()
        - 4.0 * SQRT_2 / PI * g * c1 * c2 * r * (theta - varphi).cos() * laguerre_assoc(1, 1, x)
        + 8.0 / PI * g * c0 * c1 * r * (theta + phi).cos()
}

/// Closed-form Wigner function after photon loss for a time `κt`.
///
/// With `η = e^{-2κt}`, the population terms read
/// `|C1|²·(1-2η)L_1⁰(y) + |C2|²·(1-2η)²L_2⁰(y)`, `y = -4η|α|²/(1-2η)`;
/// they are evaluated through [`laguerre_scaled`] so the removable
/// singularity at `η = 1/2` never appears.
pub fn wigner_evolved_closed(
    params: &InitialStateParams,
    kappa_t: f64,
    point: PhasePoint,
) -> Result<f64> {
    if !(kappa_t >= 0.0 && kappa_t.is_finite()) {
        return Err(Error::InvalidTime(kappa_t));
    }
    let r = point.modulus();
    let r2 = r * r;
    let theta = point.theta();
    let g = (-2.0 * r2).exp();
    let eta = (-2.0 * kappa_t).exp();
    let sqrt_eta = (-kappa_t).exp();
    let s = 1.0 - 2.0 * eta;
    let u = 4.0 * eta * r2;
    let (c0, c1, c2) = (params.mod_c0, params.mod_c1, params.mod_c2);
    let (phi, varphi) = (params.phi, params.varphi);

    let populations =
        c0 * c0 + c1 * c1 * laguerre_scaled(1, 0, u, s) + c2 * c2 * laguerre_scaled(2, 0, u, s);

    Ok(FRAC_2_PI * g * populations
        + 8.0 * SQRT_2 / PI * c0 * c2 * g * eta * r2 * (2.0 * theta - varphi + phi).cos()
        + 8.0 / PI * c0 * c1 * g * sqrt_eta * r * (theta + phi).cos()
        + 8.0 * SQRT_2 / PI
            * c1
            * c2
            * g
            * sqrt_eta
            * r
            * (theta - varphi).cos()
            * (2.0 * (r2 - 1.0) * eta + 1.0))
}

/// Default Gauss–Legendre order per axis for the loss convolution.
pub const DEFAULT_CONVOLUTION_ORDER: usize = 80;
/// Default half-width of the square `|Re α₀|, |Im α₀| ≤ L` integrated over.
pub const DEFAULT_CONVOLUTION_HALF_WIDTH: f64 = 5.0;

/// Loss propagation of an initial Wigner function through the Gaussian
/// kernel
/// `W(α,t) = 2/(1-e^{-2κt}) ∫ d²α₀/π exp[-2|α - α₀e^{-κt}|²/(1-e^{-2κt})] W(α₀,0)`.
///
/// The initial function is tabulated once on the quadrature nodes; each
/// evaluation then costs one separable kernel sum.
pub struct ConvolutionEvaluator<F> {
    initial: F,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // values[j * order + i] = W0(nodes[i] + i·nodes[j])
    values: Vec<f64>,
}

impl<F: Fn(PhasePoint) -> f64> ConvolutionEvaluator<F> {
    pub fn new(initial: F) -> Self {
        Self::with_rule(
            initial,
            DEFAULT_CONVOLUTION_ORDER,
            DEFAULT_CONVOLUTION_HALF_WIDTH,
        )
    }

    pub fn with_rule(initial: F, order: usize, half_width: f64) -> Self {
        let (nodes, weights) = GaussLegendre::new(order).on_interval(-half_width, half_width);
        let mut values = Vec::with_capacity(order * order);
        for &p in &nodes {
            for &x in &nodes {
                values.push(initial(PhasePoint::from_xp(x, p)));
            }
        }
        Self {
            initial,
            nodes,
            weights,
            values,
        }
    }

    pub fn evaluate(&self, kappa_t: f64, point: PhasePoint) -> Result<f64> {
        if !(kappa_t >= 0.0 && kappa_t.is_finite()) {
            return Err(Error::InvalidTime(kappa_t));
        }
        if kappa_t == 0.0 {
            return Ok((self.initial)(point));
        }
        let shrink = (-kappa_t).exp();
        let spread = -(-2.0 * kappa_t).exp_m1();
        let kernel = |centre: f64| -> Vec<f64> {
            self.nodes
                .iter()
                .zip(self.weights.iter())
                .map(|(n, w)| {
                    let d = centre - n * shrink;
                    w * (-2.0 * d * d / spread).exp()
                })
                .collect()
        };
        let kx = kernel(point.x());
        let kp = kernel(point.p());
        let order = self.nodes.len();
        let total: f64 = kp
            .iter()
            .enumerate()
            .map(|(j, wp)| {
                let row = &self.values[j * order..(j + 1) * order];
                wp * row.iter().zip(kx.iter()).map(|(v, wx)| v * wx).sum::<f64>()
            })
            .sum();
        Ok(2.0 / (PI * spread) * total)
    }
}

/// One-shot convolution with the default quadrature rule.
pub fn wigner_convolution(
    initial: impl Fn(PhasePoint) -> f64,
    kappa_t: f64,
    point: PhasePoint,
) -> Result<f64> {
    if kappa_t == 0.0 {
        return Ok(initial(point));
    }
    ConvolutionEvaluator::new(initial).evaluate(kappa_t, point)
}

/// Rectangular `(x, p)` lattice including both end points on each axis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        p_min: f64,
        p_max: f64,
        nx: usize,
        np: usize,
    ) -> Result<Self> {
        let spec = Self {
            x_min,
            x_max,
            p_min,
            p_max,
            nx,
            np,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `|x|, |p| ≤ half_width` with `n` points per axis.
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let bounds = [self.x_min, self.x_max, self.p_min, self.p_max];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if !(self.x_min < self.x_max && self.p_min < self.p_max) {
            return Err(Error::InvalidGrid(format!(
                "empty bounds x ∈ [{}, {}], p ∈ [{}, {}]",
                self.x_min, self.x_max, self.p_min, self.p_max
            )));
        }
        if self.nx < 2 || self.np < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points per axis, got {}×{}",
                self.nx, self.np
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn p(&self, j: usize) -> f64 {
        if j + 1 == self.np {
            self.p_max
        } else {
            self.p_min + j as f64 * self.dp()
        }
    }

    pub fn point(&self, i: usize, j: usize) -> PhasePoint {
        PhasePoint::from_xp(self.x(i), self.p(j))
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lattice points in storage order (row-major, x fastest).
    pub fn points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.np).flat_map(move |j| (0..self.nx).map(move |i| self.point(i, j)))
    }

    /// Evaluates `f` on the lattice in storage order.
    pub fn sample(&self, f: impl Fn(PhasePoint) -> f64 + Sync) -> Vec<f64> {
        (0..self.np)
            .into_par_iter()
            .flat_map_iter(|j| {
                let f = &f;
                (0..self.nx).map(move |i| f(self.point(i, j)))
            })
            .collect()
    }

    fn trapezoid_weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i + 1 == self.nx { 0.5 } else { 1.0 };
        let wp = if j == 0 || j + 1 == self.np { 0.5 } else { 1.0 };
        wx * wp * self.dx() * self.dp()
    }
}

/// Wigner samples on a [`GridSpec`] lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    spec: GridSpec,
    values: Vec<f64>,
}

impl WignerGrid {
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite Wigner sample".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    /// `(point, W)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (PhasePoint, f64)> + '_ {
        self.spec.points().zip(self.values.iter().copied())
    }

    /// Trapezoidal quadrature of `f(α, W(α))` over the grid.
    pub fn integrate(&self, f: impl Fn(PhasePoint, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.spec.np {
            for i in 0..self.spec.nx {
                let w = self.spec.trapezoid_weight(i, j);
                acc += w * f(self.spec.point(i, j), self.value(i, j));
            }
        }
        acc
    }

    /// `∫ W d²α` over the grid.
    pub fn total(&self) -> f64 {
        self.integrate(|_, w| w)
    }

    /// Largest pointwise difference to another grid on the same lattice.
    pub fn max_abs_difference(&self, other: &WignerGrid) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::InvalidGrid("grids have different lattices".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// What a grid is sampled from.
#[derive(Debug, Clone, Copy)]
pub enum WignerSource<'a> {
    /// Fock-basis sum over a density matrix.
    Rho(&'a DensityMatrix),
    /// Closed form for the three-level superposition after loss `κt`.
    ClosedForm {
        params: InitialStateParams,
        kappa_t: f64,
    },
    /// Gaussian-convolution quadrature of the initial closed form.
    Convolution {
        params: InitialStateParams,
        kappa_t: f64,
    },
}

pub fn wigner_grid(source: WignerSource<'_>, spec: &GridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    let values = match source {
        WignerSource::Rho(rho) => spec.sample(|pt| wigner_from_rho(rho, pt)),
        WignerSource::ClosedForm { params, kappa_t } => {
            if !(kappa_t >= 0.0 && kappa_t.is_finite()) {
                return Err(Error::InvalidTime(kappa_t));
            }
            spec.sample(|pt| {
                wigner_evolved_closed(&params, kappa_t, pt).expect("time validated above")
            })
        }
        WignerSource::Convolution { params, kappa_t } => {
            if !(kappa_t >= 0.0 && kappa_t.is_finite()) {
                return Err(Error::InvalidTime(kappa_t));
            }
            let eval = ConvolutionEvaluator::new(|pt| wigner_initial_closed(&params, pt));
            spec.sample(|pt| eval.evaluate(kappa_t, pt).expect("time validated above"))
        }
    };
    WignerGrid::from_values(*spec, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityMetrics {
    pub min_value: f64,
    pub min_location: PhasePoint,
    /// `∫ max(-W, 0) d²α` over the grid.
    pub negative_volume: f64,
}

pub fn negativity_metrics(grid: &WignerGrid) -> NegativityMetrics {
    let (min_location, min_value) =
        grid.iter()
            .fold((PhasePoint::origin(), f64::INFINITY), |best, (pt, w)| {
                if w < best.1 {
                    (pt, w)
                } else {
                    best
                }
            });
    NegativityMetrics {
        min_value,
        min_location,
        negative_volume: grid.integrate(|_, w| (-w).max(0.0)),
    }
}
