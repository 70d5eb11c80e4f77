//! Cavity-QED preparation and readout.
//!
//! Preparation: two atoms cross the cavity one after the other. Each
//! undergoes a resonant Jaynes–Cummings interaction followed by a classical
//! microwave pulse, and the cavity is post-selected on both atoms being
//! detected excited.
//!
//! Readout: a Ramsey probe measures the displaced parity
//! `⟨P⟩ = Tr[D(−α) ρ D(α) P]`, from which `W(α) = 2⟨P⟩/π`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{lowering, DensityMatrix, StateVector, DEFAULT_DIM};
use crate::wigner::PhasePoint;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomLevel {
    #[serde(rename = "e")]
    Excited,
    #[serde(rename = "g")]
    Ground,
}

/// How the Rabi angle depends on the photon number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JcModel {
    /// Every `|n,e⟩ ↔ |n+1,g⟩` pair rotates by the same angle `gt`.
    #[default]
    Paper,
    /// Resonant Jaynes–Cummings: the pair rotates by `√(n+1)·gt`.
    Exact,
}

impl std::str::FromStr for JcModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(JcModel::Paper),
            "exact" => Ok(JcModel::Exact),
            other => Err(Error::Parse(format!(
                "unknown model `{other}` (expected `paper` or `exact`)"
            ))),
        }
    }
}

/// Joint state of the cavity mode and one or two two-level atoms.
///
/// Basis index: `(n << n_atoms) | bits`, where bit `k` is set when atom `k`
/// is in the ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomCavityState {
    amplitudes: DVector<Complex64>,
    cavity_dim: usize,
    n_atoms: usize,
}

impl AtomCavityState {
    /// Product of a cavity state and atomic basis states.
    pub fn product(cavity: &StateVector, atoms: &[AtomLevel]) -> Result<Self> {
        if atoms.is_empty() || atoms.len() > 2 {
            return Err(Error::InvalidParams(format!(
                "supported atom counts are 1 and 2, got {}",
                atoms.len()
            )));
        }
        let n_atoms = atoms.len();
        let cavity_dim = cavity.dim();
        let mut amplitudes = DVector::zeros(cavity_dim << n_atoms);
        let bits = atom_bits(atoms);
        for n in 0..cavity_dim {
            amplitudes[(n << n_atoms) | bits] = cavity.amplitude(n);
        }
        Ok(Self {
            amplitudes,
            cavity_dim,
            n_atoms,
        })
    }

    /// `|n⟩ ⊗ |atoms⟩`.
    pub fn basis(n: usize, atoms: &[AtomLevel], cavity_dim: usize) -> Result<Self> {
        if n >= cavity_dim {
            return Err(Error::InvalidParams(format!(
                "photon number {n} outside dimension {cavity_dim}"
            )));
        }
        let mut amps = vec![ZERO; cavity_dim.max(3)];
        amps[n] = Complex64::new(1.0, 0.0);
        Self::product(&StateVector::new(amps)?, atoms)
    }

    pub fn cavity_dim(&self) -> usize {
        self.cavity_dim
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn amplitude(&self, n: usize, atoms: &[AtomLevel]) -> Complex64 {
        assert_eq!(atoms.len(), self.n_atoms);
        self.amplitudes[(n << self.n_atoms) | atom_bits(atoms)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Unnormalized cavity amplitudes conditioned on an atomic outcome.
    pub fn project_atoms(&self, atoms: &[AtomLevel]) -> Vec<Complex64> {
        (0..self.cavity_dim)
            .map(|n| self.amplitude(n, atoms))
            .collect()
    }

    fn check_atom(&self, atom: usize) -> Result<()> {
        if atom < self.n_atoms {
            Ok(())
        } else {
            Err(Error::InvalidAtom {
                index: atom,
                n_atoms: self.n_atoms,
            })
        }
    }

    /// Applies a 2×2 map to every `(upper, lower)` index pair produced by
    /// `pairs`, where the pair amplitudes transform as
    /// `(u, l) → (m00 u + m01 l, m10 u + m11 l)`.
    fn apply_pairs(&self, pairs: impl Iterator<Item = (usize, usize, [Complex64; 4])>) -> Self {
        let mut out = self.clone();
        for (upper, lower, [m00, m01, m10, m11]) in pairs {
            let u = self.amplitudes[upper];
            let l = self.amplitudes[lower];
            out.amplitudes[upper] = m00 * u + m01 * l;
            out.amplitudes[lower] = m10 * u + m11 * l;
        }
        out
    }
}

fn atom_bits(atoms: &[AtomLevel]) -> usize {
    atoms
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == AtomLevel::Ground)
        .fold(0, |acc, (k, _)| acc | (1 << k))
}

/// Resonant exchange `|n,e⟩ ↔ |n+1,g⟩` for the active atom:
/// `|n,e⟩ → cos(ϑ)|n,e⟩ − i sin(ϑ)|n+1,g⟩`, with `ϑ = gt` or `√(n+1)·gt`.
/// The top Fock level has no partner and is left unchanged.
pub fn jc_evolve(
    state: &AtomCavityState,
    atom: usize,
    gt: f64,
    model: JcModel,
) -> Result<AtomCavityState> {
    state.check_atom(atom)?;
    let na = state.n_atoms;
    let bit = 1 << atom;
    let pairs = (0..state.cavity_dim - 1).flat_map(move |n| {
        let angle = match model {
            JcModel::Paper => gt,
            JcModel::Exact => ((n + 1) as f64).sqrt() * gt,
        };
        let (c, s) = (Complex64::new(angle.cos(), 0.0), angle.sin());
        (0..(1usize << na))
            .filter(move |others| others & bit == 0)
            .map(move |others| {
                let excited = (n << na) | others;
                let ground = ((n + 1) << na) | others | bit;
                (excited, ground, [c, -I * s, -I * s, c])
            })
    });
    Ok(state.apply_pairs(pairs))
}

pub fn jc_evolve_paper(state: &AtomCavityState, atom: usize, gt: f64) -> Result<AtomCavityState> {
    jc_evolve(state, atom, gt, JcModel::Paper)
}

pub fn jc_evolve_exact(state: &AtomCavityState, atom: usize, gt: f64) -> Result<AtomCavityState> {
    jc_evolve(state, atom, gt, JcModel::Exact)
}

/// Classical pulse on one atom:
/// `|e⟩ → cos(θ/2)|e⟩ + i e^{−iφ} sin(θ/2)|g⟩`,
/// `|g⟩ → cos(θ/2)|g⟩ + i e^{iφ} sin(θ/2)|e⟩`.
pub fn microwave_rotation(
    state: &AtomCavityState,
    atom: usize,
    theta: f64,
    phi: f64,
) -> Result<AtomCavityState> {
    state.check_atom(atom)?;
    let na = state.n_atoms;
    let bit = 1 << atom;
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let s = (theta / 2.0).sin();
    let to_e = I * Complex64::from_polar(s, phi);
    let to_g = I * Complex64::from_polar(s, -phi);
    let pairs = (0..state.cavity_dim).flat_map(move |n| {
        (0..(1usize << na))
            .filter(move |others| others & bit == 0)
            .map(move |others| {
                let excited = (n << na) | others;
                let ground = excited | bit;
                (excited, ground, [c, to_e, to_g, c])
            })
    });
    Ok(state.apply_pairs(pairs))
}

/// Interaction angles and pulse settings for the two-atom protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepParams {
    pub gt1: f64,
    pub gt2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl PrepParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.gt1,
            self.gt2,
            self.theta1,
            self.theta2,
            self.phi1,
            self.phi2,
        ];
        if all.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParams(
                "preparation parameters must be finite".into(),
            ))
        }
    }
}

/// Probabilities of the four atomic detection outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilities {
    pub ee: f64,
    pub eg: f64,
    pub ge: f64,
    pub gg: f64,
}

impl OutcomeProbabilities {
    pub fn total(&self) -> f64 {
        self.ee + self.eg + self.ge + self.gg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preparation {
    pub cavity: StateVector,
    pub success_probability: f64,
    pub outcomes: OutcomeProbabilities,
}

/// Runs both atoms from `|0, e, e⟩` and post-selects `(e, e)`.
pub fn two_atom_prepare(params: &PrepParams, model: JcModel) -> Result<Preparation> {
    two_atom_prepare_in(params, model, DEFAULT_DIM)
}

pub fn two_atom_prepare_in(
    params: &PrepParams,
    model: JcModel,
    cavity_dim: usize,
) -> Result<Preparation> {
    use AtomLevel::{Excited as E, Ground as G};
    params.validate()?;
    let mut state = AtomCavityState::basis(0, &[E, E], cavity_dim)?;
    state = jc_evolve(&state, 0, params.gt1, model)?;
    state = microwave_rotation(&state, 0, params.theta1, params.phi1)?;
    state = jc_evolve(&state, 1, params.gt2, model)?;
    state = microwave_rotation(&state, 1, params.theta2, params.phi2)?;

    let prob = |atoms: &[AtomLevel]| -> f64 {
        state
            .project_atoms(atoms)
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    };
    let outcomes = OutcomeProbabilities {
        ee: prob(&[E, E]),
        eg: prob(&[E, G]),
        ge: prob(&[G, E]),
        gg: prob(&[G, G]),
    };
    if outcomes.ee < 1e-24 {
        return Err(Error::PostSelectionFailed);
    }
    let cavity = StateVector::new(state.project_atoms(&[E, E]))?;
    Ok(Preparation {
        cavity,
        success_probability: outcomes.ee,
        outcomes,
    })
}

/// Unnormalized cavity amplitudes `(|0⟩, |1⟩, |2⟩)` after detecting both
/// atoms excited, in closed form for the fixed-angle model.
pub fn prepared_amplitudes_closed(params: &PrepParams) -> [Complex64; 3] {
    let (c1, s1) = (params.gt1.cos(), params.gt1.sin());
    let (c2, s2) = (params.gt2.cos(), params.gt2.sin());
    let (ca, sa) = ((params.theta1 / 2.0).cos(), (params.theta1 / 2.0).sin());
    let (cb, sb) = ((params.theta2 / 2.0).cos(), (params.theta2 / 2.0).sin());
    let e1 = Complex64::from_polar(1.0, params.phi1);
    let e2 = Complex64::from_polar(1.0, params.phi2);
    [
        Complex64::new(c1 * c2 * ca * cb, 0.0),
        e1 * (s1 * c2 * sa * cb) + e2 * (c1 * s2 * ca * sb),
        e1 * e2 * (s1 * s2 * sa * sb),
    ]
}

/// Post-selection probability `N` in closed form for the fixed-angle model.
pub fn success_probability_closed(params: &PrepParams) -> f64 {
    let (c1, s1) = (params.gt1.cos(), params.gt1.sin());
    let (c2, s2) = (params.gt2.cos(), params.gt2.sin());
    let (ca, sa) = ((params.theta1 / 2.0).cos(), (params.theta1 / 2.0).sin());
    let (cb, sb) = ((params.theta2 / 2.0).cos(), (params.theta2 / 2.0).sin());
    (c1 * c2 * ca * cb).powi(2)
        + (s1 * s2 * sa * sb).powi(2)
        + (s1 * c2 * sa * cb).powi(2)
        + (c1 * s2 * ca * sb).powi(2)
        + 0.125
            * (params.phi1 - params.phi2).cos()
            * (2.0 * params.gt1).sin()
            * (2.0 * params.gt2).sin()
            * params.theta1.sin()
            * params.theta2.sin()
}

/// Working dimension for displaced-parity evaluation at `α`: the displaced
/// state must fit below the truncation edge.
pub fn probe_dimension(alpha: Complex64, state_dim: usize) -> usize {
    let reach = alpha.norm() + 4.5;
    (state_dim + (reach * reach).ceil() as usize).max(16)
}

/// Dense `D(α) = exp(α a† − α* a)` on a truncated space.
pub fn displacement_operator(alpha: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = lowering(dim);
    let gen = a.adjoint() * alpha - a * alpha.conj();
    gen.exp()
}

/// `exp(α a† − α* a) v` by sub-stepped Taylor series on the tridiagonal
/// generator.
pub fn displace_vector(alpha: Complex64, v: &DVector<Complex64>) -> DVector<Complex64> {
    let dim = v.len();
    let sqrt: Vec<f64> = (0..=dim).map(|k| (k as f64).sqrt()).collect();
    let bound = 2.0 * alpha.norm() * (dim as f64).sqrt();
    let substeps = bound.ceil().max(1.0) as usize;
    let step = alpha / substeps as f64;
    let apply = |x: &DVector<Complex64>| -> DVector<Complex64> {
        DVector::from_fn(dim, |k, _| {
            let up = if k > 0 {
                step * sqrt[k] * x[k - 1]
            } else {
                ZERO
            };
            let down = if k + 1 < dim {
                step.conj() * sqrt[k + 1] * x[k + 1]
            } else {
                ZERO
            };
            up - down
        })
    };
    let mut out = v.clone();
    for _ in 0..substeps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for order in 1..=60 {
            term = apply(&term) * Complex64::new(1.0 / order as f64, 0.0);
            acc += &term;
            if term.norm() <= 1e-18 * acc.norm() {
                break;
            }
        }
        out = acc;
    }
    out
}

/// `Tr[D(−α) ρ D(α) P]` with `P = exp(iπ a†a)`.
pub fn displaced_parity(rho: &DensityMatrix, alpha: PhasePoint) -> f64 {
    let d = rho.dim();
    let big = probe_dimension(alpha.alpha(), d);
    // w_m = D(−α)|m⟩, only for levels the state occupies
    let occupied: Vec<bool> = (0..d)
        .map(|m| (0..d).any(|n| rho.get(m, n) != ZERO))
        .collect();
    let columns: Vec<Option<DVector<Complex64>>> = (0..d)
        .map(|m| {
            occupied[m].then(|| {
                let mut e = DVector::zeros(big);
                e[m] = Complex64::new(1.0, 0.0);
                displace_vector(-alpha.alpha(), &e)
            })
        })
        .collect();
    let mut acc = ZERO;
    for m in 0..d {
        for n in 0..d {
            let r = rho.get(m, n);
            let (Some(wm), Some(wn)) = (&columns[m], &columns[n]) else {
                continue;
            };
            if r == ZERO {
                continue;
            }
            let overlap: Complex64 = (0..big)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    wm[k] * wn[k].conj() * sign
                })
                .sum();
            acc += r * overlap;
        }
    }
    acc.re
}

/// `P_e(φ, α) = (1 + ⟨P⟩ cos φ) / 2`.
pub fn ramsey_probe_probability(rho: &DensityMatrix, alpha: PhasePoint, ramsey_phase: f64) -> f64 {
    let parity = displaced_parity(rho, alpha);
    probability_from_parity(parity, ramsey_phase)
}

fn probability_from_parity(parity: f64, ramsey_phase: f64) -> f64 {
    let p = 0.5 * (1.0 + parity * ramsey_phase.cos());
    debug_assert!(
        (-1e-9..=1.0 + 1e-9).contains(&p),
        "probe probability {p} outside [0, 1]"
    );
    p.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub x: f64,
    pub p: f64,
    /// Excited-state probability (exact, or the shot estimate) at phase 0.
    pub p_e_phase0: f64,
    /// Same at Ramsey phase π.
    pub p_e_phase_pi: f64,
    /// 0 means exact probabilities.
    pub shots: u64,
    /// `2[P_e(0) − P_e(π)]/π`, normalized so that `∫ W d²α = 1`.
    pub w_estimate: f64,
}

impl MeasurementRecord {
    pub fn alpha(&self) -> PhasePoint {
        PhasePoint::from_xp(self.x, self.p)
    }

    /// `P_e(0) < P_e(π)` on the recorded probabilities.
    pub fn indicates_negativity(&self) -> bool {
        self.p_e_phase0 < self.p_e_phase_pi
    }
}

/// Simulated Ramsey measurement of `W(α)`; with `shots > 0` each phase is
/// an independent binomial experiment drawn from a generator seeded with
/// `seed`.
pub fn measured_wigner(
    rho: &DensityMatrix,
    alpha: PhasePoint,
    shots: u64,
    seed: u64,
) -> MeasurementRecord {
    measurement_from_parity(alpha, displaced_parity(rho, alpha), shots, seed)
}

/// [`measured_wigner`] for an already computed displaced parity.
pub fn measurement_from_parity(
    alpha: PhasePoint,
    parity: f64,
    shots: u64,
    seed: u64,
) -> MeasurementRecord {
    let exact0 = probability_from_parity(parity, 0.0);
    let exact_pi = probability_from_parity(parity, std::f64::consts::PI);
    let (p0, p_pi) = if shots == 0 {
        (exact0, exact_pi)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |p: f64| -> f64 {
            let k = Binomial::new(shots, p)
                .expect("probability clamped to [0, 1]")
                .sample(&mut rng);
            k as f64 / shots as f64
        };
        let a = draw(exact0);
        let b = draw(exact_pi);
        (a, b)
    };
    MeasurementRecord {
        x: alpha.x(),
        p: alpha.p(),
        p_e_phase0: p0,
        p_e_phase_pi: p_pi,
        shots,
        w_estimate: 2.0 * (p0 - p_pi) / std::f64::consts::PI,
    }
}

/// Standard deviation of the shot-noise estimate of `W` at exact
/// probabilities `p0, p_pi`.
pub fn shot_noise_sigma(p0: f64, p_pi: f64, shots: u64) -> f64 {
    let var = (p0 * (1.0 - p0) + p_pi * (1.0 - p_pi)) / shots as f64;
    2.0 / std::f64::consts::PI * var.sqrt()
}

/// `P_e(0, α) < P_e(π, α)`, i.e. `W(α) < 0`.
pub fn negativity_criterion(rho: &DensityMatrix, alpha: PhasePoint) -> bool {
    let parity = displaced_parity(rho, alpha);
    probability_from_parity(parity, 0.0) < probability_from_parity(parity, std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{density_from_state, make_superposition};
    use crate::wigner::wigner_from_rho;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
    use AtomLevel::{Excited as E, Ground as G};

    fn showcase_rho() -> DensityMatrix {
        density_from_state(
            &make_superposition(
                Complex64::new((7.0f64 / 18.0).sqrt(), 0.0),
                Complex64::new(1.0 / 3.0, 0.0),
                Complex64::from_polar(SQRT_2 / 2.0, PI),
                8,
            )
            .unwrap(),
        )
    }

    fn target_params() -> PrepParams {
        PrepParams {
            gt1: FRAC_PI_4,
            gt2: FRAC_PI_4,
            theta1: 3.5 * PI,
            theta2: FRAC_PI_2,
            phi1: PI,
            phi2: 0.0,
        }
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn jc_fixed_angle_examples() {
        let s = AtomCavityState::basis(0, &[E], 8).unwrap();
        let out = jc_evolve_paper(&s, 0, FRAC_PI_4).unwrap();
        let h = SQRT_2 / 2.0;
        assert!(close(out.amplitude(0, &[E]), Complex64::new(h, 0.0), 1e-15));
        assert!(close(
            out.amplitude(1, &[G]),
            Complex64::new(0.0, -h),
            1e-15
        ));
        assert_eq!(jc_evolve_paper(&s, 0, 0.0).unwrap(), s);

        let s = AtomCavityState::basis(1, &[E], 8).unwrap();
        let out = jc_evolve_paper(&s, 0, FRAC_PI_4).unwrap();
        assert!(close(out.amplitude(1, &[E]), Complex64::new(h, 0.0), 1e-15));
        assert!(close(
            out.amplitude(2, &[G]),
            Complex64::new(0.0, -h),
            1e-15
        ));
    }

    #[test]
    fn jc_exact_examples() {
        let s0 = AtomCavityState::basis(0, &[E], 8).unwrap();
        for gt in [0.0, 0.3, 1.7] {
            assert_eq!(
                jc_evolve_exact(&s0, 0, gt).unwrap(),
                jc_evolve_paper(&s0, 0, gt).unwrap()
            );
        }
        let s1 = AtomCavityState::basis(1, &[E], 8).unwrap();
        let out = jc_evolve_exact(&s1, 0, FRAC_PI_4).unwrap();
        let angle = SQRT_2 * FRAC_PI_4;
        assert!(close(
            out.amplitude(1, &[E]),
            Complex64::new(angle.cos(), 0.0),
            1e-15
        ));
        assert!(close(
            out.amplitude(2, &[G]),
            Complex64::new(0.0, -angle.sin()),
            1e-15
        ));

        let out = jc_evolve_exact(&s1, 0, PI / (4.0 * SQRT_2)).unwrap();
        let h = SQRT_2 / 2.0;
        assert!(close(out.amplitude(1, &[E]), Complex64::new(h, 0.0), 1e-15));
        assert!(close(
            out.amplitude(2, &[G]),
            Complex64::new(0.0, -h),
            1e-15
        ));
    }

    #[test]
    fn microwave_examples() {
        let s = AtomCavityState::basis(0, &[E], 8).unwrap();
        assert_eq!(microwave_rotation(&s, 0, 0.0, 1.3).unwrap(), s);
        let out = microwave_rotation(&s, 0, FRAC_PI_2, 0.0).unwrap();
        let h = SQRT_2 / 2.0;
        assert!(close(out.amplitude(0, &[E]), Complex64::new(h, 0.0), 1e-15));
        assert!(close(out.amplitude(0, &[G]), Complex64::new(0.0, h), 1e-15));
    }

    #[test]
    fn atom_index_checked() {
        let s = AtomCavityState::basis(0, &[E], 4).unwrap();
        assert!(matches!(
            jc_evolve_paper(&s, 1, 0.1),
            Err(Error::InvalidAtom {
                index: 1,
                n_atoms: 1
            })
        ));
        assert!(matches!(
            microwave_rotation(&s, 2, 0.1, 0.0),
            Err(Error::InvalidAtom { .. })
        ));
        let psi = StateVector::new(vec![Complex64::new(1.0, 0.0); 3]).unwrap();
        assert!(AtomCavityState::product(&psi, &[]).is_err());
        assert!(AtomCavityState::product(&psi, &[E, E, E]).is_err());
    }

    #[test]
    fn closed_form_normalization_target_value() {
        assert_abs_diff_eq!(
            success_probability_closed(&target_params()),
            0.375,
            epsilon = 1e-15
        );
        let amps = prepared_amplitudes_closed(&target_params());
        let brute: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        assert_abs_diff_eq!(brute, 0.375, epsilon = 1e-15);
    }

    #[test]
    fn target_preparation() {
        let prep = two_atom_prepare(&target_params(), JcModel::Paper).unwrap();
        let s6 = 6f64.sqrt();
        let target = make_superposition(
            Complex64::new(s6 / 6.0, 0.0),
            Complex64::new(s6 / 3.0, 0.0),
            Complex64::new(s6 / 6.0, 0.0),
            8,
        )
        .unwrap();
        assert!(prep.cavity.fidelity(&target) > 1.0 - 1e-12);
        assert_abs_diff_eq!(prep.success_probability, 0.375, epsilon = 1e-12);
        assert_abs_diff_eq!(prep.outcomes.total(), 1.0, epsilon = 1e-12);

        let exact = two_atom_prepare(&target_params(), JcModel::Exact).unwrap();
        let f = exact.cavity.fidelity(&target);
        assert!(f < 1.0 - 1e-6, "fidelity {f}");
    }

    #[test]
    fn no_interaction_leaves_vacuum() {
        let params = PrepParams {
            gt1: 0.0,
            gt2: 0.0,
            theta1: 0.8,
            theta2: 2.1,
            phi1: 0.3,
            phi2: -1.0,
        };
        let prep = two_atom_prepare(&params, JcModel::Paper).unwrap();
        assert_abs_diff_eq!(prep.cavity.amplitude(0).norm(), 1.0, epsilon = 1e-15);
        let expected = (0.4f64.cos() * 1.05f64.cos()).powi(2);
        assert_abs_diff_eq!(prep.success_probability, expected, epsilon = 1e-15);
    }

    #[test]
    fn impossible_post_selection() {
        let params = PrepParams {
            gt1: 0.0,
            gt2: 0.0,
            theta1: PI,
            theta2: 0.0,
            phi1: 0.0,
            phi2: 0.0,
        };
        assert!(matches!(
            two_atom_prepare(&params, JcModel::Paper),
            Err(Error::PostSelectionFailed)
        ));
        let bad = PrepParams {
            gt1: f64::NAN,
            ..params
        };
        assert!(two_atom_prepare(&bad, JcModel::Paper).is_err());
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let alpha = Complex64::new(1.2, -0.7);
        let mut e = DVector::zeros(40);
        e[0] = Complex64::new(1.0, 0.0);
        let out = displace_vector(alpha, &e);
        let mut fact = 1.0;
        for n in 0..15 {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = (-alpha.norm_sqr() / 2.0).exp() * alpha.powu(n as u32) / fact.sqrt();
            assert!(close(out[n], expected, 1e-12));
        }
    }

    #[test]
    fn taylor_action_matches_dense_exponential() {
        let alpha = Complex64::new(-1.5, 0.9);
        let dim = 30;
        let dense = displacement_operator(alpha, dim);
        for m in [0, 1, 2, 5] {
            let mut e = DVector::zeros(dim);
            e[m] = Complex64::new(1.0, 0.0);
            let diff = (displace_vector(alpha, &e) - dense.column(m)).norm();
            assert!(diff < 1e-11, "column {m}: {diff}");
        }
    }

    #[test]
    fn probe_probabilities() {
        let vac = DensityMatrix::vacuum(8);
        let o = PhasePoint::origin();
        assert_abs_diff_eq!(ramsey_probe_probability(&vac, o, 0.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            ramsey_probe_probability(&DensityMatrix::fock(1, 8), o, 0.0),
            0.0,
            epsilon = 1e-12
        );
        let pt = PhasePoint::from_xp(0.7, -1.1);
        assert_abs_diff_eq!(
            ramsey_probe_probability(&showcase_rho(), pt, FRAC_PI_2),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn exact_measurement_matches_fock_sum() {
        let vac = DensityMatrix::vacuum(8);
        let rec = measured_wigner(&vac, PhasePoint::origin(), 0, 0);
        assert_abs_diff_eq!(rec.w_estimate, 2.0 / PI, epsilon = 1e-12);
        assert_abs_diff_eq!(rec.p_e_phase0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rec.p_e_phase_pi, 0.0, epsilon = 1e-12);

        let rho = showcase_rho();
        let rec = measured_wigner(&rho, PhasePoint::origin(), 0, 0);
        assert_abs_diff_eq!(rec.w_estimate, 2.0 / PI * 7.0 / 9.0, epsilon = 1e-9);
        for pt in [
            PhasePoint::from_xp(3.0, 3.0),
            PhasePoint::from_xp(-2.1, 0.6),
            PhasePoint::from_xp(1.0, -2.5),
        ] {
            let rec = measured_wigner(&rho, pt, 0, 0);
            assert_abs_diff_eq!(rec.w_estimate, wigner_from_rho(&rho, pt), epsilon = 1e-9);
        }
    }

    #[test]
    fn shot_noise_is_seeded() {
        let rho = showcase_rho();
        let pt = PhasePoint::from_xp(0.3, 0.2);
        let a = measured_wigner(&rho, pt, 100_000, 42);
        let b = measured_wigner(&rho, pt, 100_000, 42);
        assert_eq!(a, b);
        let c = measured_wigner(&rho, pt, 100_000, 43);
        assert_ne!(a.w_estimate, c.w_estimate);

        let vac = measured_wigner(&DensityMatrix::vacuum(8), PhasePoint::origin(), 100_000, 7);
        let exact = measured_wigner(&DensityMatrix::vacuum(8), PhasePoint::origin(), 0, 7);
        let sigma = shot_noise_sigma(exact.p_e_phase0, exact.p_e_phase_pi, 100_000);
        assert!((vac.w_estimate - 2.0 / PI).abs() <= 3.0 * sigma + 1e-12);

        let exact = measured_wigner(&rho, pt, 0, 0);
        let sigma = shot_noise_sigma(exact.p_e_phase0, exact.p_e_phase_pi, 100_000);
        assert!((a.w_estimate - exact.w_estimate).abs() <= 4.0 * sigma);
    }

    #[test]
    fn negativity_criterion_examples() {
        assert!(negativity_criterion(
            &DensityMatrix::fock(1, 8),
            PhasePoint::origin()
        ));
        for pt in [PhasePoint::origin(), PhasePoint::from_xp(2.0, -1.0)] {
            assert!(!negativity_criterion(&DensityMatrix::vacuum(8), pt));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn simulation_matches_closed_form(
            gt1 in -PI..PI, gt2 in -PI..PI,
            theta1 in -2.0 * PI..2.0 * PI, theta2 in -2.0 * PI..2.0 * PI,
            phi1 in -PI..PI, phi2 in -PI..PI,
        ) {
            let params = PrepParams { gt1, gt2, theta1, theta2, phi1, phi2 };
            let n = success_probability_closed(&params);
            prop_assume!(n > 1e-6);
            let prep = two_atom_prepare(&params, JcModel::Paper).unwrap();
            prop_assert!((prep.success_probability - n).abs() < 1e-12);
            prop_assert!((prep.outcomes.total() - 1.0).abs() < 1e-12);
            let closed = prepared_amplitudes_closed(&params);
            for (k, c) in closed.iter().enumerate() {
                prop_assert!((prep.cavity.amplitude(k) - c / n.sqrt()).norm() < 1e-12);
            }
            for k in 3..prep.cavity.dim() {
                prop_assert_eq!(prep.cavity.amplitude(k).norm(), 0.0);
            }
        }

        #[test]
        fn protocol_steps_are_unitary(
            n in 0usize..6, atom_e in any::<bool>(), other_e in any::<bool>(),
            gt in -3.0f64..3.0, theta in -6.0f64..6.0, phi in -3.0f64..3.0,
        ) {
            let lvl = |b: bool| if b { E } else { G };
            let s = AtomCavityState::basis(n, &[lvl(atom_e), lvl(other_e)], 8).unwrap();
            let s = microwave_rotation(&s, 1, 0.7, 0.2).unwrap();
            for out in [
                jc_evolve_paper(&s, 0, gt).unwrap(),
                jc_evolve_exact(&s, 0, gt).unwrap(),
                microwave_rotation(&s, 0, theta, phi).unwrap(),
            ] {
                prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
            }
            let back = microwave_rotation(&microwave_rotation(&s, 0, theta, phi).unwrap(), 0, -theta, phi).unwrap();
            prop_assert!((back.amplitudes.clone() - s.amplitudes.clone()).norm() < 1e-12);
        }
    }
}
