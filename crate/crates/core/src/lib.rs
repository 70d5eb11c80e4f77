//! Dissipative dynamics of few-photon superposition states in a lossy cavity.
//!
//! The crate evolves truncated Fock-space density matrices under the
//! zero-temperature photon-loss master equation and evaluates
//!
//! * the Wigner function by a Fock-basis sum, by closed forms for states
//!   supported on `|0⟩, |1⟩, |2⟩`, and by Gaussian-convolution quadrature;
//! * the normal-ordered `g2(0)` (invariant under loss) and the
//!   anti-normal-ordered `g2a(0)` (not invariant);
//! * a two-atom Jaynes–Cummings preparation protocol and a Ramsey
//!   parity measurement of the Wigner function.
//!
//! All phase-space functions use the normalization `∫ W d²α = 1` with
//! `α = x + ip` and `d²α = dx dp`.

pub mod commands;
pub mod config;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod io;
pub mod laguerre;
pub mod presets;
pub mod qed;
pub mod quadrature;
pub mod statistics;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;
