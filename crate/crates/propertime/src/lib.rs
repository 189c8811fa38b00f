//! Proper-time rate operator for spin-1/2 Dirac particles.
//!
//! The library answers one physical question in four numerically independent
//! ways: what multiple of coordinate time does a Dirac particle's internal
//! clock accumulate?
//!
//! - [`invariance`] re-derives the rate operator from scratch: it assembles
//!   the linear constraints that Lorentz, time-reversal and parity invariance
//!   impose on a Hermitian sandwich operator and solves for the null space,
//!   recovering `beta` (the Dirac matrix) as the unique survivor.
//! - [`momentum`] evolves single momentum modes exactly (closed-form spectral
//!   calculus, no time stepping) and exposes the Heisenberg-picture `beta(t)`
//!   with its zitterbewegung cross terms.
//! - [`wavepacket`] integrates the rate over Gaussian momentum-space packets,
//!   producing proper-time series, the `sqrt(1 - v^2)` narrow-packet limit and
//!   oscillation spectra.
//! - [`lattice`] couples a magnetic field on a 2-D periodic grid and verifies
//!   the order-`v^2` Foldy-Wouthuysen reduction of the rate, including the
//!   `sigma.B` magnetic term, by scaling studies with pinned slopes.
//! - [`si`] converts the magnetic rate shift to SI units (shift per tesla,
//!   critical field, zitterbewegung frequency) and sweeps magnetar-strength
//!   fields.
//!
//! Everything internal works in natural units (`hbar = c = 1`); only [`si`]
//! touches SI constants. All computations are deterministic: fixed seeds,
//! fixed summation orders, no threading in reductions.

// numeric preconditions use `!(x > 0.0)` so NaN parameters are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fit;
pub mod invariance;
pub mod lattice;
pub mod momentum;
pub mod selftest;
pub mod si;
pub mod spinor;
pub mod tol;
pub mod wavepacket;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
