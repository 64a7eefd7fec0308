//! Simulation and tomographic reconstruction of two-spatial-qubit states.
//!
//! A biphoton pair produced by parametric down-conversion and transmitted
//! through a pair of identical double slits carries a which-slit degree of
//! freedom in each arm: a pair of spatial qubits. This crate models the whole
//! measurement chain for such states:
//!
//! - [`optics`] — Fresnel propagation of the slit modes to the detection
//!   plane and the post-selection overlap kernels of the detector slits,
//!   evaluated by adaptive quadrature.
//! - [`stategen`] — construction of pure two-qubit states from a pump
//!   transverse profile, and incoherent mixtures of them.
//! - [`measurement`] — the nine two-qubit measurement settings, coincidence
//!   probabilities for an arbitrary density matrix, and seeded count
//!   simulation with multinomial or Poisson noise.
//! - [`tomography`] — linear inversion of measured counts back into a
//!   density matrix, validity diagnostics, projection onto the physical set,
//!   and mixture analysis.
//! - [`fringe`] — fourth-order interference patterns versus detector
//!   position.
//!
//! Monte Carlo loops (count simulation sweeps, bootstrap resampling, fringe
//! scans) run on rayon when the `parallel` feature is enabled (default) and
//! fall back to sequential iteration otherwise; results are identical either
//! way.

pub mod error;
pub mod fringe;
pub mod geometry;
pub mod io;
pub mod measurement;
pub mod optics;
pub mod par;
pub mod presets;
pub mod quad;
pub mod stategen;
pub mod states;
pub mod tomography;

pub use error::Error;

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
