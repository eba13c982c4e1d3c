//! Rate-distortion analysis for a Gaussian random walk observed through
//! factor-M decimation.
//!
//! The source is the cumulative sum X_n = W_1 + ... + W_n of i.i.d. standard
//! normal increments. An encoder sees only every M-th sample and spends R bits
//! per *source* sample describing what it saw; the decoder linearly
//! interpolates a full-length reconstruction. Two strategies are compared:
//!
//! * estimate-and-compress (EC): interpolate first, then compress the
//!   interpolated process optimally;
//! * compress-and-estimate (CE): compress the decimated process optimally,
//!   then interpolate the compressed version.
//!
//! Both distortions decompose as a fixed interpolation MMSE floor plus
//! rate-dependent coding terms, computed here by reverse water-filling against
//! the relevant spectral densities. Every closed form has an independent
//! check: brute-force eigensolves for the spectra, Monte Carlo simulation for
//! the interpolation floor and the compression test channel, and quadrature
//! identities for the integrals.
//!
//! Modules:
//! * [`spectra`] - covariance models, eigenvalue formulas, spectral densities;
//! * [`waterfill`] - reverse water-filling points, rate inversion, quadrature;
//! * [`schemes`] - EC/CE distortion curves, high-rate forms, finite-N CE;
//! * [`mc_oracle`] - simulation and brute-force oracles with a deterministic
//!   counter-based RNG.

pub mod error;
pub mod linalg;
pub mod mc_oracle;
pub mod schemes;
pub mod spectra;
pub mod waterfill;

pub use error::{Error, Result};
