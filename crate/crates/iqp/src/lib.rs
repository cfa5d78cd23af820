//! Sparse IQP circuits and everything needed to study them classically.
//!
//! An IQP circuit is a diagonal phase program conjugated by Hadamards on
//! every qubit. This crate represents such circuits as X-programs (binary
//! supports with dyadic phase exponents) and provides:
//!
//! * [`program`] - the X-program type, sparse random families, exact phase
//!   evaluation, canonical JSON,
//! * [`simulate`] - dense output distributions, zero-amplitudes, the Ising
//!   partition-function route, and moment Monte Carlo,
//! * [`noise`] - output bit flips, the equivalent Fourier damping channel,
//! * [`sampler`] - sparse Fourier tables, coefficient estimation, and the
//!   nonnegative conditional sampler over truncated spectra,
//! * [`codes`] - linear-code protection of X-programs (repetition codes,
//!   majority decoding, failure bounds),
//! * [`layout`] - interaction graphs, edge colorings, and routing onto a
//!   nearest-neighbour grid via sorting networks,
//! * [`brute`] - small brute-force reference implementations used to check
//!   the fast paths.
//!
//! Everything that consumes randomness takes an explicit [`rng::Rng`], and
//! all parallel paths merge results by work-item index, so outputs depend
//! only on the seed, never on thread count.

pub mod brute;
pub mod codes;
mod error;
pub mod layout;
pub mod mask;
pub mod noise;
pub mod program;
pub mod rng;
pub mod sampler;
pub mod simulate;
pub mod wht;

pub use error::{Error, Result};
pub use mask::Mask;
pub use program::{PhaseExponent, SparseParams, XProgram};
pub use rng::Rng;
