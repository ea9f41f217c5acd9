//! Frequency lattices, band-limited functions and their norms.
//!
//! Every integral over `ℝⁿ` in frequency is replaced by a Riemann sum over a
//! [`FrequencyLattice`] with weight `hⁿ`; physical-space integrals over balls
//! use the midpoint rule of a [`BallQuadrature`].

mod ball;
mod function;
mod lattice;
mod norms;

pub use ball::{BallQuadrature, Magnitude, SampledField};
pub use function::{synthesize, SpectralFunction};
pub use lattice::{FrequencyLattice, MAX_DIM};
pub use norms::{l2_norm, lp_ball_norm, sobolev_norm};
