//! Spectral evaluation of dispersive evolutions `e^{itP(D)}f` on band-limited
//! data, with the maximal-function, counterexample and convergence-rate
//! experiments built on top.

pub mod decompose;
pub mod error;
pub mod experiments;
pub mod extremals;
pub mod propagator;
pub mod spectral;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spectral::{
    l2_norm, lp_ball_norm, sobolev_norm, synthesize, BallQuadrature, FrequencyLattice, Magnitude, SampledField,
    SpectralFunction,
};
pub use symbols::Symbol;
