use num_complex::Complex64;

use crate::spectral::{FrequencyLattice, SpectralFunction};

/// Coefficients `f̂(ξ) = (1+|ξ|²)^{−β}` with `β = σ/2 + n/4 + margin`, so that
/// `‖f‖_{H^σ}` stays bounded as the cutoff grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityProfile {
    pub sigma: f64,
    pub dim: usize,
    pub margin: f64,
}

impl RegularityProfile {
    pub fn new(sigma: f64, dim: usize) -> Self {
        Self {
            sigma,
            dim,
            margin: 0.25,
        }
    }

    pub fn beta(&self) -> f64 {
        self.sigma / 2.0 + self.dim as f64 / 4.0 + self.margin
    }

    /// The profile on every point of `lattice`.
    pub fn function(&self, lattice: &FrequencyLattice) -> SpectralFunction {
        let beta = self.beta();
        SpectralFunction::from_fn(*lattice, |xi| {
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            Some(Complex64::new((1.0 + r2).powf(-beta), 0.0))
        })
    }
}
