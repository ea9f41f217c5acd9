use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Uniform frequency grid `h·ℤⁿ ∩ [-Ξ, Ξ]ⁿ` standing in for `ℝⁿ` in every Fourier sum.
///
/// Frequencies are addressed by integer indices `k` with `|kᵢ| ≤ Ξ/h`; the
/// frequency of an index is `h·k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyLattice {
    dim: usize,
    spacing: f64,
    half_width: i64,
}

impl FrequencyLattice {
    pub fn new(dim: usize, spacing: f64, cutoff: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidLattice(format!("dimension {dim} not in 1..={MAX_DIM}")));
        }
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::InvalidLattice(format!("spacing {spacing} must be positive")));
        }
        if !cutoff.is_finite() || cutoff <= 0.0 {
            return Err(Error::InvalidLattice(format!("cutoff {cutoff} must be positive")));
        }
        if spacing > FRAC_PI_2 {
            return Err(Error::InvalidLattice(format!(
                "spacing {spacing} exceeds pi/2; the unit ball would alias"
            )));
        }
        let ratio = cutoff / spacing;
        let half_width = ratio.round();
        if half_width < 1.0 || (ratio - half_width).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidLattice(format!(
                "cutoff {cutoff} is not a positive integer multiple of spacing {spacing}"
            )));
        }
        Ok(Self {
            dim,
            spacing,
            half_width: half_width as i64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Frequency step `h`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn cutoff(&self) -> f64 {
        self.half_width as f64 * self.spacing
    }

    /// Largest admissible `|kᵢ|`.
    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        (2 * self.half_width + 1) as usize
    }

    pub fn total_points(&self) -> u128 {
        (self.points_per_axis() as u128).pow(self.dim as u32)
    }

    /// Riemann-sum weight `hⁿ` attached to every lattice point.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn contains(&self, index: &[i64]) -> bool {
        index.len() == self.dim && index.iter().all(|k| k.abs() <= self.half_width)
    }

    pub fn frequency(&self, index: &[i64]) -> Vec<f64> {
        index.iter().map(|&k| k as f64 * self.spacing).collect()
    }

    /// Inclusive index bounds of the lattice points `k·h ∈ [lo, hi)` on one axis,
    /// clamped to the lattice. Empty when the first exceeds the second.
    pub(crate) fn axis_index_range(&self, lo: f64, hi: f64) -> (i64, i64) {
        let h = self.spacing;
        let mut a = (lo / h).ceil() as i64;
        if (a as f64 - 1.0) * h >= lo {
            a -= 1;
        }
        let mut b = (hi / h).floor() as i64;
        if b as f64 * h >= hi {
            b -= 1;
        }
        (a.max(-self.half_width), b.min(self.half_width))
    }

    /// Iterates over every lattice index in lexicographic order.
    pub fn indices(&self) -> impl Iterator<Item = [i64; MAX_DIM]> + '_ {
        let n = self.points_per_axis() as u128;
        let total = self.total_points();
        let k = self.half_width;
        let dim = self.dim;
        (0..total).map(move |mut flat| {
            let mut idx = [0i64; MAX_DIM];
            for axis in (0..dim).rev() {
                idx[axis] = (flat % n) as i64 - k;
                flat /= n;
            }
            idx
        })
    }
}
