use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use super::lattice::{FrequencyLattice, MAX_DIM};
use crate::error::{invalid, Result};

/// Midpoint quadrature on `B(x₀, r)`: the points `x₀ + Δx·j`, `j ∈ ℤⁿ`, that lie
/// in the closed ball, each with weight `Δxⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallQuadrature {
    dim: usize,
    center: [f64; MAX_DIM],
    radius: f64,
    spacing: f64,
    offsets: Arc<[[i32; MAX_DIM]]>,
}

impl BallQuadrature {
    pub fn new(center: &[f64], radius: f64, spacing: f64) -> Result<Self> {
        let dim = center.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid(format!("ball dimension {dim} not in 1..={MAX_DIM}")));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(invalid(format!("ball radius {radius} must be positive")));
        }
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(invalid(format!("ball grid spacing {spacing} must be positive")));
        }
        let reach = (radius / spacing).floor() as i32;
        if (2 * reach as i64 + 1).pow(dim as u32) > 1 << 28 {
            return Err(invalid(format!("ball grid spacing {spacing} is too fine")));
        }
        let r2 = (radius / spacing) * (radius / spacing) * (1.0 + 1e-12);
        let mut offsets = Vec::new();
        let mut j = [0i32; MAX_DIM];
        visit(dim, 0, reach, &mut j, &mut |j| {
            let n2: f64 = j.iter().map(|&v| (v as f64) * (v as f64)).sum();
            if n2 <= r2 {
                offsets.push(*j);
            }
        });
        let mut c = [0.0; MAX_DIM];
        c[..dim].copy_from_slice(center);
        Ok(Self {
            dim,
            center: c,
            radius,
            spacing,
            offsets: offsets.into(),
        })
    }

    /// Unit ball at the origin.
    pub fn unit(dim: usize, spacing: f64) -> Result<Self> {
        Self::new(&vec![0.0; dim], 1.0, spacing)
    }

    /// Grid spacing `2π/(h·M)` for the smallest FFT-friendly `M` that brings the
    /// spacing down to at most `target`; such grids coincide with the dual lattice.
    pub fn commensurate_spacing(lattice: &FrequencyLattice, target: f64) -> f64 {
        let h = lattice.spacing();
        let order = smooth_at_least((TAU / (h * target) - 1e-9).ceil() as usize);
        TAU / (h * order as f64)
    }

    /// Spacing rule `min(2π/(10·Ξ), 0.05)`: at least ten nodes per shortest wavelength.
    pub fn default_spacing(lattice: &FrequencyLattice) -> f64 {
        (TAU / (10.0 * lattice.cutoff())).min(0.05)
    }

    /// `B(0,1)` on a grid commensurate with `lattice` at the default resolution.
    pub fn default_for(lattice: &FrequencyLattice) -> Result<Self> {
        let spacing = Self::commensurate_spacing(lattice, Self::default_spacing(lattice));
        Self::unit(lattice.dim(), spacing)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.dim]
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn node_weight(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Quadrature measure of the ball, `#nodes·Δxⁿ`.
    pub fn measure(&self) -> f64 {
        self.len() as f64 * self.node_weight()
    }

    pub(crate) fn offsets(&self) -> &[[i32; MAX_DIM]] {
        &self.offsets
    }

    /// Largest `|jᵢ|` over the nodes.
    pub(crate) fn reach(&self) -> i32 {
        (self.radius / self.spacing).floor() as i32
    }

    pub fn node(&self, i: usize) -> [f64; MAX_DIM] {
        let j = self.offsets[i];
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.center[a] + self.spacing * j[a] as f64;
        }
        x
    }

    pub fn nodes(&self) -> impl Iterator<Item = [f64; MAX_DIM]> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// FFT order `M` with `Δx·h·M = 2π`, if the grid is commensurate with the lattice.
    pub fn fft_order(&self, lattice: &FrequencyLattice) -> Option<usize> {
        if lattice.dim() != self.dim {
            return None;
        }
        let m = TAU / (lattice.spacing() * self.spacing);
        let rounded = m.round();
        if rounded < 1.0 || (m - rounded).abs() > 1e-9 * rounded {
            return None;
        }
        let m = rounded as usize;
        (m > 2 * self.reach() as usize).then_some(m)
    }
}

fn visit(dim: usize, axis: usize, reach: i32, j: &mut [i32; MAX_DIM], f: &mut impl FnMut(&[i32; MAX_DIM])) {
    if axis == dim {
        f(j);
        return;
    }
    for v in -reach..=reach {
        j[axis] = v;
        visit(dim, axis + 1, reach, j, f);
    }
    j[axis] = 0;
}

/// Smallest integer `≥ n` whose prime factors are 2, 3 and 5.
pub(crate) fn smooth_at_least(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Values attached to the nodes of one [`BallQuadrature`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField<T> {
    ball: BallQuadrature,
    values: Vec<T>,
}

impl<T> SampledField<T> {
    pub fn new(ball: BallQuadrature, values: Vec<T>) -> Result<Self> {
        if values.len() != ball.len() {
            return Err(invalid(format!(
                "{} values for {} quadrature nodes",
                values.len(),
                ball.len()
            )));
        }
        Ok(Self { ball, values })
    }

    pub fn ball(&self) -> &BallQuadrature {
        &self.ball
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> SampledField<U> {
        SampledField {
            ball: self.ball.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

impl SampledField<Complex64> {
    pub fn modulus(&self) -> SampledField<f64> {
        self.map(|v| v.norm())
    }
}

/// Anything whose magnitude can enter an `Lᵖ` norm.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}
