use std::collections::BTreeMap;

use num_complex::Complex64;

use super::lattice::{FrequencyLattice, MAX_DIM};
use crate::error::{Error, Result};

/// Finitely supported coefficient map `ξ ↦ f̂(ξ)` on a [`FrequencyLattice`].
///
/// Modes are kept sorted by lattice index, so every sum over the support runs
/// in one fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    lattice: FrequencyLattice,
    indices: Vec<[i64; MAX_DIM]>,
    freqs: Vec<[f64; MAX_DIM]>,
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn zero(lattice: FrequencyLattice) -> Self {
        Self {
            lattice,
            indices: Vec::new(),
            freqs: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    pub fn from_modes<I, K>(lattice: FrequencyLattice, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Complex64)>,
        K: AsRef<[i64]>,
    {
        let mut map = BTreeMap::new();
        for (index, c) in modes {
            let index = index.as_ref();
            if index.len() != lattice.dim() {
                return Err(Error::DimensionMismatch {
                    expected: lattice.dim(),
                    found: index.len(),
                });
            }
            if !lattice.contains(index) {
                return Err(Error::OffLattice {
                    index: index.to_vec(),
                    bound: lattice.half_width(),
                });
            }
            let mut key = [0i64; MAX_DIM];
            key[..index.len()].copy_from_slice(index);
            if map.insert(key, c).is_some() {
                return Err(Error::DuplicateIndex(index.to_vec()));
            }
        }
        Ok(Self::from_sorted(lattice, map.into_iter()))
    }

    pub fn single(lattice: FrequencyLattice, index: &[i64], coeff: Complex64) -> Result<Self> {
        Self::from_modes(lattice, [(index, coeff)])
    }

    /// Samples `f̂` at every lattice point, keeping the points where `coeff` returns a value.
    pub fn from_fn<F>(lattice: FrequencyLattice, mut coeff: F) -> Self
    where
        F: FnMut(&[f64]) -> Option<Complex64>,
    {
        let dim = lattice.dim();
        let h = lattice.spacing();
        let modes = lattice.indices().filter_map(|idx| {
            let mut xi = [0.0; MAX_DIM];
            for a in 0..dim {
                xi[a] = idx[a] as f64 * h;
            }
            coeff(&xi[..dim]).map(|c| (idx, c))
        });
        Self::from_sorted(lattice, modes)
    }

    // `modes` must be strictly increasing in index and on the lattice.
    pub(crate) fn from_sorted(
        lattice: FrequencyLattice,
        modes: impl Iterator<Item = ([i64; MAX_DIM], Complex64)>,
    ) -> Self {
        let h = lattice.spacing();
        let mut out = Self::zero(lattice);
        for (idx, c) in modes {
            out.freqs.push(idx.map(|k| k as f64 * h));
            out.indices.push(idx);
            out.coeffs.push(c);
        }
        out
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mode_index(&self, i: usize) -> &[i64] {
        &self.indices[i][..self.dim()]
    }

    pub fn frequency(&self, i: usize) -> &[f64] {
        &self.freqs[i][..self.dim()]
    }

    pub(crate) fn padded_frequencies(&self) -> &[[f64; MAX_DIM]] {
        &self.freqs
    }

    pub(crate) fn padded_indices(&self) -> &[[i64; MAX_DIM]] {
        &self.indices
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `(index, frequency, coefficient)` triples in index order.
    pub fn modes(&self) -> impl Iterator<Item = (&[i64], &[f64], Complex64)> + '_ {
        let d = self.dim();
        self.indices
            .iter()
            .zip(&self.freqs)
            .zip(&self.coeffs)
            .map(move |((k, xi), &c)| (&k[..d], &xi[..d], c))
    }

    pub fn coefficient_at(&self, index: &[i64]) -> Complex64 {
        let mut key = [0i64; MAX_DIM];
        key[..index.len()].copy_from_slice(index);
        match self.indices.binary_search(&key) {
            Ok(i) => self.coeffs[i],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Same support, coefficients replaced by `g(ξ, f̂(ξ))`.
    pub fn map_coefficients<G>(&self, mut g: G) -> Self
    where
        G: FnMut(&[f64], Complex64) -> Complex64,
    {
        let d = self.dim();
        let coeffs = self
            .freqs
            .iter()
            .zip(&self.coeffs)
            .map(|(xi, &c)| g(&xi[..d], c))
            .collect();
        Self {
            lattice: self.lattice,
            indices: self.indices.clone(),
            freqs: self.freqs.clone(),
            coeffs,
        }
    }

    /// Keeps the modes whose frequency satisfies `keep`.
    pub fn restrict<K>(&self, mut keep: K) -> Self
    where
        K: FnMut(&[f64]) -> bool,
    {
        let d = self.dim();
        let mut out = Self::zero(self.lattice);
        for i in 0..self.len() {
            if keep(&self.freqs[i][..d]) {
                out.indices.push(self.indices[i]);
                out.freqs.push(self.freqs[i]);
                out.coeffs.push(self.coeffs[i]);
            }
        }
        out
    }

    /// `α·self + β·other` on the union of the supports.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(crate::error::invalid("spectral functions live on different lattices"));
        }
        let mut map: BTreeMap<[i64; MAX_DIM], Complex64> = BTreeMap::new();
        for (k, &c) in self.indices.iter().zip(&self.coeffs) {
            *map.entry(*k).or_default() += alpha * c;
        }
        for (k, &c) in other.indices.iter().zip(&other.coeffs) {
            *map.entry(*k).or_default() += beta * c;
        }
        Ok(Self::from_sorted(self.lattice, map.into_iter()))
    }

    /// Coefficients `e^{i x₀·ξ} f̂(ξ)`: the data whose synthesis is `f(· + x₀)`.
    pub fn modulated(&self, shift: &[f64]) -> Self {
        self.map_coefficients(|xi, c| {
            let phase: f64 = xi.iter().zip(shift).map(|(a, b)| a * b).sum();
            c * Complex64::from_polar(1.0, phase)
        })
    }

    /// `‖f̂‖₁·hⁿ`, the trivial pointwise bound on the synthesis.
    pub fn coefficient_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum::<f64>() * self.lattice.cell_volume()
    }

    /// Smallest and largest `|ξ|` over the support, `None` when empty.
    pub fn radial_extent(&self) -> Option<(f64, f64)> {
        let d = self.dim();
        self.freqs
            .iter()
            .map(|xi| xi[..d].iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(None, |acc, r| match acc {
                None => Some((r, r)),
                Some((lo, hi)) => Some((f64::min(lo, r), f64::max(hi, r))),
            })
    }
}

/// Physical-space value `f(x) = Σ_ξ e^{ix·ξ} f̂(ξ) hⁿ`.
pub fn synthesize(f: &SpectralFunction, x: &[f64]) -> Complex64 {
    let d = f.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, &c) in f.padded_frequencies().iter().zip(f.coefficients()) {
        let phase: f64 = (0..d).map(|a| x[a] * xi[a]).sum();
        acc += c * Complex64::from_polar(1.0, phase);
    }
    acc * f.lattice().cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat2() -> FrequencyLattice {
        FrequencyLattice::new(2, 0.5, 8.0).unwrap()
    }

    #[test]
    fn constant_mode_synthesizes_to_cell_volume() {
        let f = SpectralFunction::single(lat2(), &[0, 0], Complex64::new(1.0, 0.0)).unwrap();
        for x in [[0.0, 0.0], [0.3, -0.7], [12.0, 5.0]] {
            let v = synthesize(&f, &x);
            assert!((v - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn conjugate_pair_is_real_cosine() {
        let one = Complex64::new(1.0, 0.0);
        let f = SpectralFunction::from_modes(lat2(), [([2, 0], one), ([-2, 0], one)]).unwrap();
        for x1 in [-0.9, 0.0, 0.4, 2.5] {
            let v = synthesize(&f, &[x1, 0.3]);
            assert!(v.im.abs() < 1e-15);
            assert!((v.re - 0.5 * f64::cos(x1)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_modes() {
        let one = Complex64::new(1.0, 0.0);
        assert!(SpectralFunction::single(lat2(), &[17, 0], one).is_err());
        assert!(SpectralFunction::single(lat2(), &[1], one).is_err());
        assert!(SpectralFunction::from_modes(lat2(), [([1, 1], one), ([1, 1], one)]).is_err());
    }

    #[test]
    fn modes_are_sorted_and_lookup_works() {
        let f = SpectralFunction::from_modes(
            lat2(),
            [([3, 1], Complex64::new(1.0, 0.0)), ([-2, 5], Complex64::new(0.0, 2.0))],
        )
        .unwrap();
        assert_eq!(f.mode_index(0), &[-2, 5]);
        assert_eq!(f.frequency(0), &[-1.0, 2.5]);
        assert_eq!(f.coefficient_at(&[3, 1]), Complex64::new(1.0, 0.0));
        assert_eq!(f.coefficient_at(&[0, 0]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn combine_merges_supports() {
        let one = Complex64::new(1.0, 0.0);
        let f = SpectralFunction::from_modes(lat2(), [([1, 0], one), ([0, 1], one)]).unwrap();
        let g = SpectralFunction::from_modes(lat2(), [([0, 1], one), ([2, 2], one)]).unwrap();
        let h = f.combine(one, &g, -one).unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(h.coefficient_at(&[0, 1]), Complex64::new(0.0, 0.0));
        assert_eq!(h.coefficient_at(&[2, 2]), -one);
    }
}
