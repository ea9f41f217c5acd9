use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::spectral::{FrequencyLattice, SpectralFunction};

/// `count` distinct lattice points accepted by `keep`, chosen uniformly, with
/// circular complex Gaussian coefficients of unit variance.
///
/// Deterministic in `seed`.
pub fn random_band_function<K>(lattice: &FrequencyLattice, count: usize, seed: u64, keep: K) -> Result<SpectralFunction>
where
    K: Fn(&[f64]) -> bool,
{
    let h = lattice.spacing();
    let d = lattice.dim();
    let candidates: Vec<_> = lattice
        .indices()
        .filter(|idx| {
            let xi: Vec<f64> = idx[..d].iter().map(|&k| k as f64 * h).collect();
            keep(&xi)
        })
        .collect();
    if candidates.len() < count {
        return Err(invalid(format!(
            "band holds {} lattice points, {count} requested",
            candidates.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = sample(&mut rng, candidates.len(), count).into_vec();
    chosen.sort_unstable();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let modes: Vec<_> = chosen
        .into_iter()
        .map(|i| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            (candidates[i][..d].to_vec(), Complex64::new(scale * re, scale * im))
        })
        .collect();
    SpectralFunction::from_modes(*lattice, modes)
}

/// `r_min ≤ |ξ| ≤ r_max`
pub fn closed_band(r_min: f64, r_max: f64) -> impl Fn(&[f64]) -> bool {
    move |xi| {
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        r >= r_min && r <= r_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_band() {
        let lat = FrequencyLattice::new(2, 0.5, 8.0).unwrap();
        let a = random_band_function(&lat, 64, 7, closed_band(4.0, 8.0)).unwrap();
        let b = random_band_function(&lat, 64, 7, closed_band(4.0, 8.0)).unwrap();
        let c = random_band_function(&lat, 64, 8, closed_band(4.0, 8.0)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 64);
        let (lo, hi) = a.radial_extent().unwrap();
        assert!(lo >= 4.0 && hi <= 8.0);
        assert!(random_band_function(&lat, 10_000, 1, closed_band(4.0, 8.0)).is_err());
    }

    #[test]
    fn unit_variance() {
        let lat = FrequencyLattice::new(2, 0.5, 32.0).unwrap();
        let f = random_band_function(&lat, 4000, 3, |_| true).unwrap();
        let mean_sq = f.coefficients().iter().map(|c| c.norm_sqr()).sum::<f64>() / 4000.0;
        assert!((mean_sq - 1.0).abs() < 0.06, "{mean_sq}");
    }
}
