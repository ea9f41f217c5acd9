//! Phase functions `P(ξ)` driving the evolution `e^{itP(D)}`.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::experiments::fit_exponent;
use crate::spectral::SpectralFunction;

/// Built-in phase functions.
///
/// `FiniteType { m }` is `P_m(ξ) = ξ₁ξ₂ + h_m(ξ₁)` with `h_m = ξ₁ᵐ/m` for integer
/// `m ≥ 1` and `h_m = |ξ₁|ᵐ/m` for `1 < m < 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symbol {
    /// `|ξ|²`
    Elliptic,
    /// `|ξ|^α`, `α > 1`
    Fractional { alpha: f64 },
    /// `ξ₁² − ξ₂² + ξ₃²` (signs alternate)
    NonElliptic,
    /// `|ξ|√(1+|ξ|²)`
    Boussinesq,
    /// `√(1+|ξ|⁴)`
    Beam,
    FiniteType { m: f64 },
    /// `P ≡ c`; not reachable from the command line.
    Constant(f64),
}

impl Symbol {
    pub fn finite_type(m: f64) -> Result<Self> {
        let integer = m >= 1.0 && m.fract() == 0.0;
        if !(integer || (m > 1.0 && m < 2.0)) {
            return Err(invalid(format!(
                "finite-type order {m} must be an integer >= 1 or lie in (1,2)"
            )));
        }
        Ok(Symbol::FiniteType { m })
    }

    pub fn fractional(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(invalid(format!("fractional order {alpha} must exceed 1")));
        }
        Ok(Symbol::Fractional { alpha })
    }

    /// Exponent `m` in `|P(ξ)| ≲ |ξ|ᵐ`.
    pub fn growth_exponent(&self) -> f64 {
        match *self {
            Symbol::Elliptic | Symbol::NonElliptic | Symbol::Boussinesq | Symbol::Beam => 2.0,
            Symbol::Fractional { alpha } => alpha,
            Symbol::FiniteType { m } => m.max(2.0),
            Symbol::Constant(_) => 0.0,
        }
    }

    /// Constant `C` with `max_{1≤|ξ|≤Ξ} |P| ≤ C·Ξᵐ` for every `Ξ ≥ 1`.
    pub fn growth_constant(&self) -> f64 {
        match *self {
            Symbol::Elliptic | Symbol::NonElliptic | Symbol::Fractional { .. } => 1.0,
            Symbol::Boussinesq | Symbol::Beam => SQRT_2,
            Symbol::FiniteType { m } => 0.5 + 1.0 / m,
            Symbol::Constant(c) => c.abs(),
        }
    }

    /// Regularity `s₀` above which the maximal estimate on `B(0,1) ⊂ ℝ²` is taken
    /// as known for a reference symbol. Registry values, not derived here.
    pub fn reference_regularity(&self) -> Option<f64> {
        match self {
            Symbol::Elliptic => Some(1.0 / 3.0),
            Symbol::NonElliptic => Some(0.5),
            _ => None,
        }
    }

    /// Dimension the symbol is defined in, when it is not dimension-free.
    pub fn required_dim(&self) -> Option<usize> {
        match self {
            Symbol::FiniteType { .. } => Some(2),
            _ => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(
            self,
            Symbol::Elliptic
                | Symbol::Fractional { .. }
                | Symbol::Boussinesq
                | Symbol::Beam
                | Symbol::Constant(_)
        )
    }

    /// `P(ξ) = Σ wᵢξᵢ² + c` when the phase is a diagonal quadratic form.
    pub fn diagonal_quadratic(&self, dim: usize) -> Option<(Vec<f64>, f64)> {
        match *self {
            Symbol::Elliptic => Some((vec![1.0; dim], 0.0)),
            Symbol::NonElliptic => Some(((0..dim).map(alternating_sign).collect(), 0.0)),
            Symbol::Constant(c) => Some((vec![0.0; dim], c)),
            _ => None,
        }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let r2 = || xi.iter().map(|v| v * v).sum::<f64>();
        match *self {
            Symbol::Elliptic => r2(),
            Symbol::Fractional { alpha } => r2().powf(alpha / 2.0),
            Symbol::NonElliptic => xi
                .iter()
                .enumerate()
                .map(|(i, v)| alternating_sign(i) * v * v)
                .sum(),
            Symbol::Boussinesq => {
                let s = r2();
                (s * (1.0 + s)).sqrt()
            }
            Symbol::Beam => {
                let s = r2();
                (1.0 + s * s).sqrt()
            }
            Symbol::FiniteType { m } => xi[0] * xi[1] + finite_type_h(m, xi[0]),
            Symbol::Constant(c) => c,
        }
    }

    /// Whether `∇P` is undefined at `ξ`.
    pub fn is_singular(&self, xi: &[f64]) -> bool {
        match *self {
            Symbol::Fractional { .. } | Symbol::Boussinesq => xi.iter().all(|&v| v == 0.0),
            Symbol::FiniteType { m } => m.fract() != 0.0 && xi[0] == 0.0,
            _ => false,
        }
    }

    pub fn grad(&self, xi: &[f64]) -> Result<Vec<f64>> {
        if self.is_singular(xi) {
            return Err(Error::SingularPoint {
                symbol: self.to_string(),
                point: xi.to_vec(),
            });
        }
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        let radial = |scale: f64| xi.iter().map(|v| scale * v).collect();
        Ok(match *self {
            Symbol::Elliptic => radial(2.0),
            Symbol::Fractional { alpha } => radial(alpha * r2.powf(alpha / 2.0 - 1.0)),
            Symbol::NonElliptic => xi
                .iter()
                .enumerate()
                .map(|(i, v)| 2.0 * alternating_sign(i) * v)
                .collect(),
            // d/dr [r√(1+r²)] = (1+2r²)/√(1+r²), along ξ/r
            Symbol::Boussinesq => radial((1.0 + 2.0 * r2) / ((1.0 + r2).sqrt() * r2.sqrt())),
            Symbol::Beam => radial(2.0 * r2 / (1.0 + r2 * r2).sqrt()),
            Symbol::FiniteType { m } => {
                let (x1, x2) = (xi[0], xi[1]);
                let dh = if m.fract() == 0.0 {
                    x1.powi(m as i32 - 1)
                } else {
                    x1.signum() * x1.abs().powf(m - 1.0)
                };
                vec![x2 + dh, x1]
            }
            Symbol::Constant(_) => vec![0.0; xi.len()],
        })
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.required_dim() {
            Some(d) if d != dim => Err(Error::DimensionMismatch {
                expected: d,
                found: dim,
            }),
            _ => Ok(()),
        }
    }

    /// `max |P|` over the support of `f`.
    pub fn max_abs_on(&self, f: &SpectralFunction) -> f64 {
        f.modes().map(|(_, xi, _)| self.eval(xi).abs()).fold(0.0, f64::max)
    }
}

fn alternating_sign(axis: usize) -> f64 {
    if axis.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn finite_type_h(m: f64, x1: f64) -> f64 {
    if m.fract() == 0.0 {
        x1.powi(m as i32) / m
    } else {
        x1.abs().powf(m) / m
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Elliptic => f.write_str("elliptic"),
            Symbol::Fractional { alpha } => write!(f, "fractional:{alpha}"),
            Symbol::NonElliptic => f.write_str("nonelliptic"),
            Symbol::Boussinesq => f.write_str("boussinesq"),
            Symbol::Beam => f.write_str("beam"),
            Symbol::FiniteType { m } => write!(f, "pm:{m}"),
            Symbol::Constant(c) => write!(f, "const:{c}"),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let number = |v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
        };
        match s {
            "elliptic" => Ok(Symbol::Elliptic),
            "nonelliptic" => Ok(Symbol::NonElliptic),
            "boussinesq" => Ok(Symbol::Boussinesq),
            "beam" => Ok(Symbol::Beam),
            _ => {
                if let Some(alpha) = s.strip_prefix("fractional:") {
                    Symbol::fractional(number(alpha)?)
                } else if let Some(m) = s.strip_prefix("pm:") {
                    Symbol::finite_type(number(m)?)
                } else {
                    Err(Error::UnknownSymbol(s.to_string()))
                }
            }
        }
    }
}

/// Sampling density for sup-over-band scans: radii `r_min + i·(r_max−r_min)/radial_steps`
/// crossed with `angular_samples` directions.
///
/// Directions are equally spaced angles in 2-D, a Fibonacci sphere in 3-D and
/// `±1` in 1-D. Pairs of radial symbols are scanned along one direction only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandScan {
    pub dim: usize,
    pub radial_steps: usize,
    pub angular_samples: usize,
}

impl Default for BandScan {
    fn default() -> Self {
        Self {
            dim: 2,
            radial_steps: 4096,
            angular_samples: 4096,
        }
    }
}

impl BandScan {
    fn directions(&self, radial_only: bool) -> Vec<[f64; 3]> {
        if radial_only {
            return vec![[1.0, 0.0, 0.0]];
        }
        let n = self.angular_samples.max(1);
        match self.dim {
            1 => vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
            2 => (0..n)
                .map(|i| {
                    let th = TAU * i as f64 / n as f64;
                    [th.cos(), th.sin(), 0.0]
                })
                .collect(),
            _ => {
                let golden = PI * (3.0 - 5f64.sqrt());
                (0..n)
                    .map(|i| {
                        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                        let rho = (1.0 - z * z).sqrt();
                        let th = golden * i as f64;
                        [rho * th.cos(), rho * th.sin(), z]
                    })
                    .collect()
            }
        }
    }

    fn radii(&self, r_min: f64, r_max: f64) -> Vec<f64> {
        if r_min == r_max {
            return vec![r_min];
        }
        let n = self.radial_steps.max(1);
        (0..=n)
            .map(|i| {
                if i == n {
                    r_max
                } else {
                    r_min + (r_max - r_min) * i as f64 / n as f64
                }
            })
            .collect()
    }

    /// `sup |g(ξ)|` over the scanned points of the band.
    fn sup<G>(&self, r_min: f64, r_max: f64, radial_only: bool, g: G) -> f64
    where
        G: Fn(&[f64]) -> f64 + Sync,
    {
        let dirs = self.directions(radial_only);
        let d = self.dim;
        self.radii(r_min, r_max)
            .par_iter()
            .map(|&r| {
                dirs.iter()
                    .map(|u| {
                        let xi = [r * u[0], r * u[1], r * u[2]];
                        g(&xi[..d]).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

fn check_band(r_min: f64, r_max: f64) -> Result<()> {
    if !r_min.is_finite() || !r_max.is_finite() || r_min < 0.0 || r_max < r_min {
        return Err(invalid(format!("empty or invalid band [{r_min}, {r_max}]")));
    }
    Ok(())
}

/// `sup |P − Q|` over `r_min ≤ |ξ| ≤ r_max`, by dense scan.
///
/// Support points of `extra` falling in the band are scanned too, so the value
/// never undercuts the gap seen by that function.
pub fn perturbation_gap(
    p: &Symbol,
    q: &Symbol,
    band: (f64, f64),
    scan: &BandScan,
    extra: Option<&SpectralFunction>,
) -> Result<f64> {
    let (r_min, r_max) = band;
    check_band(r_min, r_max)?;
    p.check_dim(scan.dim)?;
    q.check_dim(scan.dim)?;
    let diff = |xi: &[f64]| p.eval(xi) - q.eval(xi);
    let mut gap = scan.sup(r_min, r_max, p.is_radial() && q.is_radial(), diff);
    if let Some(f) = extra {
        for (_, xi, _) in f.modes() {
            let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r >= r_min && r <= r_max {
                gap = gap.max(diff(xi).abs());
            }
        }
    }
    Ok(gap)
}

/// Least-squares growth exponent of `Ξ ↦ max_{1≤|ξ|≤Ξ} |P(ξ)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub cutoffs: Vec<f64>,
    pub maxima: Vec<f64>,
    pub slope: f64,
    pub residual: f64,
    /// `slope ≤ growth_exponent + 0.05`
    pub within_bound: bool,
}

pub fn growth_check(p: &Symbol, cutoffs: &[f64], scan: &BandScan) -> Result<GrowthFit> {
    if cutoffs.len() < 3 {
        return Err(invalid("growth check needs at least three cutoffs"));
    }
    p.check_dim(scan.dim)?;
    let mut maxima = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        check_band(1.0, cutoff)?;
        maxima.push(scan.sup(1.0, cutoff, p.is_radial(), |xi| p.eval(xi)));
    }
    let series: Vec<(f64, f64)> = cutoffs.iter().copied().zip(maxima.iter().copied()).collect();
    let fit = fit_exponent(&series)?;
    Ok(GrowthFit {
        cutoffs: cutoffs.to_vec(),
        maxima,
        slope: fit.slope,
        residual: fit.residual,
        within_bound: fit.slope <= p.growth_exponent() + 0.05,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn all_symbols() -> Vec<Symbol> {
        vec![
            Symbol::Elliptic,
            Symbol::Fractional { alpha: 1.5 },
            Symbol::NonElliptic,
            Symbol::Boussinesq,
            Symbol::Beam,
            Symbol::FiniteType { m: 1.0 },
            Symbol::FiniteType { m: 1.5 },
            Symbol::FiniteType { m: 2.0 },
            Symbol::FiniteType { m: 3.0 },
        ]
    }

    #[test]
    fn point_values() {
        assert!((Symbol::Boussinesq.eval(&[3.0, 4.0]) - 5.0 * 26f64.sqrt()).abs() < 1e-12);
        assert_eq!(Symbol::NonElliptic.eval(&[2.0, 1.0]), 3.0);
        assert!((Symbol::FiniteType { m: 3.0 }.eval(&[1.0, 2.0]) - 7.0 / 3.0).abs() < 1e-15);
        assert!((Symbol::FiniteType { m: 1.5 }.eval(&[-4.0, 1.0]) - (-4.0 + 8.0 / 1.5)).abs() < 1e-12);
    }

    #[test]
    fn gradients() {
        assert_eq!(Symbol::FiniteType { m: 2.0 }.grad(&[1.0, 1.0]).unwrap(), vec![2.0, 1.0]);
        assert_eq!(Symbol::Elliptic.grad(&[2.0, 0.0]).unwrap(), vec![4.0, 0.0]);
        assert_eq!(Symbol::FiniteType { m: 1.0 }.grad(&[3.0, 2.0]).unwrap(), vec![3.0, 3.0]);

        let g = Symbol::Boussinesq.grad(&[3.0, 4.0]).unwrap();
        let norm = (g[0] * g[0] + g[1] * g[1]).sqrt();
        assert!((norm - 51.0 / 26f64.sqrt()).abs() < 1e-12);
        assert!((g[0] / norm - 0.6).abs() < 1e-15 && (g[1] / norm - 0.8).abs() < 1e-15);

        assert!(Symbol::Boussinesq.grad(&[0.0, 0.0]).is_err());
        assert!(Symbol::FiniteType { m: 1.5 }.grad(&[0.0, 3.0]).is_err());
        assert!(Symbol::FiniteType { m: 2.0 }.grad(&[0.0, 3.0]).is_ok());
    }

    #[test]
    fn finite_type_gradient_comparable_to_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [1.5, 2.0, 3.0] {
            let p = Symbol::FiniteType { m };
            for _ in 0..200 {
                let xi: [f64; 2] = [rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)];
                let g = p.grad(&xi).unwrap();
                let mag = g[0].hypot(g[1]);
                let lead = if m.fract() == 0.0 {
                    xi[0].powi(m as i32 - 1)
                } else {
                    xi[0].signum() * xi[0].abs().powf(m - 1.0)
                };
                let weight = (xi[1] + lead).abs() + xi[0].abs();
                assert!(mag <= weight * (1.0 + 1e-12) && weight <= SQRT_2 * mag * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let step = 1e-5;
        for p in all_symbols() {
            for _ in 0..100 {
                let xi: [f64; 2] = [rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0)];
                if xi[0].abs() < 0.1 {
                    continue;
                }
                let g = p.grad(&xi).unwrap();
                let gn = g[0].hypot(g[1]);
                for axis in 0..2 {
                    let mut a = xi;
                    let mut b = xi;
                    a[axis] += step;
                    b[axis] -= step;
                    let fd = (p.eval(&a) - p.eval(&b)) / (2.0 * step);
                    assert!(
                        (fd - g[axis]).abs() <= 1e-5 * gn.max(1.0),
                        "{p} at {xi:?} axis {axis}: {fd} vs {}",
                        g[axis]
                    );
                }
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for p in all_symbols() {
            assert_eq!(p.to_string().parse::<Symbol>().unwrap(), p);
        }
        assert_eq!("fractional:1.5".parse::<Symbol>().unwrap(), Symbol::Fractional { alpha: 1.5 });
        for bad in ["Elliptic", "pm:2.5", "pm:0.5", "fractional:1", "pm:", "schrodinger", "const:1"] {
            assert!(bad.parse::<Symbol>().is_err(), "{bad}");
        }
    }

    #[test]
    fn gap_examples() {
        let scan = BandScan::default();
        let gap = |p, q, band| perturbation_gap(&p, &q, band, &scan, None).unwrap();
        assert_eq!(gap(Symbol::NonElliptic, Symbol::NonElliptic, (0.0, 10.0)), 0.0);
        let beam = gap(Symbol::Beam, Symbol::Elliptic, (1.0, 1.0));
        assert!((beam - 1.0 / (SQRT_2 + 1.0)).abs() < 1e-15);
        // r√(1+r²) − r² at r = 100, the band maximum
        let b = gap(Symbol::Boussinesq, Symbol::Elliptic, (1.0, 100.0));
        assert!((b - 0.499_987_500_625_138_6).abs() < 1e-9);
        assert!(perturbation_gap(&Symbol::Beam, &Symbol::Elliptic, (2.0, 1.0), &scan, None).is_err());
    }

    #[test]
    fn gap_is_symmetric_and_bounded() {
        let scan = BandScan {
            radial_steps: 512,
            angular_samples: 256,
            ..BandScan::default()
        };
        let mut last = 0.0;
        for cutoff in [1.5, 4.0, 16.0, 64.0, 256.0] {
            let a = perturbation_gap(&Symbol::Boussinesq, &Symbol::Elliptic, (1.0, cutoff), &scan, None).unwrap();
            let b = perturbation_gap(&Symbol::Elliptic, &Symbol::Boussinesq, (1.0, cutoff), &scan, None).unwrap();
            assert_eq!(a, b);
            assert!(a <= 0.5 && a >= last);
            last = a;
            let beam = perturbation_gap(&Symbol::Beam, &Symbol::Elliptic, (1.0, cutoff), &scan, None).unwrap();
            assert!(beam <= 1.0 / (SQRT_2 + 1.0) + 1e-15);
        }
        let p = Symbol::FiniteType { m: 1.5 };
        let q = Symbol::NonElliptic;
        let a = perturbation_gap(&p, &q, (0.5, 3.0), &scan, None).unwrap();
        let b = perturbation_gap(&q, &p, (0.5, 3.0), &scan, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn beam_gap_decreases_with_radius() {
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let r = 1.0 + i as f64 * 0.25;
            let g = Symbol::Beam.eval(&[r, 0.0]) - Symbol::Elliptic.eval(&[r, 0.0]);
            assert!(g <= last);
            last = g;
        }
    }

    #[test]
    fn growth_exponents() {
        let scan = BandScan::default();
        let cutoffs = [4.0, 8.0, 16.0, 32.0];
        let e = growth_check(&Symbol::Elliptic, &cutoffs, &scan).unwrap();
        assert!((e.slope - 2.0).abs() < 1e-6 && e.within_bound);

        let b = growth_check(&Symbol::Boussinesq, &cutoffs, &scan).unwrap();
        assert!((1.95..=2.0).contains(&b.slope) && b.within_bound);

        // Brute force over the outer circle, where |P₃| peaks:
        // max_θ |Ξ² cosθ sinθ + Ξ³cos³θ/3| ≈ Ξ³/3 + Ξ/2, slope 2.9610 on {4,8,16,32}.
        let p3 = growth_check(&Symbol::FiniteType { m: 3.0 }, &cutoffs, &scan).unwrap();
        assert!((p3.slope - 2.961_017).abs() < 1e-4, "{}", p3.slope);
        assert!(p3.within_bound);

        assert!(growth_check(&Symbol::Elliptic, &[4.0, 8.0], &scan).is_err());
    }

    #[test]
    fn reference_regularities() {
        assert_eq!(Symbol::Elliptic.reference_regularity(), Some(1.0 / 3.0));
        assert_eq!(Symbol::NonElliptic.reference_regularity(), Some(0.5));
        assert_eq!(Symbol::Boussinesq.reference_regularity(), None);
    }

    #[test]
    fn growth_constant_bounds_band_maximum() {
        let scan = BandScan {
            radial_steps: 256,
            angular_samples: 512,
            ..BandScan::default()
        };
        for p in all_symbols() {
            for cutoff in [1.0, 3.0, 10.0, 40.0] {
                let max = scan.sup(1.0, cutoff, p.is_radial(), |xi| p.eval(xi));
                let bound = p.growth_constant() * cutoff.powf(p.growth_exponent());
                assert!(max <= bound * (1.0 + 1e-12), "{p} at {cutoff}: {max} > {bound}");
            }
        }
    }
}
