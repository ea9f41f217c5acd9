//! Counterexample data: the strip union `A_R` for the Boussinesq symbol and the
//! box datum with explicit witness time for `P_m`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::propagator::{continuum_evolve, oscillatory_1d, PanelRule, Rectangle, RectangleSet};
use crate::symbols::Symbol;

/// `⌈R^{1/3}⌉` without float noise at perfect cubes.
fn strip_count(r: f64) -> usize {
    let c = r.cbrt();
    let n = c.round();
    if (n - c).abs() < 1e-9 * c {
        n as usize
    } else {
        c.ceil() as usize
    }
}

/// `A_R = ∪_l [R − R^{1/2}, R + R^{1/2}] × [R^{2/3}l, R^{2/3}l + 1]`, `l = 1..⌈R^{1/3}⌉`.
#[derive(Debug, Clone, PartialEq)]
pub struct BourgainDatum {
    r: f64,
    strips: RectangleSet,
}

impl BourgainDatum {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 64.0 {
            return Err(invalid(format!("strip datum needs R >= 64, got {r}")));
        }
        let height = r.cbrt().powi(2);
        if height < 2.0 {
            return Err(invalid("strips overlap when R^(2/3) < 2"));
        }
        let half = r.sqrt();
        let boxes = (1..=strip_count(r))
            .map(|l| Rectangle::new((r - half, r + half), (height * l as f64, height * l as f64 + 1.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            r,
            strips: RectangleSet::new(boxes)?,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn strips(&self) -> &RectangleSet {
        &self.strips
    }

    pub fn area(&self) -> f64 {
        self.strips.area()
    }

    /// `‖f‖_{L²}` of the indicator, i.e. `area^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.area().sqrt()
    }

    /// `|e^{itΔ}f(x)|` using the product structure of the elliptic phase.
    pub fn elliptic_modulus(&self, x: &[f64], t: f64, rule: &PanelRule) -> Result<f64> {
        Ok((self.first_axis(x[0], t, rule)? * self.second_axis(x[1], t, rule)?).norm())
    }

    fn first_axis(&self, x1: f64, t: f64, rule: &PanelRule) -> Result<Complex64> {
        let b = self.strips.boxes()[0].x;
        oscillatory_1d(|s| x1 * s + t * s * s, b.0, b.1, rule)
    }

    fn second_axis(&self, x2: f64, t: f64, rule: &PanelRule) -> Result<Complex64> {
        self.strips
            .boxes()
            .iter()
            .map(|b| oscillatory_1d(|s| x2 * s + t * s * s, b.y.0, b.y.1, rule))
            .sum()
    }
}

/// Sample counts for [`bourgain_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Minimum number of spatial samples inside the unit disk.
    pub x_samples: usize,
    pub t_samples: usize,
    /// Pattern-search iterations after the grid pass.
    pub refine_steps: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            x_samples: 4096,
            t_samples: 256,
            refine_steps: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub value: f64,
    pub x: [f64; 2],
    pub t: f64,
    /// Spatial samples actually inside the disk.
    pub x_samples: usize,
}

/// Smallest odd `n` whose `n × n` midpoint grid on `[−1,1]²` puts at least `want`
/// points in the closed unit disk.
fn disk_grid(want: usize) -> Vec<f64> {
    let mut n = 1usize;
    loop {
        let axis: Vec<f64> = (0..n).map(|i| -1.0 + (2 * i + 1) as f64 / n as f64).collect();
        let inside = axis
            .iter()
            .map(|a| axis.iter().filter(|b| a * a + *b * *b <= 1.0).count())
            .sum::<usize>();
        if inside >= want {
            return axis;
        }
        n += 2;
    }
}

/// Deterministic lower bound for `sup |e^{itΔ}χ_{A_R}(x)|` over `|x| ≤ 1`, `0 < t ≤ 1/R`.
///
/// Samples a product midpoint grid in `x` (odd count per axis, so `x = 0` is
/// included) against `t_j = j/(T·R)`, then refines the best point by a compass
/// search in `(x₁, x₂, t)`.
pub fn bourgain_search(d: &BourgainDatum, budget: &SearchBudget) -> Result<SearchResult> {
    if budget.x_samples < 32 || budget.t_samples < 32 {
        return Err(invalid("search budgets must be at least 32"));
    }
    let rule = PanelRule::default();
    let axis = disk_grid(budget.x_samples);
    let t_max = 1.0 / d.r;
    let inside = axis
        .iter()
        .map(|a| axis.iter().filter(|b| a * a + *b * *b <= 1.0).count())
        .sum();

    let per_time = (1..=budget.t_samples)
        .into_par_iter()
        .map(|j| -> Result<SearchResult> {
            let t = t_max * j as f64 / budget.t_samples as f64;
            let first = axis.iter().map(|&a| d.first_axis(a, t, &rule)).collect::<Result<Vec<_>>>()?;
            let second = axis.iter().map(|&a| d.second_axis(a, t, &rule)).collect::<Result<Vec<_>>>()?;
            let mut best = SearchResult {
                value: -1.0,
                x: [0.0; 2],
                t,
                x_samples: inside,
            };
            for (a, u) in axis.iter().zip(&first) {
                for (b, v) in axis.iter().zip(&second) {
                    if a * a + b * b <= 1.0 {
                        let value = (u * v).norm();
                        if value > best.value {
                            best.value = value;
                            best.x = [*a, *b];
                        }
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    // ties resolve to the earliest time for determinism
    let mut best = per_time
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one time sample");

    let mut steps = [1.0 / axis.len() as f64, 1.0 / axis.len() as f64, 0.5 * t_max / budget.t_samples as f64];
    for _ in 0..budget.refine_steps {
        let mut improved = false;
        for k in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut cand = [best.x[0], best.x[1], best.t];
                cand[k] += sign * steps[k];
                if cand[0] * cand[0] + cand[1] * cand[1] > 1.0 || !(cand[2] > 0.0 && cand[2] <= t_max) {
                    continue;
                }
                let value = d.elliptic_modulus(&cand[..2], cand[2], &rule)?;
                if value > best.value {
                    best.value = value;
                    best.x = [cand[0], cand[1]];
                    best.t = cand[2];
                    improved = true;
                }
            }
        }
        if !improved {
            steps.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    Ok(best)
}

/// Box `[R, R+1] × [R, 3R/2]` for `P_m` with `1 < m < 2`, and its witness rule.
#[derive(Debug, Clone, PartialEq)]
pub struct PmDatum {
    r: f64,
    m: f64,
    boxes: RectangleSet,
}

/// Witness region `x₁ ∈ [−1/1000, 1/1000]`, `x₂ ∈ [−1/1000, −1/2000]`.
pub const WITNESS_X1: (f64, f64) = (-1e-3, 1e-3);
pub const WITNESS_X2: (f64, f64) = (-1e-3, -5e-4);

impl PmDatum {
    pub fn new(r: f64, m: f64) -> Result<Self> {
        if !r.is_finite() || r < 64.0 {
            return Err(invalid(format!("box datum needs R >= 64, got {r}")));
        }
        if !(m > 1.0 && m < 2.0) {
            return Err(invalid(format!("box datum needs 1 < m < 2, got {m}")));
        }
        let boxes = RectangleSet::new(vec![Rectangle::new((r, r + 1.0), (r, 1.5 * r))?])?;
        Ok(Self { r, m, boxes })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn symbol(&self) -> Symbol {
        Symbol::FiniteType { m: self.m }
    }

    pub fn boxes(&self) -> &RectangleSet {
        &self.boxes
    }

    pub fn area(&self) -> f64 {
        self.boxes.area()
    }

    pub fn l2_norm(&self) -> f64 {
        self.area().sqrt()
    }

    /// `t(x) = −x₂/R + 1/R²`.
    pub fn witness_time(&self, x: &[f64]) -> f64 {
        -x[1] / self.r + 1.0 / (self.r * self.r)
    }

    /// Upper end of the phase remainder after substituting `ξ = (R + η₁, R + Rη₂/2)`:
    /// `|(x₁+Rt+R^{m−1}t)η₁ + (R/2)(x₂+Rt)η₂ + (t/2)(Rη₁η₂ + (m−1)|θη₁+R|^{m−2}η₁²)|`
    /// maximized over `η ∈ [0,1]²` (on a 65-point grid per axis) and `θ ∈ [0,1]`.
    ///
    /// The expression is monotone in `θ`, so the endpoints bracket it.
    pub fn residual_phase(&self, x: &[f64], t: f64) -> f64 {
        let (r, m) = (self.r, self.m);
        let lin1 = x[0] + r * t + r.powf(m - 1.0) * t;
        let lin2 = 0.5 * r * (x[1] + r * t);
        let n = 64;
        let mut worst: f64 = 0.0;
        for i in 0..=n {
            let e1 = i as f64 / n as f64;
            for j in 0..=n {
                let e2 = j as f64 / n as f64;
                for theta in [0.0, 1.0] {
                    let curv = (m - 1.0) * (theta * e1 + r).abs().powf(m - 2.0) * e1 * e1;
                    let phase = lin1 * e1 + lin2 * e2 + 0.5 * t * (r * e1 * e2 + curv);
                    worst = worst.max(phase.abs());
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessCheck {
    pub min_modulus: f64,
    pub max_residual: f64,
    pub samples: usize,
}

/// Evaluates `|e^{it(x)P_m(D)}χ(x)|` on a `g × g` grid over the witness region,
/// corners included, with `g = ⌈√sample_count⌉`.
pub fn pm_witness_check(d: &PmDatum, sample_count: usize) -> Result<WitnessCheck> {
    if sample_count < 16 {
        return Err(invalid("witness check needs at least 16 samples"));
    }
    let g = (sample_count as f64).sqrt().ceil() as usize;
    let lerp = |(a, b): (f64, f64), i: usize| a + (b - a) * i as f64 / (g - 1) as f64;
    let p = d.symbol();
    let points: Vec<[f64; 2]> = (0..g)
        .flat_map(|i| (0..g).map(move |j| (i, j)))
        .map(|(i, j)| [lerp(WITNESS_X1, i), lerp(WITNESS_X2, j)])
        .collect();
    let values = points
        .par_iter()
        .map(|x| -> Result<(f64, f64)> {
            let t = d.witness_time(x);
            let modulus = continuum_evolve(&d.boxes, &p, x, t)?.norm();
            Ok((modulus, d.residual_phase(x, t)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessCheck {
        min_modulus: values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min),
        max_residual: values.iter().map(|v| v.1).fold(0.0, f64::max),
        samples: points.len(),
    })
}

/// First `R` in `radii` whose worst residual phase over the witness corners is `≤ limit`.
pub fn residual_threshold(m: f64, radii: &[f64], limit: f64) -> Result<Option<f64>> {
    for &r in radii {
        let d = PmDatum::new(r, m)?;
        let worst = [WITNESS_X1.0, WITNESS_X1.1]
            .iter()
            .flat_map(|&a| [WITNESS_X2.0, WITNESS_X2.1].map(|b| [a, b]))
            .map(|x| d.residual_phase(&x, d.witness_time(&x)))
            .fold(0.0, f64::max);
        if worst <= limit {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::{continuum_evolve_with, oscillatory_2d};

    #[test]
    fn strip_layout() {
        let d = BourgainDatum::new(4096.0).unwrap();
        assert_eq!(d.strips().boxes().len(), 16);
        let first = d.strips().boxes()[0];
        assert!((first.x.0 - 4032.0).abs() < 1e-9 && (first.x.1 - 4160.0).abs() < 1e-9);
        assert!((first.y.0 - 256.0).abs() < 1e-9 && (first.y.1 - 257.0).abs() < 1e-9);
        assert!((d.area() - 2048.0).abs() < 1e-9);
        assert!((d.l2_norm() - 45.254_833_995_939_04).abs() < 1e-9);
        assert!(BourgainDatum::new(32.0).is_err());
    }

    #[test]
    fn strips_sit_in_the_annulus() {
        for r in [64.0, 100.0, 512.0, 1000.0] {
            let d = BourgainDatum::new(r).unwrap();
            assert_eq!(d.strips().boxes().len(), r.cbrt().ceil() as usize);
            for b in d.strips().boxes() {
                let inner = b.x.0.hypot(b.y.0);
                let outer = b.x.1.hypot(b.y.1);
                assert!(inner >= r / 2.0 && outer <= 4.0 * r);
            }
        }
    }

    #[test]
    fn product_form_matches_planar_quadrature() {
        let d = BourgainDatum::new(64.0).unwrap();
        let rule = PanelRule {
            rel_tol: 1e-12,
            ..PanelRule::default()
        };
        let (x, t) = ([0.3, -0.2], 0.6 / 64.0);
        let fast = d.elliptic_modulus(&x, t, &rule).unwrap();
        let planar: Complex64 = d
            .strips()
            .boxes()
            .iter()
            .map(|b| oscillatory_2d(|s1, s2| x[0] * s1 + x[1] * s2 + t * (s1 * s1 + s2 * s2), b.x, b.y, &rule).unwrap())
            .sum();
        assert!((fast - planar.norm()).abs() < 1e-9 * planar.norm());
        let general = continuum_evolve_with(d.strips(), &Symbol::Elliptic, &x, t, &rule).unwrap();
        assert!((fast - general.norm()).abs() < 1e-9 * fast);
    }

    #[test]
    fn search_respects_trivial_bound_and_grows() {
        let budget = SearchBudget {
            x_samples: 256,
            t_samples: 64,
            refine_steps: 30,
        };
        let small = BourgainDatum::new(64.0).unwrap();
        let big = BourgainDatum::new(256.0).unwrap();
        let a = bourgain_search(&small, &budget).unwrap();
        let b = bourgain_search(&big, &budget).unwrap();
        assert!(a.x_samples >= 256);
        assert!(a.value <= small.area() * (1.0 + 1e-9) && b.value <= big.area() * (1.0 + 1e-9));
        assert!(a.t > 0.0 && a.t <= 1.0 / 64.0);
        let c = a.value / 64f64.powf(0.75);
        assert!(b.value >= c * 256f64.powf(0.75));
    }

    #[test]
    fn search_is_deterministic() {
        let budget = SearchBudget {
            x_samples: 64,
            t_samples: 32,
            refine_steps: 10,
        };
        let d = BourgainDatum::new(64.0).unwrap();
        assert_eq!(bourgain_search(&d, &budget).unwrap(), bourgain_search(&d, &budget).unwrap());
        assert!(bourgain_search(&d, &SearchBudget { x_samples: 16, ..budget }).is_err());
    }

    #[test]
    fn transfer_between_boussinesq_and_elliptic() {
        let d = BourgainDatum::new(64.0).unwrap();
        let t = 1.0 / 64.0;
        for x in [[0.0, 0.0], [0.2, -0.5], [-0.7, 0.1]] {
            let pb = continuum_evolve(d.strips(), &Symbol::Boussinesq, &x, t).unwrap();
            let el = continuum_evolve(d.strips(), &Symbol::Elliptic, &x, t).unwrap();
            let bound = (0.5 * t).exp_m1() * d.area();
            assert!((pb - el).norm() <= bound + 1e-9);
        }
    }

    #[test]
    fn pm_datum_basics() {
        let d = PmDatum::new(64.0, 1.5).unwrap();
        assert_eq!(d.boxes().boxes()[0], Rectangle::new((64.0, 65.0), (64.0, 96.0)).unwrap());
        assert_eq!(d.area(), 32.0);
        assert_eq!(d.l2_norm(), 32f64.sqrt());
        let far = PmDatum::new(1000.0, 1.5).unwrap();
        assert!((far.witness_time(&[0.0, -0.001]) - 2e-6).abs() < 1e-18);
        assert!(PmDatum::new(64.0, 2.0).is_err());
        assert!(PmDatum::new(63.0, 1.5).is_err());
    }

    #[test]
    fn witness_time_stays_positive_and_small() {
        for r in [64.0, 128.0, 1e3, 1e6] {
            let d = PmDatum::new(r, 1.5).unwrap();
            for x2 in [WITNESS_X2.0, -7e-4, WITNESS_X2.1] {
                let t = d.witness_time(&[0.0, x2]);
                assert!(t > 0.0 && t <= 1e-3 / r + 1.0 / (r * r) + 1e-18);
            }
        }
    }

    #[test]
    fn witness_modulus_is_a_fixed_fraction_of_r() {
        let d = PmDatum::new(256.0, 1.5).unwrap();
        let w = pm_witness_check(&d, 16).unwrap();
        assert_eq!(w.samples, 16);
        assert!(w.min_modulus >= 0.4 * 256.0, "{}", w.min_modulus);
        assert!(w.min_modulus <= 128.0 * (1.0 + 1e-9));
    }

    #[test]
    fn residual_phase_is_dominated_by_the_second_linear_term() {
        // x₂ + Rt = 1/R makes the η₂ coefficient exactly 1/2
        let d = PmDatum::new(1e6, 1.5).unwrap();
        let x = [0.0, -7.5e-4];
        let r = d.residual_phase(&x, d.witness_time(&x));
        assert!((r - 0.5).abs() < 5e-3, "{r}");
        assert_eq!(residual_threshold(1.5, &[64.0, 1e3, 1e6], 0.1).unwrap(), None);
    }
}
