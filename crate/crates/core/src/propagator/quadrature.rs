//! Phase-resolving Gauss–Legendre panel quadrature for `∫ e^{iφ(ξ)} dξ`.
//!
//! Intervals are split into equal panels whose phase variation is at most
//! `phase_per_panel`; each panel uses the 8-point Gauss–Legendre rule. The
//! panel count is then doubled until two successive results agree.

use std::f64::consts::FRAC_PI_4;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const GAUSS_POINTS: usize = 8;

// samples used to estimate the total phase variation along a line
const VARIATION_SAMPLES: usize = 129;
const VARIATION_LINES: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelRule {
    pub phase_per_panel: f64,
    /// Two successive refinements must agree to `rel_tol·max(|I|, 10⁻⁶·area)`.
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for PanelRule {
    fn default() -> Self {
        Self {
            phase_per_panel: FRAC_PI_4,
            rel_tol: 1e-6,
            max_doublings: 10,
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rule8() -> &'static ([f64; GAUSS_POINTS], [f64; GAUSS_POINTS]) {
    static RULE: OnceLock<([f64; GAUSS_POINTS], [f64; GAUSS_POINTS])> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = gauss_legendre(GAUSS_POINTS);
        (x.try_into().unwrap(), w.try_into().unwrap())
    })
}

fn variation_1d(phase: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let step = (b - a) / (VARIATION_SAMPLES - 1) as f64;
    let mut prev = phase(a);
    let mut total = 0.0;
    for i in 1..VARIATION_SAMPLES {
        let cur = phase(a + step * i as f64);
        total += (cur - prev).abs();
        prev = cur;
    }
    total
}

fn panels_for(variation: f64, rule: &PanelRule) -> usize {
    ((variation / rule.phase_per_panel).ceil() as usize).max(1)
}

/// Mapped Gauss points of `n` equal panels on `[a, b]`.
fn panel_nodes(a: f64, b: f64, n: usize) -> impl Iterator<Item = (f64, f64)> {
    let (x, w) = rule8();
    let width = (b - a) / n as f64;
    let half = 0.5 * width;
    (0..n).flat_map(move |p| {
        let mid = a + (p as f64 + 0.5) * width;
        (0..GAUSS_POINTS).map(move |g| (mid + half * x[g], half * w[g]))
    })
}

fn converged(coarse: Complex64, fine: Complex64, area: f64, rule: &PanelRule) -> bool {
    (fine - coarse).norm() <= rule.rel_tol * fine.norm().max(1e-6 * area)
}

/// `∫_a^b e^{iφ(s)} ds`.
pub fn oscillatory_1d<F>(phase: F, a: f64, b: f64, rule: &PanelRule) -> Result<Complex64>
where
    F: Fn(f64) -> f64,
{
    if b == a {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sum = |n: usize| -> Complex64 {
        panel_nodes(a, b, n)
            .map(|(s, w)| Complex64::from_polar(w, phase(s)))
            .sum()
    };
    let mut n = panels_for(variation_1d(&phase, a, b), rule);
    let mut coarse = sum(n);
    let mut change = f64::INFINITY;
    for _ in 0..=rule.max_doublings {
        n *= 2;
        let fine = sum(n);
        if converged(coarse, fine, (b - a).abs(), rule) {
            return Ok(fine);
        }
        change = (fine - coarse).norm();
        coarse = fine;
    }
    Err(Error::Quadrature {
        panels: n,
        last_change: change,
        value: coarse.norm(),
    })
}

/// `∬ e^{iφ(s₁,s₂)} ds₁ds₂` over `[a₁,b₁]×[a₂,b₂]`.
pub fn oscillatory_2d<F>(phase: F, x_range: (f64, f64), y_range: (f64, f64), rule: &PanelRule) -> Result<Complex64>
where
    F: Fn(f64, f64) -> f64,
{
    let (a1, b1) = x_range;
    let (a2, b2) = y_range;
    let area = (b1 - a1).abs() * (b2 - a2).abs();
    if area == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let line = |i: usize, lo: f64, hi: f64| lo + (hi - lo) * i as f64 / (VARIATION_LINES - 1) as f64;
    let var1 = (0..VARIATION_LINES)
        .map(|i| {
            let y = line(i, a2, b2);
            variation_1d(&|s| phase(s, y), a1, b1)
        })
        .fold(0.0, f64::max);
    let var2 = (0..VARIATION_LINES)
        .map(|i| {
            let x = line(i, a1, b1);
            variation_1d(&|s| phase(x, s), a2, b2)
        })
        .fold(0.0, f64::max);

    let sum = |n1: usize, n2: usize| -> Complex64 {
        let ys: Vec<(f64, f64)> = panel_nodes(a2, b2, n2).collect();
        panel_nodes(a1, b1, n1)
            .map(|(s1, w1)| {
                ys.iter()
                    .map(|&(s2, w2)| Complex64::from_polar(w1 * w2, phase(s1, s2)))
                    .sum::<Complex64>()
            })
            .sum()
    };
    let (mut n1, mut n2) = (panels_for(var1, rule), panels_for(var2, rule));
    let mut coarse = sum(n1, n2);
    let mut change = f64::INFINITY;
    for _ in 0..=rule.max_doublings {
        n1 *= 2;
        n2 *= 2;
        let fine = sum(n1, n2);
        if converged(coarse, fine, area, rule) {
            return Ok(fine);
        }
        change = (fine - coarse).norm();
        coarse = fine;
    }
    Err(Error::Quadrature {
        panels: n1 * n2,
        last_change: change,
        value: coarse.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_point_rule() {
        let (x, w) = gauss_legendre(8);
        assert!((x[7] - 0.960_289_856_497_536_3).abs() < 1e-15);
        assert!((w[7] - 0.101_228_536_290_376_3).abs() < 1e-15);
        assert!((x[4] - 0.183_434_642_495_649_8).abs() < 1e-15);
        assert!((w[4] - 0.362_683_783_378_362).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact for degree 15
        let m14: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn linear_phase_closed_form() {
        let rule = PanelRule::default();
        for (x, a, b) in [(3.7, -2.0, 5.0), (0.0, 1.0, 2.0), (-40.0, 0.0, 9.0)] {
            let got = oscillatory_1d(|s| x * s, a, b, &rule).unwrap();
            let want = if x == 0.0 {
                Complex64::new(b - a, 0.0)
            } else {
                (Complex64::from_polar(1.0, b * x) - Complex64::from_polar(1.0, a * x)) / Complex64::new(0.0, x)
            };
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn fresnel_limit() {
        // ∫_{-L}^{L} e^{is²} ds → √π e^{iπ/4} as L → ∞, with an O(1/L) tail
        let got = oscillatory_1d(|s| s * s, -200.0, 200.0, &PanelRule::default()).unwrap();
        let want = Complex64::from_polar(std::f64::consts::PI.sqrt(), FRAC_PI_4);
        assert!((got - want).norm() < 1e-2);
    }

    #[test]
    fn product_phase_factorizes() {
        let rule = PanelRule::default();
        let two = oscillatory_2d(|a, b| 2.0 * a + 0.3 * b * b, (0.0, 4.0), (-1.0, 3.0), &rule).unwrap();
        let one = oscillatory_1d(|a| 2.0 * a, 0.0, 4.0, &rule).unwrap()
            * oscillatory_1d(|b| 0.3 * b * b, -1.0, 3.0, &rule).unwrap();
        assert!((two - one).norm() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let rule = PanelRule {
            max_doublings: 0,
            phase_per_panel: 1e3,
            rel_tol: 1e-14,
        };
        let err = oscillatory_1d(|s| 1e4 * s * s, 0.0, 3.0, &rule).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
