//! The evolution `e^{itP(D)}f(x) = Σ_ξ e^{ix·ξ + itP(ξ)} f̂(ξ) hⁿ` and its relatives.

mod grid;
mod quadrature;
mod rectangles;
mod time_grid;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::spectral::{BallQuadrature, SampledField, SpectralFunction};
use crate::symbols::{perturbation_gap, BandScan, Symbol};

pub use grid::{synthesize_field, EvalPath};
pub(crate) use grid::{sup_over_times, Kernel};
pub use quadrature::{gauss_legendre, oscillatory_1d, oscillatory_2d, PanelRule, GAUSS_POINTS};
pub use rectangles::{Rectangle, RectangleSet};
pub use time_grid::TimeGrid;

/// Coefficients of `e^{itP(D)}f`.
pub fn evolve(f: &SpectralFunction, p: &Symbol, t: f64) -> SpectralFunction {
    f.map_coefficients(|xi, c| c * Complex64::from_polar(1.0, t * p.eval(xi)))
}

pub fn evolve_at(f: &SpectralFunction, p: &Symbol, x: &[f64], t: f64) -> Complex64 {
    let w = f.lattice().cell_volume();
    f.modes()
        .map(|(_, xi, c)| {
            let phase: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() + t * p.eval(xi);
            c * Complex64::from_polar(w, phase)
        })
        .sum()
}

pub fn evolve_field(
    f: &SpectralFunction,
    p: &Symbol,
    ball: &BallQuadrature,
    t: f64,
    path: EvalPath,
) -> Result<SampledField<Complex64>> {
    let values = synthesize_field(&evolve(f, p, t), ball, path)?;
    SampledField::new(ball.clone(), values)
}

fn symbol_values(f: &SpectralFunction, p: &Symbol) -> Vec<f64> {
    f.modes().map(|(_, xi, _)| p.eval(xi)).collect()
}

/// Per node, `max_{t ∈ tg} |e^{itP(D)}f|`.
pub fn maximal_field(
    f: &SpectralFunction,
    p: &Symbol,
    ball: &BallQuadrature,
    tg: &TimeGrid,
    path: EvalPath,
) -> Result<SampledField<f64>> {
    let values = sup_over_times(
        f,
        &symbol_values(f, p),
        ball,
        &tg.times(),
        Kernel::Evolution,
        |_| 1.0,
        path,
    )?;
    SampledField::new(ball.clone(), values)
}

/// Per node, `max_{t ∈ tg} |e^{itP(D)}f − f| / t^{δ/m}` with `m` the growth exponent of `P`.
///
/// `δ > 0` needs `t_min > 0`.
pub fn weighted_difference_field(
    f: &SpectralFunction,
    p: &Symbol,
    delta: f64,
    ball: &BallQuadrature,
    tg: &TimeGrid,
    path: EvalPath,
) -> Result<SampledField<f64>> {
    let exponent = weight_exponent(p, delta)?;
    if exponent > 0.0 && tg.t_min() <= 0.0 {
        return Err(invalid("a positive weight exponent needs t_min > 0"));
    }
    let values = sup_over_times(
        f,
        &symbol_values(f, p),
        ball,
        &tg.times(),
        Kernel::Increment,
        |t| t.powf(-exponent),
        path,
    )?;
    SampledField::new(ball.clone(), values)
}

/// `δ/m`, after checking `0 ≤ δ < m`.
pub fn weight_exponent(p: &Symbol, delta: f64) -> Result<f64> {
    let m = p.growth_exponent();
    if !(delta >= 0.0 && delta < m) {
        return Err(invalid(format!("delta = {delta} must satisfy 0 <= delta < m = {m}")));
    }
    Ok(delta / m)
}

/// Taylor bound `(e^{t·gap} − 1)·‖f̂‖₁hⁿ` against the measured `max_B |e^{itP}f − e^{itQ}f|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationBound {
    pub bound: f64,
    pub measured: f64,
    pub gap: f64,
}

impl PerturbationBound {
    pub fn holds(&self) -> bool {
        self.measured <= self.bound + 1e-9
    }
}

/// `sup |P − Q|` over the radial band spanned by the support of `f`.
pub fn support_gap(f: &SpectralFunction, p: &Symbol, q: &Symbol) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    let Some(band) = f.radial_extent() else {
        return Ok(0.0);
    };
    let scan = BandScan {
        dim: f.dim(),
        ..BandScan::default()
    };
    perturbation_gap(p, q, band, &scan, Some(f))
}

pub fn perturbation_bound(
    f: &SpectralFunction,
    p: &Symbol,
    q: &Symbol,
    t: f64,
    ball: &BallQuadrature,
) -> Result<PerturbationBound> {
    let gap = support_gap(f, p, q)?;
    perturbation_bound_with_gap(f, p, q, t, ball, gap)
}

/// As [`perturbation_bound`] with a precomputed gap.
pub fn perturbation_bound_with_gap(
    f: &SpectralFunction,
    p: &Symbol,
    q: &Symbol,
    t: f64,
    ball: &BallQuadrature,
    gap: f64,
) -> Result<PerturbationBound> {
    let diff = difference_field(f, p, q, t, ball, EvalPath::Auto)?;
    let measured = diff.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(PerturbationBound {
        bound: (t * gap).exp_m1() * f.coefficient_l1(),
        measured,
        gap,
    })
}

/// `e^{itP(D)}f − e^{itQ(D)}f` on the ball nodes.
pub fn difference_field(
    f: &SpectralFunction,
    p: &Symbol,
    q: &Symbol,
    t: f64,
    ball: &BallQuadrature,
    path: EvalPath,
) -> Result<SampledField<Complex64>> {
    let g = f.map_coefficients(|xi, c| {
        c * (Complex64::from_polar(1.0, t * p.eval(xi)) - Complex64::from_polar(1.0, t * q.eval(xi)))
    });
    SampledField::new(ball.clone(), synthesize_field(&g, ball, path)?)
}

/// `∫_A e^{ix·ξ + itP(ξ)} dξ` by phase-resolving panel quadrature.
pub fn continuum_evolve(a: &RectangleSet, p: &Symbol, x: &[f64], t: f64) -> Result<Complex64> {
    continuum_evolve_with(a, p, x, t, &PanelRule::default())
}

pub fn continuum_evolve_with(
    a: &RectangleSet,
    p: &Symbol,
    x: &[f64],
    t: f64,
    rule: &PanelRule,
) -> Result<Complex64> {
    p.check_dim(2)?;
    if x.len() != 2 {
        return Err(invalid("continuum evaluation point must be two-dimensional"));
    }
    let (x1, x2) = (x[0], x[1]);
    let mut total = Complex64::new(0.0, 0.0);
    if let Some((w, c)) = p.diagonal_quadratic(2) {
        for b in a.boxes() {
            let i1 = oscillatory_1d(|s| x1 * s + t * w[0] * s * s, b.x.0, b.x.1, rule)?;
            let i2 = oscillatory_1d(|s| x2 * s + t * w[1] * s * s, b.y.0, b.y.1, rule)?;
            total += i1 * i2;
        }
        return Ok(total * Complex64::from_polar(1.0, t * c));
    }
    for b in a.boxes() {
        total += oscillatory_2d(|s1, s2| x1 * s1 + x2 * s2 + t * p.eval(&[s1, s2]), b.x, b.y, rule)?;
    }
    Ok(total)
}
