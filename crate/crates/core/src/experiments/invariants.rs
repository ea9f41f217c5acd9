//! Self-checks behind the `check` subcommand.
//!
//! Each check reports a dimensionless error against a tolerance; the Taylor
//! check reports `measured/bound`, which must stay at most one.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::data::random_band_function;
use super::fit::fit_exponent;
use super::record::{ExperimentKind, ExperimentRecord};
use crate::decompose::{dyadic_split, sector_split};
use crate::error::Result;
use crate::propagator::{
    continuum_evolve, evolve, evolve_at, evolve_field, perturbation_bound, EvalPath, Rectangle, RectangleSet,
};
use crate::spectral::{l2_norm, BallQuadrature, FrequencyLattice, SpectralFunction};
use crate::symbols::Symbol;

pub const EXACT_TOL: f64 = 1e-12;
pub const FAST_PATH_TOL: f64 = 1e-9;
pub const CONTINUUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantOutcome {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl InvariantOutcome {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

const SYMBOLS: [Symbol; 5] = [
    Symbol::Elliptic,
    Symbol::NonElliptic,
    Symbol::Boussinesq,
    Symbol::Beam,
    Symbol::FiniteType { m: 1.5 },
];
const TIMES: [f64; 4] = [0.013, 0.25, 0.7, 1.0];

fn max_coefficient_gap(a: &SpectralFunction, b: &SpectralFunction) -> f64 {
    a.modes()
        .map(|(idx, _, c)| (c - b.coefficient_at(idx)).norm())
        .chain(b.modes().map(|(idx, _, c)| (c - a.coefficient_at(idx)).norm()))
        .fold(0.0, f64::max)
}

fn max_coefficient(f: &SpectralFunction) -> f64 {
    f.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn unitarity(f: &SpectralFunction) -> f64 {
    let base = l2_norm(f).powi(2);
    let mut worst: f64 = 0.0;
    for p in &SYMBOLS {
        for &t in &TIMES {
            worst = worst.max((l2_norm(&evolve(f, p, t)).powi(2) - base).abs() / base);
        }
    }
    worst
}

pub fn group_law(f: &SpectralFunction) -> f64 {
    let scale = max_coefficient(f);
    let mut worst: f64 = 0.0;
    for p in &SYMBOLS {
        for (&s, &t) in TIMES.iter().zip(TIMES.iter().rev()) {
            let stepped = evolve(&evolve(f, p, s), p, t);
            worst = worst.max(max_coefficient_gap(&stepped, &evolve(f, p, s + t)) / scale);
        }
    }
    worst
}

pub fn translation_covariance(f: &SpectralFunction) -> f64 {
    let shift = [0.31, -0.17];
    let moved = f.map_coefficients(|xi, c| c * Complex64::from_polar(1.0, shift[0] * xi[0] + shift[1] * xi[1]));
    let scale = f.coefficient_l1();
    let mut worst: f64 = 0.0;
    for p in &SYMBOLS {
        for &t in &TIMES {
            for x in [[0.0, 0.0], [0.4, -0.25], [-0.6, 0.7]] {
                let a = evolve_at(&moved, p, &x, t);
                let b = evolve_at(f, p, &[x[0] + shift[0], x[1] + shift[1]], t);
                worst = worst.max((a - b).norm() / scale);
            }
        }
    }
    worst
}

/// Reassembly error of a split: infinite when a lattice point is covered twice
/// or missed, otherwise the largest coefficient mismatch relative to `max|f̂|`.
fn partition_error<'a>(f: &SpectralFunction, pieces: impl Iterator<Item = &'a SpectralFunction>) -> f64 {
    let mut seen: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for piece in pieces {
        for (idx, _, c) in piece.modes() {
            if seen.insert(idx.to_vec(), c).is_some() {
                return f64::INFINITY;
            }
        }
    }
    if seen.len() != f.len() {
        return f64::INFINITY;
    }
    let worst = f
        .modes()
        .map(|(idx, _, c)| seen.get(idx).map_or(f64::INFINITY, |d| (c - d).norm()))
        .fold(0.0, f64::max);
    worst / max_coefficient(f)
}

pub fn dyadic_partition(f: &SpectralFunction) -> f64 {
    let pieces = dyadic_split(f);
    partition_error(f, pieces.iter().map(|p| &p.piece))
}

/// Sector reassembly error of every annulus with `k ≥ 1`.
pub fn sector_partition(f: &SpectralFunction) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in [1.5, 2.0] {
        for piece in dyadic_split(f).into_iter().filter(|p| p.k >= 1) {
            let sectors = sector_split(&piece, m)?;
            worst = worst.max(partition_error(&piece.piece, sectors.iter().map(|s| &s.piece)));
        }
    }
    Ok(worst)
}

/// Relative defect of `‖f‖² = Σ_k ‖f_k‖²` over the dyadic split.
pub fn parseval(f: &SpectralFunction) -> f64 {
    let total = l2_norm(f).powi(2);
    let sum: f64 = dyadic_split(f).iter().map(|p| l2_norm(&p.piece).powi(2)).sum();
    (total - sum).abs() / total
}

pub fn fast_path(f: &SpectralFunction) -> Result<f64> {
    let lat = f.lattice();
    let spacing = BallQuadrature::commensurate_spacing(lat, BallQuadrature::default_spacing(lat));
    let ball = BallQuadrature::new(&[0.1, -0.2], 1.0, spacing)?;
    let mut worst: f64 = 0.0;
    for p in [Symbol::Elliptic, Symbol::Boussinesq] {
        let fast = evolve_field(f, &p, &ball, 0.37, EvalPath::Fft)?;
        let slow = evolve_field(f, &p, &ball, 0.37, EvalPath::Direct)?;
        let scale = slow.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in fast.values().iter().zip(slow.values()) {
            worst = worst.max((a - b).norm() / scale);
        }
    }
    Ok(worst)
}

/// At `t = 0` a box integral is a product of `(e^{ibx}−e^{iax})/(ix)`.
pub fn continuum_at_zero() -> Result<f64> {
    let axis = |a: f64, b: f64, x: f64| {
        if x == 0.0 {
            Complex64::new(b - a, 0.0)
        } else {
            (Complex64::from_polar(1.0, b * x) - Complex64::from_polar(1.0, a * x)) / Complex64::new(0.0, x)
        }
    };
    let boxes = [((-1.5, 2.0), (3.0, 7.5)), ((10.0, 11.0), (-4.0, 6.0))];
    let mut worst: f64 = 0.0;
    for (bx, by) in boxes {
        let set = RectangleSet::new(vec![Rectangle::new(bx, by)?])?;
        for x in [[0.0, 0.0], [2.3, -0.9], [-0.4, 1.7]] {
            let want = axis(bx.0, bx.1, x[0]) * axis(by.0, by.1, x[1]);
            for p in [Symbol::Elliptic, Symbol::Boussinesq, Symbol::FiniteType { m: 1.5 }] {
                let got = continuum_evolve(&set, &p, &x, 0.0)?;
                worst = worst.max((got - want).norm() / want.norm());
            }
        }
    }
    Ok(worst)
}

/// Slope error on exact power laws, with and without a constant rescaling.
pub fn fit_exactness() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (slope, scale) in [(0.5, 1.0), (0.37, 3.0), (-1.25, 0.01), (0.75, 1e6)] {
        let series: Vec<_> = (3..9).map(|k| 2f64.powi(k)).map(|a| (a, scale * a.powf(slope))).collect();
        let fit = fit_exponent(&series)?;
        worst = worst
            .max((fit.slope - slope).abs())
            .max((fit.intercept - scale.log2()).abs())
            .max(fit.residual);
    }
    Ok(worst)
}

/// Zero when a record survives `to_text`/`parse` unchanged.
pub fn record_round_trip() -> Result<f64> {
    let params = BTreeMap::from([("R".to_string(), "64,128".to_string()), ("seed".to_string(), "7".to_string())]);
    let series = vec![(64.0, 0.1 + 0.2), (128.0, 1.0 / 3.0), (256.0, 1e-300), (512.0, 6.02e23)];
    let metrics = BTreeMap::from([("calibration".to_string(), std::f64::consts::PI), ("tiny".to_string(), 5e-324)]);
    let rec = ExperimentRecord::new(ExperimentKind::Check, "pm:1.5", params, series, metrics, true)?;
    let back = ExperimentRecord::parse(&rec.to_text())?;
    Ok(if back == rec { 0.0 } else { 1.0 })
}

/// Largest `measured/bound` of the Taylor estimate over a few symbol pairs and times.
pub fn taylor_bound(f: &SpectralFunction) -> Result<f64> {
    let ball = BallQuadrature::unit(2, 0.1)?;
    let mut worst: f64 = 0.0;
    for q in [Symbol::Boussinesq, Symbol::Beam] {
        for &t in &TIMES {
            let b = perturbation_bound(f, &q, &Symbol::Elliptic, t, &ball)?;
            worst = worst.max(b.measured / b.bound);
        }
    }
    Ok(worst)
}

/// Runs every check on one seeded random datum.
pub fn invariant_suite(seed: u64) -> Result<Vec<InvariantOutcome>> {
    let lat = FrequencyLattice::new(2, 0.5, 16.0)?;
    let f = random_band_function(&lat, 256, seed, |_| true)?;
    let band = random_band_function(&FrequencyLattice::new(2, 0.5, 8.0)?, 64, seed ^ 0x5eed, |xi| {
        xi[0].hypot(xi[1]) >= 1.0
    })?;
    Ok(vec![
        InvariantOutcome::new("unitarity", unitarity(&f), EXACT_TOL),
        InvariantOutcome::new("group_law", group_law(&f), EXACT_TOL),
        InvariantOutcome::new("translation_covariance", translation_covariance(&f), EXACT_TOL),
        InvariantOutcome::new("dyadic_partition", dyadic_partition(&f), EXACT_TOL),
        InvariantOutcome::new("sector_partition", sector_partition(&f)?, EXACT_TOL),
        InvariantOutcome::new("parseval", parseval(&f), EXACT_TOL),
        InvariantOutcome::new("fast_path", fast_path(&f)?, FAST_PATH_TOL),
        InvariantOutcome::new("continuum_t0", continuum_at_zero()?, CONTINUUM_TOL),
        InvariantOutcome::new("fit_exactness", fit_exactness()?, EXACT_TOL),
        InvariantOutcome::new("record_round_trip", record_round_trip()?, 0.0),
        InvariantOutcome::new("taylor_bound", taylor_bound(&band)?, 1.0),
    ])
}
