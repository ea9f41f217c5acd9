use std::collections::BTreeMap;

use super::data::random_band_function;
use super::record::{ExperimentKind, ExperimentRecord};
use crate::error::{invalid, Error, Result};
use crate::propagator::{maximal_field, EvalPath, TimeGrid};
use crate::spectral::{l2_norm, lp_ball_norm, BallQuadrature, FrequencyLattice, SpectralFunction};
use crate::symbols::Symbol;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingConfig {
    pub scales: Vec<u32>,
    pub seeds: usize,
    pub modes: usize,
    pub spacing: f64,
    pub ball_spacing: f64,
    pub t_count: Option<usize>,
    pub base_seed: u64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            scales: (3..=7).collect(),
            seeds: 20,
            modes: 64,
            spacing: 0.5,
            ball_spacing: 0.05,
            t_count: None,
            base_seed: 0,
        }
    }
}

/// Both sides of the weighted smoothing inequality for one datum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingSides {
    /// `‖sup_t |e^{itP}g|‖_{L²(B)}`
    pub lhs: f64,
    /// `‖g‖ + (Σ|P|²/|∇P|·|ĝ|²hⁿ)^{1/4}(Σ 1/|∇P|·|ĝ|²hⁿ)^{1/4}`
    pub rhs: f64,
}

impl SmoothingSides {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// `(|P|²/|∇P|, 1/|∇P|)` at `ξ`; a vanishing or undefined gradient is an error.
pub fn smoothing_weights(p: &Symbol, xi: &[f64]) -> Result<(f64, f64)> {
    let g = p.grad(xi)?;
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::SingularPoint {
            symbol: p.to_string(),
            point: xi.to_vec(),
        });
    }
    let v = p.eval(xi);
    Ok((v * v / norm, 1.0 / norm))
}

pub fn smoothing_sides(g: &SpectralFunction, p: &Symbol, ball: &BallQuadrature, tg: &TimeGrid) -> Result<SmoothingSides> {
    let w = g.lattice().cell_volume();
    let (mut s1, mut s2) = (0.0, 0.0);
    for (_, xi, c) in g.modes() {
        let (w1, w2) = smoothing_weights(p, xi)?;
        s1 += w1 * c.norm_sqr() * w;
        s2 += w2 * c.norm_sqr() * w;
    }
    let lhs = lp_ball_norm(&maximal_field(g, p, ball, tg, EvalPath::Auto)?, 2.0)?;
    Ok(SmoothingSides {
        lhs,
        rhs: l2_norm(g) + s1.powf(0.25) * s2.powf(0.25),
    })
}

/// Scale uniformity of the smoothing ratio for `P_m`.
///
/// For each `k`, `seeds` random data on `2^{k−1} < |ξ| ≤ 2^k` (avoiding points
/// where `∇P_m` is undefined) give ratios LHS/RHS; the series holds
/// `(2^k, max ratio)` and the run passes when the largest entry is at most
/// eight times the smallest.
pub fn smoothing_experiment(m: f64, cfg: &SmoothingConfig) -> Result<ExperimentRecord> {
    let p = Symbol::finite_type(m)?;
    if cfg.scales.is_empty() || cfg.scales.iter().any(|k| !(3..=10).contains(k)) {
        return Err(invalid("smoothing scales must lie in [3, 10]"));
    }
    if cfg.seeds < 20 {
        return Err(invalid("smoothing experiment needs at least 20 seeds"));
    }
    let mut series = Vec::with_capacity(cfg.scales.len());
    let mut metrics = BTreeMap::new();
    let mut overridden = false;
    for &k in &cfg.scales {
        let outer = 2f64.powi(k as i32);
        let lattice = FrequencyLattice::new(2, cfg.spacing, outer)?;
        let ball = BallQuadrature::unit(2, cfg.ball_spacing)?;
        let band = |xi: &[f64]| {
            let r = xi[0].hypot(xi[1]);
            r > outer / 2.0 && r <= outer && !p.is_singular(xi)
        };
        let mut worst: f64 = 0.0;
        let mut best = f64::INFINITY;
        for s in 0..cfg.seeds {
            let seed = cfg.base_seed + 1000 * k as u64 + s as u64;
            let g = random_band_function(&lattice, cfg.modes, seed, band)?;
            let tg = match cfg.t_count {
                Some(n) => TimeGrid::with_count(0.0, 1.0, n, &p, &g)?,
                None => TimeGrid::resolving(0.0, 1.0, &p, &g)?,
            };
            overridden |= tg.overridden();
            let ratio = smoothing_sides(&g, &p, &ball, &tg)?.ratio();
            worst = worst.max(ratio);
            best = best.min(ratio);
        }
        metrics.insert(format!("min_ratio.{k}"), best);
        series.push((outer, worst));
    }
    let hi = series.iter().map(|s| s.1).fold(0.0, f64::max);
    let lo = series.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    metrics.insert("spread".into(), hi / lo);
    let params = BTreeMap::from([
        ("m".to_string(), m.to_string()),
        ("scales".to_string(), cfg.scales.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")),
        ("seeds".to_string(), cfg.seeds.to_string()),
        ("modes".to_string(), cfg.modes.to_string()),
        ("h".to_string(), cfg.spacing.to_string()),
        ("ball_spacing".to_string(), cfg.ball_spacing.to_string()),
        ("base_seed".to_string(), cfg.base_seed.to_string()),
        ("t_overridden".to_string(), overridden.to_string()),
    ]);
    ExperimentRecord::new(ExperimentKind::Smoothing, p.to_string(), params, series, metrics, hi <= 8.0 * lo)
}
