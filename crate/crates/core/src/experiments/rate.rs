use std::collections::BTreeMap;

use super::profile::RegularityProfile;
use super::record::{ExperimentKind, ExperimentRecord};
use super::{fit_exponent, join};
use crate::error::{invalid, Result};
use crate::propagator::{sup_over_times, weight_exponent, EvalPath, Kernel};
use crate::spectral::{BallQuadrature, FrequencyLattice};
use crate::symbols::Symbol;

#[derive(Debug, Clone, PartialEq)]
pub struct RateConfig {
    pub spacing: f64,
    pub cutoff: f64,
    /// Strictly decreasing times in `(0, 1]`.
    pub times: Vec<f64>,
    /// Target ball-grid spacing; rounded down to a transform-friendly value.
    pub ball_spacing: Option<f64>,
    pub path: EvalPath,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self {
            spacing: 0.5,
            cutoff: 32.0,
            times: (4..=12).map(|e| 2f64.powi(-e)).collect(),
            ball_spacing: None,
            path: EvalPath::Auto,
        }
    }
}

/// Convergence rate: series `(t, max_{B(0,1)} |e^{itP(D)}f − f|)` for `f` with the
/// `H^{s+δ}` profile. Passes when the fitted slope is at least `δ/m − 0.1`.
pub fn rate_experiment(p: &Symbol, delta: f64, s: f64, cfg: &RateConfig) -> Result<ExperimentRecord> {
    let theta = weight_exponent(p, delta)?;
    if cfg.times.len() < 5 {
        return Err(invalid("rate experiment needs at least five times"));
    }
    if cfg.times.windows(2).any(|w| w[1] >= w[0]) || cfg.times.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(invalid("times must decrease strictly within (0, 1]"));
    }
    let dim = p.required_dim().unwrap_or(2);
    let lattice = FrequencyLattice::new(dim, cfg.spacing, cfg.cutoff)?;
    let f = RegularityProfile::new(s + delta, dim).function(&lattice);
    let target = cfg.ball_spacing.unwrap_or_else(|| BallQuadrature::default_spacing(&lattice));
    let ball = BallQuadrature::new(&vec![0.0; dim], 1.0, BallQuadrature::commensurate_spacing(&lattice, target))?;
    let values: Vec<f64> = f.modes().map(|(_, xi, _)| p.eval(xi)).collect();

    let mut series = Vec::with_capacity(cfg.times.len());
    for &t in &cfg.times {
        let field = sup_over_times(&f, &values, &ball, &[t], Kernel::Increment, |_| 1.0, cfg.path)?;
        series.push((t, field.into_iter().fold(0.0, f64::max)));
    }
    let slope = fit_exponent(&series)?.slope;
    let threshold = theta - 0.1;
    let params = BTreeMap::from([
        ("delta".to_string(), delta.to_string()),
        ("s".to_string(), s.to_string()),
        ("h".to_string(), cfg.spacing.to_string()),
        ("cutoff".to_string(), cfg.cutoff.to_string()),
        ("ball_spacing".to_string(), ball.spacing().to_string()),
        ("times".to_string(), join(&cfg.times)),
        ("slope_threshold".to_string(), threshold.to_string()),
    ]);
    let metrics = BTreeMap::from([
        ("theta".to_string(), theta),
        ("beta".to_string(), RegularityProfile::new(s + delta, dim).beta()),
    ]);
    ExperimentRecord::new(ExperimentKind::Rate, p.to_string(), params, series, metrics, slope >= threshold)
}
