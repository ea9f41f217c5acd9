use std::collections::BTreeMap;

use super::data::{closed_band, random_band_function};
use super::join;
use super::record::{ExperimentKind, ExperimentRecord};
use crate::error::{invalid, Result};
use crate::propagator::{maximal_field, perturbation_bound_with_gap, support_gap, EvalPath, TimeGrid};
use crate::spectral::{lp_ball_norm, BallQuadrature, FrequencyLattice};
use crate::symbols::Symbol;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferConfig {
    pub functions: usize,
    pub modes: usize,
    /// Support band `r_min ≤ |ξ| ≤ r_max`.
    pub band: (f64, f64),
    pub spacing: f64,
    pub cutoff: f64,
    pub times: Vec<f64>,
    pub ball_spacing: Option<f64>,
    /// Exponent of the `L^p(B)` comparison between maximal fields.
    pub p_norm: f64,
    /// Explicit time count for the maximal fields; the oscillation rule otherwise.
    pub t_count: Option<usize>,
    pub seed: u64,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            functions: 50,
            modes: 64,
            band: (4.0, 8.0),
            spacing: 0.5,
            cutoff: 8.0,
            times: (0..=6).rev().map(|e| 2f64.powi(-e)).collect(),
            ball_spacing: None,
            p_norm: 2.0,
            t_count: None,
            seed: 0,
        }
    }
}

/// Perturbation transfer between `P` and `Q` on random band-limited data.
///
/// For each function and time the Taylor bound `(e^{t·gap} − 1)‖f̂‖₁hⁿ` must
/// dominate `|e^{itP(D)}f − e^{itQ(D)}f|` at every node, and the `L^p(B)` norms
/// of the two maximal fields must differ by at most
/// `(e^{gap} − 1)‖f̂‖₁hⁿ·|B|^{1/p}`. Series: `(t, max measured / bound)`.
pub fn transfer_experiment(p: &Symbol, q: &Symbol, cfg: &TransferConfig) -> Result<ExperimentRecord> {
    if cfg.functions == 0 || cfg.times.is_empty() {
        return Err(invalid("transfer experiment needs functions and times"));
    }
    if cfg.times.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
        return Err(invalid("transfer times must lie in [0, 1]"));
    }
    let dim = match (p.required_dim(), q.required_dim()) {
        (Some(a), Some(b)) if a != b => return Err(invalid("symbols live in different dimensions")),
        (a, b) => a.or(b).unwrap_or(2),
    };
    let lattice = FrequencyLattice::new(dim, cfg.spacing, cfg.cutoff)?;
    let ball = BallQuadrature::new(
        &vec![0.0; dim],
        1.0,
        cfg.ball_spacing.unwrap_or_else(|| BallQuadrature::default_spacing(&lattice)),
    )?;

    let mut worst_ratio = vec![0.0f64; cfg.times.len()];
    let mut violations = 0usize;
    let mut norm_violations = 0usize;
    let mut max_gap: f64 = 0.0;
    let mut max_norm_gap: f64 = 0.0;
    let mut overridden = false;
    for i in 0..cfg.functions {
        let f = random_band_function(&lattice, cfg.modes, cfg.seed + i as u64, closed_band(cfg.band.0, cfg.band.1))?;
        let gap = support_gap(&f, p, q)?;
        max_gap = max_gap.max(gap);
        for (k, &t) in cfg.times.iter().enumerate() {
            let b = perturbation_bound_with_gap(&f, p, q, t, &ball, gap)?;
            if !b.holds() {
                violations += 1;
            }
            if b.bound > 0.0 {
                worst_ratio[k] = worst_ratio[k].max(b.measured / b.bound);
            }
        }
        let grid = |s: &Symbol| match cfg.t_count {
            Some(n) => TimeGrid::with_count(0.0, 1.0, n, s, &f),
            None => TimeGrid::resolving(0.0, 1.0, s, &f),
        };
        let (gp, gq) = (grid(p)?, grid(q)?);
        let tg = if gp.count() >= gq.count() { gp } else { gq };
        overridden |= tg.overridden();
        let mp = maximal_field(&f, p, &ball, &tg, EvalPath::Auto)?;
        let mq = maximal_field(&f, q, &ball, &tg, EvalPath::Auto)?;
        let diff = (lp_ball_norm(&mp, cfg.p_norm)? - lp_ball_norm(&mq, cfg.p_norm)?).abs();
        let allowed = gap.exp_m1() * f.coefficient_l1() * ball.measure().powf(1.0 / cfg.p_norm);
        max_norm_gap = max_norm_gap.max(if allowed > 0.0 { diff / allowed } else { diff });
        if diff > allowed + 1e-9 {
            norm_violations += 1;
        }
    }

    let series = cfg.times.iter().copied().zip(worst_ratio).collect();
    let mut params = BTreeMap::from([
        ("q".to_string(), q.to_string()),
        ("functions".to_string(), cfg.functions.to_string()),
        ("modes".to_string(), cfg.modes.to_string()),
        ("band".to_string(), join(&[cfg.band.0, cfg.band.1])),
        ("h".to_string(), cfg.spacing.to_string()),
        ("cutoff".to_string(), cfg.cutoff.to_string()),
        ("ball_spacing".to_string(), ball.spacing().to_string()),
        ("times".to_string(), join(&cfg.times)),
        ("p_norm".to_string(), cfg.p_norm.to_string()),
        ("seed".to_string(), cfg.seed.to_string()),
        ("t_overridden".to_string(), overridden.to_string()),
    ]);
    // the estimate transfers from whichever side has a known threshold
    if let Some(s0) = q.reference_regularity().or(p.reference_regularity()) {
        params.insert("s0".to_string(), s0.to_string());
    }
    let metrics = BTreeMap::from([
        ("gap".to_string(), max_gap),
        ("violations".to_string(), violations as f64),
        ("norm_violations".to_string(), norm_violations as f64),
        ("norm_ratio".to_string(), max_norm_gap),
    ]);
    let pass = violations == 0 && norm_violations == 0;
    ExperimentRecord::new(ExperimentKind::Transfer, p.to_string(), params, series, metrics, pass)
}
