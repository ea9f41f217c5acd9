use std::collections::BTreeMap;

use num_complex::Complex64;

use super::record::{ExperimentKind, ExperimentRecord};
use crate::error::{invalid, Result};
use crate::propagator::{maximal_field, EvalPath, TimeGrid};
use crate::spectral::{l2_norm, lp_ball_norm, BallQuadrature, FrequencyLattice, SpectralFunction};
use crate::symbols::Symbol;

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveConfig {
    pub scales: Vec<u32>,
    pub spacing: f64,
    /// Target ball-grid spacing; the default rule when absent. Rounded down to a
    /// transform-friendly value.
    pub ball_spacing: Option<f64>,
    pub safety: f64,
    pub t_count: Option<usize>,
}

impl Default for PositiveConfig {
    fn default() -> Self {
        Self {
            scales: (3..=7).collect(),
            spacing: 1.0,
            ball_spacing: None,
            safety: 4.0,
            t_count: None,
        }
    }
}

/// Lattice indicator of the annulus `2^{k−1} < |ξ| ≤ 2^k`.
pub fn annulus_indicator(k: u32, spacing: f64) -> Result<SpectralFunction> {
    let outer = 2f64.powi(k as i32);
    let lattice = FrequencyLattice::new(2, spacing, outer)?;
    Ok(SpectralFunction::from_fn(lattice, |xi| {
        let r = xi[0].hypot(xi[1]);
        (r > outer / 2.0 && r <= outer).then_some(Complex64::new(1.0, 0.0))
    }))
}

/// `ρ_k = ‖sup_t |e^{itP_m}f_k|‖_{L²(B)} / ‖f_k‖_{L²}` for annulus indicators.
///
/// `C` is calibrated at the smallest scale as `ρ_k/(k·2^{k/2})`; the run passes
/// when every `ρ_k ≤ safety·C·k·2^{k/2}`. Series: `(2^k, ρ_k)`.
pub fn positive_direction_experiment(m: f64, cfg: &PositiveConfig) -> Result<ExperimentRecord> {
    let p = Symbol::finite_type(m)?;
    let mut scales = cfg.scales.clone();
    scales.sort_unstable();
    scales.dedup();
    if scales.len() < 2 || scales.iter().any(|k| !(3..=8).contains(k)) {
        return Err(invalid("positive-direction scales must be at least two values in [3, 8]"));
    }
    let shape = |k: u32| k as f64 * 2f64.powf(k as f64 / 2.0);
    let mut series = Vec::with_capacity(scales.len());
    let mut overridden = false;
    for &k in &scales {
        let f = annulus_indicator(k, cfg.spacing)?;
        let target = cfg.ball_spacing.unwrap_or_else(|| BallQuadrature::default_spacing(f.lattice()));
        let ball = BallQuadrature::new(&[0.0, 0.0], 1.0, BallQuadrature::commensurate_spacing(f.lattice(), target))?;
        let tg = match cfg.t_count {
            Some(n) => TimeGrid::with_count(0.0, 1.0, n, &p, &f)?,
            None => TimeGrid::resolving(0.0, 1.0, &p, &f)?,
        };
        overridden |= tg.overridden();
        let field = maximal_field(&f, &p, &ball, &tg, EvalPath::Auto)?;
        series.push((2f64.powi(k as i32), lp_ball_norm(&field, 2.0)? / l2_norm(&f)));
    }
    let c = series[0].1 / shape(scales[0]);
    let mut worst: f64 = 0.0;
    for (&k, &(_, rho)) in scales.iter().zip(&series) {
        worst = worst.max(rho / (cfg.safety * c * shape(k)));
    }
    let params = BTreeMap::from([
        ("m".to_string(), m.to_string()),
        ("scales".to_string(), scales.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")),
        ("h".to_string(), cfg.spacing.to_string()),
        ("safety".to_string(), cfg.safety.to_string()),
        ("t_overridden".to_string(), overridden.to_string()),
    ]);
    let metrics = BTreeMap::from([("calibration".to_string(), c), ("bound_ratio".to_string(), worst)]);
    ExperimentRecord::new(ExperimentKind::Positive, p.to_string(), params, series, metrics, worst <= 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_is_sharp() {
        let f = annulus_indicator(3, 1.0).unwrap();
        assert!(f.modes().all(|(_, xi, _)| {
            let r = xi[0].hypot(xi[1]);
            r > 4.0 && r <= 8.0
        }));
        assert!(f.coefficient_at(&[8, 0]) == Complex64::new(1.0, 0.0));
        assert!(f.coefficient_at(&[4, 0]) == Complex64::new(0.0, 0.0));
    }

    #[test]
    fn single_mode_rho_is_root_pi() {
        let lat = FrequencyLattice::new(2, 1.0, 8.0).unwrap();
        let f = SpectralFunction::single(lat, &[5, 1], Complex64::new(1.0, 0.0)).unwrap();
        let ball = BallQuadrature::unit(2, 0.01).unwrap();
        let tg = TimeGrid::uniform(0.0, 1.0, 5).unwrap();
        let field = maximal_field(&f, &Symbol::FiniteType { m: 2.0 }, &ball, &tg, EvalPath::Direct).unwrap();
        let rho = lp_ball_norm(&field, 2.0).unwrap() / l2_norm(&f);
        assert!((rho - std::f64::consts::PI.sqrt()).abs() < 1e-2);
    }

    #[test]
    fn coarse_run() {
        let cfg = PositiveConfig {
            scales: vec![3, 4],
            t_count: Some(300),
            ..PositiveConfig::default()
        };
        let rec = positive_direction_experiment(2.0, &cfg).unwrap();
        assert!(rec.pass);
        assert_eq!(rec.series[0].0, 8.0);
        assert!(positive_direction_experiment(2.0, &PositiveConfig { scales: vec![2, 3], ..cfg }).is_err());
    }
}
