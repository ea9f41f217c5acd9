use std::collections::BTreeMap;

use super::record::{ExperimentKind, ExperimentRecord};
use super::{fit_exponent, join};
use crate::error::{invalid, Error, Result};
use crate::extremals::{bourgain_search, pm_witness_check, residual_threshold, BourgainDatum, PmDatum, SearchBudget};
use crate::propagator::continuum_evolve;
use crate::symbols::Symbol;

/// Slope thresholds for the ratio `value / ‖f‖_{L²}`.
pub const BOUSSINESQ_SLOPE: f64 = 0.28;
pub const FINITE_TYPE_SLOPE: f64 = 0.45;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthConfig {
    pub radii: Vec<f64>,
    pub budget: SearchBudget,
    pub witness_samples: usize,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            radii: vec![64.0, 128.0, 256.0, 512.0],
            budget: SearchBudget::default(),
            witness_samples: 64,
        }
    }
}

/// Counterexample growth: series `(R, witness value / ‖f‖_{L²})`.
///
/// For `boussinesq` the witness is the Boussinesq evolution at the point found
/// by the elliptic search; for `pm:<m>` with `1 < m < 2` it is the minimum
/// modulus over the witness region at the witness time.
pub fn growth_experiment(symbol: &Symbol, cfg: &GrowthConfig) -> Result<ExperimentRecord> {
    if cfg.radii.len() < 3 || cfg.radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("growth experiment needs at least three ascending radii"));
    }
    let mut params = BTreeMap::from([("radii".to_string(), join(&cfg.radii))]);
    let mut metrics = BTreeMap::new();
    let mut series = Vec::with_capacity(cfg.radii.len());
    let threshold = match *symbol {
        Symbol::Boussinesq => {
            params.insert("x_samples".into(), cfg.budget.x_samples.to_string());
            params.insert("t_samples".into(), cfg.budget.t_samples.to_string());
            params.insert("refine_steps".into(), cfg.budget.refine_steps.to_string());
            let mut transfer_ok = true;
            for &r in &cfg.radii {
                let d = BourgainDatum::new(r)?;
                let found = bourgain_search(&d, &cfg.budget)?;
                let value = continuum_evolve(d.strips(), &Symbol::Boussinesq, &found.x, found.t)?.norm();
                // |P_B − |ξ|²| ≤ 1/2 everywhere
                let bound = (0.5 * found.t).exp_m1() * d.area();
                transfer_ok &= (value - found.value).abs() <= bound + 1e-9;
                metrics.insert(format!("elliptic.{r}"), found.value);
                metrics.insert(format!("transfer_bound.{r}"), bound);
                metrics.insert(format!("t.{r}"), found.t);
                series.push((r, value / d.l2_norm()));
            }
            let elliptic: Vec<(f64, f64)> = cfg.radii.iter().map(|&r| (r, metrics[&format!("elliptic.{r}")])).collect();
            metrics.insert("elliptic_slope".into(), fit_exponent(&elliptic)?.slope);
            metrics.insert(
                "calibration".into(),
                elliptic[0].1 / elliptic[0].0.powf(0.75),
            );
            metrics.insert("transfer_ok".into(), f64::from(u8::from(transfer_ok)));
            BOUSSINESQ_SLOPE
        }
        Symbol::FiniteType { m } if m > 1.0 && m < 2.0 => {
            params.insert("m".into(), m.to_string());
            params.insert("witness_samples".into(), cfg.witness_samples.to_string());
            let mut worst_residual: f64 = 0.0;
            for &r in &cfg.radii {
                let d = PmDatum::new(r, m)?;
                let w = pm_witness_check(&d, cfg.witness_samples)?;
                worst_residual = worst_residual.max(w.max_residual);
                metrics.insert(format!("min_modulus.{r}"), w.min_modulus);
                series.push((r, w.min_modulus / d.l2_norm()));
            }
            metrics.insert("max_residual".into(), worst_residual);
            let radii: Vec<f64> = (6..=20).map(|e| 2f64.powi(e)).collect();
            if let Some(r) = residual_threshold(m, &radii, 0.1)? {
                metrics.insert("residual_radius".into(), r);
            }
            FINITE_TYPE_SLOPE
        }
        _ => return Err(Error::UnknownSymbol(format!("no growth experiment for `{symbol}`"))),
    };
    params.insert("slope_threshold".into(), threshold.to_string());
    let slope = fit_exponent(&series)?.slope;
    ExperimentRecord::new(ExperimentKind::Growth, symbol.to_string(), params, series, metrics, slope >= threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_type_norms_and_slope() {
        let cfg = GrowthConfig {
            radii: vec![64.0, 128.0, 256.0],
            witness_samples: 16,
            ..GrowthConfig::default()
        };
        let rec = growth_experiment(&Symbol::FiniteType { m: 1.5 }, &cfg).unwrap();
        for &(r, ratio) in &rec.series {
            let modulus = rec.metrics[&format!("min_modulus.{r}")];
            assert!((modulus / ratio - (r / 2.0).sqrt()).abs() < 1e-12);
        }
        assert!(rec.fit.unwrap().slope >= FINITE_TYPE_SLOPE);
        assert!(rec.pass);
        assert!(!rec.metrics.contains_key("residual_radius"));
    }

    #[test]
    fn rejects_other_symbols_and_short_lists() {
        let cfg = GrowthConfig::default();
        assert!(growth_experiment(&Symbol::Elliptic, &cfg).is_err());
        assert!(growth_experiment(&Symbol::FiniteType { m: 3.0 }, &cfg).is_err());
        let short = GrowthConfig {
            radii: vec![64.0, 128.0],
            ..cfg
        };
        assert!(growth_experiment(&Symbol::Boussinesq, &short).is_err());
    }

    #[test]
    fn boussinesq_small_budget() {
        let cfg = GrowthConfig {
            radii: vec![64.0, 128.0, 256.0],
            budget: SearchBudget {
                x_samples: 64,
                t_samples: 32,
                refine_steps: 10,
            },
            witness_samples: 16,
        };
        let rec = growth_experiment(&Symbol::Boussinesq, &cfg).unwrap();
        assert_eq!(rec.metrics["transfer_ok"], 1.0);
        assert_eq!(rec.series.len(), 3);
    }
}
