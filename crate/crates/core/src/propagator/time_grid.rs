use std::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::spectral::SpectralFunction;
use crate::symbols::Symbol;

/// Uniform times `t_i = t_min + i·(t_max − t_min)/(count − 1)` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_min: f64,
    t_max: f64,
    count: usize,
    overridden: bool,
}

impl TimeGrid {
    /// Grid obeying `Δt ≤ 2π/(10·max|P|)` with `max|P|` taken over the support of `f`.
    pub fn resolving(t_min: f64, t_max: f64, p: &Symbol, f: &SpectralFunction) -> Result<Self> {
        Self::check_range(t_min, t_max)?;
        let count = Self::required_count(t_min, t_max, p.max_abs_on(f));
        Ok(Self {
            t_min,
            t_max,
            count,
            overridden: false,
        })
    }

    /// Grid with an explicit count; flagged as overridden when it is coarser than
    /// the oscillation rule demands.
    pub fn with_count(t_min: f64, t_max: f64, count: usize, p: &Symbol, f: &SpectralFunction) -> Result<Self> {
        Self::check_range(t_min, t_max)?;
        if count < 2 {
            return Err(invalid("a time grid needs at least two times"));
        }
        let needed = Self::required_count(t_min, t_max, p.max_abs_on(f));
        Ok(Self {
            t_min,
            t_max,
            count,
            overridden: count < needed,
        })
    }

    /// Grid with an explicit count and no symbol to check against.
    pub fn uniform(t_min: f64, t_max: f64, count: usize) -> Result<Self> {
        Self::check_range(t_min, t_max)?;
        if count < 2 {
            return Err(invalid("a time grid needs at least two times"));
        }
        Ok(Self {
            t_min,
            t_max,
            count,
            overridden: true,
        })
    }

    fn check_range(t_min: f64, t_max: f64) -> Result<()> {
        if !(t_min >= 0.0 && t_min < t_max && t_max <= 1.0) {
            return Err(invalid(format!("time range [{t_min}, {t_max}] must satisfy 0 <= t_min < t_max <= 1")));
        }
        Ok(())
    }

    fn required_count(t_min: f64, t_max: f64, max_abs: f64) -> usize {
        let dt = TAU / (10.0 * max_abs.max(f64::MIN_POSITIVE));
        let steps = ((t_max - t_min) / dt).ceil();
        if steps.is_finite() {
            (steps as usize).max(1) + 1
        } else {
            2
        }
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        (self.t_max - self.t_min) / (self.count - 1) as f64
    }

    /// Whether the oscillation rule was relaxed by an explicit count.
    pub fn overridden(&self) -> bool {
        self.overridden
    }

    pub fn times(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == last {
                    self.t_max
                } else {
                    self.t_min + (self.t_max - self.t_min) * i as f64 / last as f64
                }
            })
            .collect()
    }

    /// The grid with `factor` times as many intervals; contains every original time.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            count: (self.count - 1) * factor.max(1) + 1,
            ..self.clone()
        }
    }
}
