use super::ball::{Magnitude, SampledField};
use super::function::SpectralFunction;
use crate::error::{invalid, Result};

/// `‖f‖_{L²} = (Σ|f̂|²hⁿ)^{1/2}`.
pub fn l2_norm(f: &SpectralFunction) -> f64 {
    let sum: f64 = f.coefficients().iter().map(|c| c.norm_sqr()).sum();
    (sum * f.lattice().cell_volume()).sqrt()
}

/// `‖f‖_{Hˢ} = (Σ(1+|ξ|²)ˢ|f̂|²hⁿ)^{1/2}` for any real `s`.
pub fn sobolev_norm(f: &SpectralFunction, s: f64) -> f64 {
    if s == 0.0 {
        return l2_norm(f);
    }
    let sum: f64 = f
        .modes()
        .map(|(_, xi, c)| {
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            (1.0 + r2).powf(s) * c.norm_sqr()
        })
        .sum();
    (sum * f.lattice().cell_volume()).sqrt()
}

/// Midpoint-rule `Lᵖ(B)` norm of a sampled field; `p = ∞` gives `max|v|`.
pub fn lp_ball_norm<T: Magnitude>(field: &SampledField<T>, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("Lp exponent {p} must be at least 1")));
    }
    let values = field.values();
    if p.is_infinite() {
        return Ok(values.iter().map(Magnitude::magnitude).fold(0.0, f64::max));
    }
    let w = field.ball().node_weight();
    let sum: f64 = if p == 1.0 {
        values.iter().map(Magnitude::magnitude).sum()
    } else if p == 2.0 {
        values.iter().map(|v| v.magnitude().powi(2)).sum()
    } else {
        values.iter().map(|v| v.magnitude().powf(p)).sum()
    };
    Ok((sum * w).powf(1.0 / p))
}
