use crate::error::{invalid, Result};

/// Ordinary least-squares line through `(log₂ a, log₂ v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log₂ units.
    pub residual: f64,
}

pub fn fit_exponent(series: &[(f64, f64)]) -> Result<ExponentFit> {
    if series.len() < 3 {
        return Err(invalid(format!("need at least 3 points to fit, got {}", series.len())));
    }
    if let Some(&(a, v)) = series.iter().find(|(a, v)| !(*a > 0.0 && *v > 0.0) || !a.is_finite() || !v.is_finite()) {
        return Err(invalid(format!("cannot fit nonpositive point ({a}, {v})")));
    }
    let n = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|(a, _)| a.log2()).collect();
    let ys: Vec<f64> = series.iter().map(|(_, v)| v.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("abscissae are all equal"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn exact_power_laws() {
        let id: Vec<_> = [1.0, 2.0, 5.0, 11.0].iter().map(|&a| (a, a)).collect();
        assert!((fit_exponent(&id).unwrap().slope - 1.0).abs() < 1e-12);
        let flat: Vec<_> = [1.0, 2.0, 5.0, 11.0].iter().map(|&a| (a, 3.5)).collect();
        let fit = fit_exponent(&flat).unwrap();
        assert!(fit.slope.abs() < 1e-12 && fit.residual < 1e-12);
    }

    #[test]
    fn noisy_cube_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let series: Vec<_> = (0..12)
            .map(|i| {
                let a = 2f64.powi(i + 2);
                (a, a.cbrt() * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
            })
            .collect();
        let s = fit_exponent(&series).unwrap().slope;
        assert!((0.32..=0.35).contains(&s), "{s}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_exponent(&[(-1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_exponent_and_ignores_scale(
            exponent in -3.0f64..3.0,
            scale in 1e-3f64..1e3,
            start in 0.1f64..10.0,
        ) {
            let series: Vec<_> = (0..6).map(|i| {
                let a = start * 1.7f64.powi(i);
                (a, scale * a.powf(exponent))
            }).collect();
            let fit = fit_exponent(&series).unwrap();
            prop_assert!((fit.slope - exponent).abs() < 1e-12);
            let base: Vec<_> = series.iter().map(|&(a, v)| (a, v / scale)).collect();
            prop_assert!((fit_exponent(&base).unwrap().slope - fit.slope).abs() < 1e-12);
        }
    }
}
