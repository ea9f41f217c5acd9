use std::collections::BTreeMap;

use dispersal_core::decompose::{dyadic_split, sector_split};
use dispersal_core::experiments::{fit_exponent, random_band_function, ExperimentKind, ExperimentRecord};
use dispersal_core::extremals::{BourgainDatum, PmDatum, WITNESS_X1, WITNESS_X2};
use dispersal_core::propagator::{evolve, evolve_at, maximal_field, perturbation_bound, EvalPath, TimeGrid};
use dispersal_core::symbols::{perturbation_gap, BandScan};
use dispersal_core::{
    l2_norm, lp_ball_norm, sobolev_norm, synthesize, BallQuadrature, Complex64, FrequencyLattice, SampledField,
    SpectralFunction, Symbol,
};
use proptest::prelude::*;

fn lattice() -> FrequencyLattice {
    FrequencyLattice::new(2, 0.5, 8.0).unwrap()
}

fn datum(seed: u64, count: usize) -> SpectralFunction {
    random_band_function(&lattice(), count, seed, |_| true).unwrap()
}

fn symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        Just(Symbol::Elliptic),
        Just(Symbol::NonElliptic),
        Just(Symbol::Boussinesq),
        Just(Symbol::Beam),
        (1.05f64..3.0).prop_map(|m| Symbol::FiniteType { m }),
        (1.1f64..3.0).prop_map(|alpha| Symbol::Fractional { alpha }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn synthesis_is_linear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let f = datum(seed, 40);
        let g = datum(seed + 7919, 40);
        let (alpha, beta) = (Complex64::new(a, 0.5), Complex64::new(-0.25, b));
        let lhs = synthesize(&f.combine(alpha, &g, beta).unwrap(), &[x, y]);
        let rhs = alpha * synthesize(&f, &[x, y]) + beta * synthesize(&g, &[x, y]);
        let scale = (alpha.norm() * f.coefficient_l1()).max(beta.norm() * g.coefficient_l1());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn lattice_evolution_is_unitary(seed in 0u64..1000, p in symbol(), t in -2.0f64..2.0) {
        let f = datum(seed, 64);
        let (a, b) = (l2_norm(&f), l2_norm(&evolve(&f, &p, t)));
        prop_assert!((a * a - b * b).abs() <= 1e-12 * a * a);
    }

    #[test]
    fn group_law(seed in 0u64..1000, p in symbol(), s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let f = datum(seed, 64);
        let stepped = evolve(&evolve(&f, &p, s), &p, t);
        let direct = evolve(&f, &p, s + t);
        let scale = f.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max);
        for ((_, _, a), (_, _, b)) in stepped.modes().zip(direct.modes()) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn modulation_shifts_the_evolution(
        seed in 0u64..1000, p in symbol(), t in 0.0f64..1.0,
        x0 in -0.5f64..0.5, y0 in -0.5f64..0.5, x in -1.0f64..1.0, y in -1.0f64..1.0,
    ) {
        let f = datum(seed, 48);
        let moved = f.map_coefficients(|xi, c| c * Complex64::from_polar(1.0, x0 * xi[0] + y0 * xi[1]));
        let a = evolve_at(&moved, &p, &[x, y], t);
        let b = evolve_at(&f, &p, &[x + x0, y + y0], t);
        prop_assert!((a - b).norm() <= 1e-12 * f.coefficient_l1());
    }

    #[test]
    fn parseval_over_disjoint_supports(seed in 0u64..1000, cut in -4.0f64..4.0, slope in -2.0f64..2.0) {
        let f = datum(seed, 80);
        let left = f.restrict(|xi| xi[1] < slope * xi[0] + cut);
        let right = f.restrict(|xi| xi[1] >= slope * xi[0] + cut);
        let whole = l2_norm(&f).powi(2);
        let parts = l2_norm(&left).powi(2) + l2_norm(&right).powi(2);
        prop_assert!((whole - parts).abs() <= 1e-12 * whole);
    }

    #[test]
    fn sobolev_norm_is_monotone(seed in 0u64..1000, s in -2.0f64..2.0, ds in 0.0f64..2.0) {
        let f = datum(seed, 32);
        prop_assert!(sobolev_norm(&f, s) <= sobolev_norm(&f, s + ds) * (1.0 + 1e-14));
        prop_assert!((sobolev_norm(&f, 0.0) - l2_norm(&f)).abs() <= 1e-14 * l2_norm(&f));
    }

    #[test]
    fn ball_norm_is_monotone_under_domination(values in proptest::collection::vec(0.0f64..5.0, 1..40), p in 1.0f64..6.0) {
        let ball = BallQuadrature::unit(2, 0.5).unwrap();
        let n = ball.len();
        let small: Vec<f64> = (0..n).map(|i| values[i % values.len()]).collect();
        let big: Vec<f64> = small.iter().enumerate().map(|(i, v)| v + (i % 3) as f64 * 0.1).collect();
        let a = SampledField::new(ball.clone(), small).unwrap();
        let b = SampledField::new(ball, big).unwrap();
        prop_assert!(lp_ball_norm(&a, p).unwrap() <= lp_ball_norm(&b, p).unwrap());
        prop_assert!(lp_ball_norm(&a, f64::INFINITY).unwrap() <= lp_ball_norm(&b, f64::INFINITY).unwrap());
    }

    #[test]
    fn dyadic_and_sector_splits_partition(seed in 0u64..1000, m in 1.1f64..3.0) {
        let f = datum(seed, 96);
        let pieces = dyadic_split(&f);
        prop_assert_eq!(pieces.iter().map(|p| p.piece.len()).sum::<usize>(), f.len());
        for piece in pieces.iter().filter(|p| p.k >= 1) {
            let sectors = sector_split(piece, m).unwrap();
            prop_assert_eq!(sectors.iter().map(|s| s.piece.len()).sum::<usize>(), piece.piece.len());
            for s in &sectors {
                for (idx, _, c) in s.piece.modes() {
                    prop_assert_eq!(c, f.coefficient_at(idx));
                }
            }
        }
    }

    #[test]
    fn fit_is_scale_invariant(slope in -2.0f64..2.0, scale in 1e-3f64..1e3, noise in proptest::collection::vec(-0.1f64..0.1, 5)) {
        let series: Vec<_> = (0..5)
            .map(|k| 2f64.powi(k + 3))
            .zip(&noise)
            .map(|(a, e)| (a, a.powf(slope) * e.exp()))
            .collect();
        let scaled: Vec<_> = series.iter().map(|&(a, v)| (a, scale * v)).collect();
        let (u, v) = (fit_exponent(&series).unwrap(), fit_exponent(&scaled).unwrap());
        prop_assert!((u.slope - v.slope).abs() <= 1e-12);
        prop_assert!((u.residual - v.residual).abs() <= 1e-12);
    }

    #[test]
    fn records_round_trip(
        series in proptest::collection::vec((1e-6f64..1e6, -1e9f64..1e9), 1..12),
        metric in proptest::num::f64::NORMAL,
        pass in any::<bool>(),
        seed in 0u64..u64::MAX,
    ) {
        let params = BTreeMap::from([("seed".to_string(), seed.to_string())]);
        let metrics = BTreeMap::from([("value".to_string(), metric)]);
        let rec = ExperimentRecord::new(ExperimentKind::Rate, "elliptic", params, series, metrics, pass).unwrap();
        prop_assert_eq!(ExperimentRecord::parse(&rec.to_text()).unwrap(), rec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn maximal_field_grows_under_refinement(seed in 0u64..1000, p in symbol(), count in 2usize..12, factor in 2usize..4) {
        let f = datum(seed, 24);
        let ball = BallQuadrature::unit(2, 0.25).unwrap();
        let tg = TimeGrid::uniform(0.0, 1.0, count).unwrap();
        let coarse = maximal_field(&f, &p, &ball, &tg, EvalPath::Direct).unwrap();
        let fine = maximal_field(&f, &p, &ball, &tg.refined(factor), EvalPath::Direct).unwrap();
        for (a, b) in coarse.values().iter().zip(fine.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn perturbation_bound_holds(seed in 0u64..1000, t in 0.0f64..1.0, beam in any::<bool>()) {
        let f = datum(seed, 48);
        let q = if beam { Symbol::Beam } else { Symbol::Boussinesq };
        let ball = BallQuadrature::unit(2, 0.2).unwrap();
        let b = perturbation_bound(&f, &q, &Symbol::Elliptic, t, &ball).unwrap();
        prop_assert!(b.holds(), "{b:?}");
    }

    #[test]
    fn gap_is_symmetric(lo in 0.0f64..4.0, width in 0.1f64..8.0, p in symbol(), q in symbol()) {
        let scan = BandScan { radial_steps: 64, angular_samples: 64, ..BandScan::default() };
        let a = perturbation_gap(&p, &q, (lo, lo + width), &scan, None).unwrap();
        let b = perturbation_gap(&q, &p, (lo, lo + width), &scan, None).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn witness_time_is_positive(r in 64.0f64..4096.0, m in 1.05f64..1.95, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let d = PmDatum::new(r, m).unwrap();
        let x = [
            WITNESS_X1.0 + u * (WITNESS_X1.1 - WITNESS_X1.0),
            WITNESS_X2.0 + v * (WITNESS_X2.1 - WITNESS_X2.0),
        ];
        let t = d.witness_time(&x);
        prop_assert!(t > 0.0 && t <= 1e-3 / r + 1.0 / (r * r));
    }

    #[test]
    fn bourgain_strip_count(r in 64.0f64..5000.0) {
        let d = BourgainDatum::new(r).unwrap();
        let n = d.strips().boxes().len();
        prop_assert_eq!(n, r.cbrt().ceil() as usize);
        prop_assert!((d.area() - n as f64 * 2.0 * r.sqrt()).abs() <= 1e-9 * d.area());
    }
}
