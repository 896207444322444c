//! Energy-harvesting coverage, density conditions and WPT mode selection.

mod ambient;
mod association;
mod directed;

pub use ambient::{
    ambient_coverage_bound_sub6, ambient_moments, ambient_moments_sub6, estimate_vartheta_mm,
    mm_density_for_ambient_dominance, required_mm_density_ambient, vartheta_uncached,
    AmbientMoments, VarthetaEstimate,
};
pub use association::{
    association_general, association_probabilities, nlos_association_direct, AssociationProbs,
};
pub use directed::{
    directed_coverage_mm, directed_coverage_mm_los_ball, directed_coverage_sub6,
    directed_coverage_sub6_large_n, required_sub6_density, sub6_density_for_mm_dominance,
    sub6_density_for_mm_dominance_los_ball, DensityBound,
};

use crate::error::Result;
use crate::numerics::SpecialValue;

/// Coverage probabilities over a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    pub thresholds: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub quadrature_error: Vec<f64>,
}

impl CoverageCurve {
    pub fn evaluate<F>(thresholds: &[f64], mut coverage: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<SpecialValue>,
    {
        let mut probabilities = Vec::with_capacity(thresholds.len());
        let mut quadrature_error = Vec::with_capacity(thresholds.len());
        for &p in thresholds {
            let v = coverage(p)?;
            probabilities.push(v.value.clamp(0.0, 1.0));
            quadrature_error.push(v.est_error);
        }
        Ok(Self {
            thresholds: thresholds.to_vec(),
            probabilities,
            quadrature_error,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{dbm_to_watts, BlockageModel, NetworkConfig};
    use proptest::prelude::*;

    fn grid() -> Vec<f64> {
        (0..20).map(|i| dbm_to_watts(-40.0 + 2.0 * i as f64)).collect()
    }

    #[test]
    fn sub6_limits() {
        let cfg = NetworkConfig::default();
        assert!((directed_coverage_sub6(&cfg, 1e-30).unwrap().value - 1.0).abs() < 1e-10);
        let mut z = cfg;
        z.sub6.bs_density = 0.0;
        assert_eq!(directed_coverage_sub6(&z, 1e-4).unwrap().value, 0.0);
        assert_eq!(directed_coverage_sub6_large_n(&z, 1e-4).unwrap(), 0.0);
        let s = &cfg.sub6;
        let unit = s.efficiency * s.power * s.pathloss.beta * s.antennas as f64;
        let want = 1.0 - (-std::f64::consts::PI * s.bs_density).exp();
        assert!((directed_coverage_sub6_large_n(&cfg, unit).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn sub6_curve_is_monotone_and_bounded() {
        let cfg = NetworkConfig::default();
        let c = CoverageCurve::evaluate(&grid(), |p| directed_coverage_sub6(&cfg, p)).unwrap();
        for w in c.probabilities.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn sub6_mapping_invariance() {
        let cfg = NetworkConfig::default();
        let mut unit = cfg;
        unit.sub6.bs_density = 1.0;
        let a = cfg.sub6.pathloss.alpha;
        for p in grid() {
            let x = directed_coverage_sub6(&cfg, p).unwrap().value;
            let y = directed_coverage_sub6(&unit, p * cfg.sub6.bs_density.powf(-a / 2.0))
                .unwrap()
                .value;
            assert!((x - y).abs() < 1e-8, "{p}: {x} vs {y}");
        }
    }

    #[test]
    fn large_array_form_is_close_for_many_antennas() {
        let mut cfg = NetworkConfig::default();
        cfg.sub6.antennas = 256;
        for p in grid() {
            let exact = directed_coverage_sub6(&cfg, p).unwrap().value;
            let approx = directed_coverage_sub6_large_n(&cfg, p).unwrap();
            assert!((exact - approx).abs() < 0.01, "{p}: {exact} vs {approx}");
        }
    }

    #[test]
    fn density_round_trip() {
        let cfg = NetworkConfig::default();
        for eps in [1e-6, 0.1, 0.5, 0.9, 0.999] {
            let lam = required_sub6_density(&cfg, 1e-4, eps).unwrap();
            let mut c = cfg;
            c.sub6.bs_density = lam;
            let got = directed_coverage_sub6_large_n(&c, 1e-4).unwrap();
            assert!((got - eps).abs() < 1e-12, "{eps}: {got}");
        }
        assert!(required_sub6_density(&cfg, 1e-4, 1e-12).unwrap() < 1e-12);
        assert!(required_sub6_density(&cfg, 1e-4, 1.0).is_err());
        assert!(required_sub6_density(&cfg, 1e-4, 0.0).is_err());
    }

    #[test]
    fn mm_small_threshold_partitions() {
        let cfg = NetworkConfig::default();
        let v = directed_coverage_mm(&cfg, 1e-20).unwrap().value;
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn mm_los_ball_matches_closed_form() {
        let mut cfg = NetworkConfig::default();
        cfg.mmwave.blockage = BlockageModel::LoSBall { r_los: 20.0 };
        for lam in [1e-3, 0.01, 0.1] {
            cfg.mmwave.bs_density = lam;
            for p in grid() {
                let q = directed_coverage_mm(&cfg, p).unwrap().value;
                let c = directed_coverage_mm_los_ball(&cfg, p).unwrap();
                assert!((q - c).abs() < 1e-6, "{lam} {p}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn mm_dominance_round_trip() {
        let cfg = NetworkConfig::default();
        for p in [1e-6, 1e-5, 1e-4] {
            let psi = directed_coverage_mm(&cfg, p).unwrap().value;
            let bound = sub6_density_for_mm_dominance(&cfg, p).unwrap();
            assert!(!bound.unbounded);
            let mut c = cfg;
            c.sub6.bs_density = bound.value;
            let got = directed_coverage_sub6_large_n(&c, p).unwrap();
            assert!((got - psi).abs() < 1e-9);
        }
        let b = sub6_density_for_mm_dominance(&cfg, 1e-30).unwrap();
        assert!(b.unbounded && b.value.is_infinite());
    }

    #[test]
    fn mm_dominance_los_ball_form() {
        let mut cfg = NetworkConfig::default();
        cfg.mmwave.blockage = BlockageModel::LoSBall { r_los: 20.0 };
        let p = 1e-5;
        let general = sub6_density_for_mm_dominance(&cfg, p).unwrap().value;
        let closed = sub6_density_for_mm_dominance_los_ball(&cfg, p).unwrap();
        assert!((general - closed).abs() < 1e-6 * closed);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn sub6_coverage_grows_with_resources(
            lam in 1e-4f64..0.05, n in 1u32..64, dbm in -40.0f64..0.0,
        ) {
            let mut cfg = NetworkConfig::default();
            cfg.sub6.bs_density = lam;
            cfg.sub6.antennas = n;
            let p = dbm_to_watts(dbm);
            let base = directed_coverage_sub6(&cfg, p).unwrap().value;
            prop_assert!((0.0..=1.0).contains(&base));
            let mut more = cfg;
            more.sub6.bs_density *= 1.5;
            prop_assert!(directed_coverage_sub6(&more, p).unwrap().value >= base - 1e-9);
            let mut more = cfg;
            more.sub6.antennas += 1;
            prop_assert!(directed_coverage_sub6(&more, p).unwrap().value >= base - 1e-9);
            let mut more = cfg;
            more.sub6.power *= 1.5;
            prop_assert!(directed_coverage_sub6(&more, p).unwrap().value >= base - 1e-9);
            let mut more = cfg;
            more.sub6.efficiency = (more.sub6.efficiency * 1.3).min(1.0);
            prop_assert!(directed_coverage_sub6(&more, p).unwrap().value >= base - 1e-9);
        }

        #[test]
        fn mm_coverage_in_unit_interval_and_monotone(dbm in -50.0f64..0.0) {
            let cfg = NetworkConfig::default();
            let p = dbm_to_watts(dbm);
            let a = directed_coverage_mm(&cfg, p).unwrap().value;
            let b = directed_coverage_mm(&cfg, p * 1.2).unwrap().value;
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b <= a + 1e-9);
        }
    }
}
