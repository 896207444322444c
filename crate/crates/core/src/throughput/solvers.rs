//! Densification thresholds for a target uplink rate.

use std::f64::consts::LN_2;

use super::mmwave::{throughput_mm_exact, throughput_mm_lower};
use super::sub6::{sub6_lower_terms, throughput_sub6_exact};
use crate::error::{domain, Error, Result};
use crate::netmodel::NetworkConfig;
use crate::numerics::bisect;

const DENSITY_BRACKET: (f64, f64) = (1e-8, 10.0);
const TIE_TOLERANCE: f64 = 1e-3;

/// BS-to-UE density ratio at which the sub-6 lower bound reaches
/// `c_target`.
pub fn kappa_threshold_sub6(cfg: &NetworkConfig, c_target: f64) -> Result<f64> {
    if !(c_target > 0.0) || !c_target.is_finite() {
        return domain(format!("target rate must be > 0 (got {c_target})"));
    }
    cfg.validate()?;
    let s = &cfg.sub6;
    let alpha = s.pathloss.alpha;
    let t = sub6_lower_terms(alpha, s.pathloss.r_ref)?;
    let bits = c_target / ((1.0 - cfg.harvest_fraction) * s.bandwidth);
    let sir = (bits * LN_2).exp_m1();
    let k_pow = sir * t.interference_mean / (s.antennas as f64 * t.log_path_mean.exp());
    Ok(k_pow.powf(2.0 / alpha))
}

/// Smallest mmWave BS density whose lower-bound rate reaches `c_target`,
/// by bisection on `[1e-8, 10]` BS/m².
pub fn mm_density_threshold(cfg: &NetworkConfig, c_target: f64) -> Result<f64> {
    if !(c_target > 0.0) || !c_target.is_finite() {
        return domain(format!("target rate must be > 0 (got {c_target})"));
    }
    let rate_at = |lam: f64| -> Result<f64> {
        let mut c = *cfg;
        c.mmwave.bs_density = lam;
        Ok(throughput_mm_lower(&c)?.bits_per_second)
    };
    let (lo, hi) = DENSITY_BRACKET;
    if rate_at(hi)? < c_target {
        return Err(Error::OutOfRange(format!(
            "target {c_target:e} bit/s is not reached below {hi} BS/m²"
        )));
    }
    if rate_at(lo)? >= c_target {
        return Ok(lo);
    }
    bisect(|lam| Ok(rate_at(lam)? - c_target), lo, hi, 1e-10)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Sub6,
    MmWave,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTierVerdict {
    pub sub6_rate: f64,
    pub mm_rate: f64,
    /// Sub-6 density ratio whose lower bound matches the mmWave rate.
    pub sub6_needs_kappa: f64,
    /// mmWave density whose lower bound matches the sub-6 rate; `None`
    /// when out of reach below 10 BS/m².
    pub mm_needs_density: Option<f64>,
    pub winner_at_cfg: Winner,
}

pub fn cross_tier_verdict(cfg: &NetworkConfig) -> Result<CrossTierVerdict> {
    let sub6_rate = throughput_sub6_exact(cfg)?.bits_per_second;
    let mm_rate = throughput_mm_exact(cfg)?.bits_per_second;
    let sub6_needs_kappa = kappa_threshold_sub6(cfg, mm_rate)?;
    let mm_needs_density = match mm_density_threshold(cfg, sub6_rate) {
        Ok(v) => Some(v),
        Err(Error::OutOfRange(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(CrossTierVerdict {
        sub6_rate,
        mm_rate,
        sub6_needs_kappa,
        mm_needs_density,
        winner_at_cfg: winner(sub6_rate, mm_rate),
    })
}

pub(crate) fn winner(sub6: f64, mm: f64) -> Winner {
    if (sub6 - mm).abs() <= TIE_TOLERANCE * sub6.max(mm) {
        Winner::Tie
    } else if mm > sub6 {
        Winner::MmWave
    } else {
        Winner::Sub6
    }
}
