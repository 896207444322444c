//! Ambient (non-serving) harvested power in the sub-6 tier and the mmWave
//! ambient density condition.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use crate::error::{domain, Error, Result};
use crate::mcsim::{self, MCEstimate};
use crate::netmodel::{BlockageModel, NetworkConfig, SectoredPattern};
use crate::numerics::exp_integral_en;

/// Mean and variance of `Ξ = Σ_k g_k β max(r_o, |X_k|)^{-α}` over the
/// non-serving BSs, per unit `η P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Closed-form moments for intercept `beta`, exponent `alpha`, BS density
/// `density` and reference distance `r_ref`.
///
/// The variance is the conditional-on-serving-distance variance averaged
/// over the serving distance; it leaves out the spread of the conditional
/// mean.
pub fn ambient_moments(beta: f64, alpha: f64, density: f64, r_ref: f64) -> Result<AmbientMoments> {
    if !(alpha > 2.0) {
        return domain(format!("ambient mean diverges for alpha <= 2 (got {alpha})"));
    }
    if !(beta >= 0.0) || !(density >= 0.0) || !(r_ref > 0.0) {
        return domain("ambient moments need beta >= 0, density >= 0, r_ref > 0");
    }
    if beta == 0.0 || density == 0.0 {
        return Ok(AmbientMoments {
            mean: 0.0,
            variance: 0.0,
        });
    }
    let a = PI * density * r_ref * r_ref;
    // ∫₀^{r_o} t (1 - e^{-πλt²}) dt
    let inner = 0.5 * (r_ref * r_ref + (-a).exp_m1() / (PI * density));
    let e_half = exp_integral_en(alpha / 2.0, a)?.value;
    let e_full = exp_integral_en(alpha, a)?.value;
    let mean = beta
        * 2.0
        * PI
        * density
        * (r_ref.powf(-alpha) * inner + r_ref.powf(2.0 - alpha) / (alpha - 2.0)
            - 0.5 * r_ref.powf(2.0 - alpha) * e_half);
    let variance = beta
        * beta
        * 4.0
        * PI
        * density
        * (r_ref.powf(-2.0 * alpha) * inner
            + r_ref.powf(2.0 - 2.0 * alpha) / (2.0 * alpha - 2.0)
            - 0.5 * r_ref.powf(2.0 - 2.0 * alpha) * e_full);
    Ok(AmbientMoments { mean, variance })
}

pub fn ambient_moments_sub6(cfg: &NetworkConfig) -> Result<AmbientMoments> {
    cfg.validate()?;
    let p = &cfg.sub6.pathloss;
    ambient_moments(p.beta, p.alpha, cfg.sub6.bs_density, p.r_ref)
}

/// Chebyshev upper bound on `Pr(η P Ξ > P_th)`.
pub fn ambient_coverage_bound_sub6(cfg: &NetworkConfig, p_th: f64) -> Result<f64> {
    if !(p_th > 0.0) {
        return domain(format!("power threshold must be > 0 (got {p_th})"));
    }
    let m = ambient_moments_sub6(cfg)?;
    let x = p_th / (cfg.sub6.efficiency * cfg.sub6.power);
    if x <= m.mean {
        return Ok(1.0);
    }
    Ok((m.variance / (x - m.mean).powi(2)).min(1.0))
}

/// Quantile `ϑ` with `Pr(Σ G Δ(|Y|) > ϑ) = ε` for the unit-density LoS
/// ambient sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarthetaEstimate {
    pub value: f64,
    /// Order-statistic 99% interval for the quantile.
    pub ci99: (f64, f64),
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct VarthetaKey {
    blockage: (u8, u64),
    patterns: [u64; 6],
    epsilon: u64,
    alpha: u64,
    beta: u64,
    r_ref: u64,
}

impl VarthetaKey {
    fn new(cfg: &NetworkConfig, epsilon: f64) -> Self {
        let m = &cfg.mmwave;
        let blockage = match m.blockage {
            BlockageModel::ExponentialLoS { rho } => (0, rho.to_bits()),
            BlockageModel::LoSBall { r_los } => (1, r_los.to_bits()),
        };
        let bits = |p: &SectoredPattern| {
            [
                p.main_gain.to_bits(),
                p.side_gain.to_bits(),
                p.beamwidth.to_bits(),
            ]
        };
        let (b, u) = (bits(&m.bs_pattern), bits(&m.ue_pattern));
        Self {
            blockage,
            patterns: [b[0], b[1], b[2], u[0], u[1], u[2]],
            epsilon: epsilon.to_bits(),
            alpha: m.los.alpha.to_bits(),
            beta: m.los.beta.to_bits(),
            r_ref: m.los.r_ref.to_bits(),
        }
    }
}

fn vartheta_cache() -> &'static RwLock<HashMap<VarthetaKey, VarthetaEstimate>> {
    static CACHE: OnceLock<RwLock<HashMap<VarthetaKey, VarthetaEstimate>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Monte Carlo `(1-ε)`-quantile of the unit-density LoS ambient sum.
///
/// Results are cached per (blockage, patterns, ε, LoS pathloss); a cached
/// entry is returned regardless of the requested seed and carries the seed
/// it was computed with.
pub fn estimate_vartheta_mm(
    cfg: &NetworkConfig,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<VarthetaEstimate> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return domain(format!("epsilon must lie in (0, 1] (got {epsilon})"));
    }
    if trials < 10_000 {
        return Err(Error::InsufficientTrials(format!(
            "quantile estimate needs >= 10000 trials (got {trials})"
        )));
    }
    cfg.validate()?;
    if epsilon == 1.0 {
        return Ok(VarthetaEstimate {
            value: 0.0,
            ci99: (0.0, 0.0),
            trials,
            seed,
        });
    }
    let key = VarthetaKey::new(cfg, epsilon);
    if let Some(hit) = vartheta_cache().read().expect("cache lock").get(&key) {
        return Ok(*hit);
    }
    let est = vartheta_uncached(cfg, epsilon, trials, seed)?;
    vartheta_cache()
        .write()
        .expect("cache lock")
        .insert(key, est);
    Ok(est)
}

/// Same as [`estimate_vartheta_mm`] but always simulates.
pub fn vartheta_uncached(
    cfg: &NetworkConfig,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<VarthetaEstimate> {
    let mut samples = mcsim::unit_los_ambient_samples(&cfg.mmwave, trials, seed);
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let q = 1.0 - epsilon;
    let pick = |p: f64| samples[((p * n).floor() as usize).min(samples.len() - 1)];
    let half = MCEstimate::Z99 * (q * (1.0 - q) / n).sqrt();
    let value = pick(q);
    let ci99 = (pick((q - half).max(0.0)), pick((q + half).min(1.0)));
    if value > 0.0 && (ci99.1 - ci99.0) / value > 0.1 {
        return Err(Error::InsufficientTrials(format!(
            "quantile interval [{:e}, {:e}] spans more than 10% of {value:e}",
            ci99.0, ci99.1
        )));
    }
    Ok(VarthetaEstimate {
        value,
        ci99,
        trials,
        seed,
    })
}

/// mmWave density at which the ambient LoS power reaches `p_th` with
/// probability `ε` (the `ε` encoded in `vartheta`).
pub fn required_mm_density_ambient(cfg: &NetworkConfig, p_th: f64, vartheta: f64) -> Result<f64> {
    if !(p_th > 0.0) || !(vartheta > 0.0) {
        return domain("threshold and quantile constant must be > 0");
    }
    cfg.validate()?;
    let m = &cfg.mmwave;
    Ok((p_th / (vartheta * m.efficiency * m.power)).powf(2.0 / m.los.alpha))
}

/// mmWave density whose ambient coverage matches the sub-6 Chebyshev bound
/// at `p_th`. `None` when the bound is 1 and any density qualifies.
pub fn mm_density_for_ambient_dominance(
    cfg: &NetworkConfig,
    p_th: f64,
    trials: usize,
    seed: u64,
) -> Result<Option<f64>> {
    let eps = ambient_coverage_bound_sub6(cfg, p_th)?;
    if eps >= 1.0 {
        return Ok(None);
    }
    let vartheta = estimate_vartheta_mm(cfg, eps, trials, seed)?;
    required_mm_density_ambient(cfg, p_th, vartheta.value).map(Some)
}
