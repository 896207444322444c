//! Uplink rate at the typical BS under harvest-then-transmit.
//!
//! A UE spends the energy harvested from its serving BS, `ħ L(r)`, on the
//! uplink. The served UE's distance and each interferer's own serving
//! distance follow the nearest-BS law restricted to `r ≥ r_o`. Interfering
//! UEs form an independent PPP kept at least `r_o` (in the UE process's own
//! unit-density scale) from the BS.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};

use super::power::draw_gain;
use super::{require_trials, run_trials, MCEstimate, RadialPpp, Tier};
use crate::error::{domain, Error, Result};
use crate::netmodel::NetworkConfig;
use crate::numerics::exp_integral_en;

/// Expected interferers simulated explicitly in the sub-6 tier.
const NEAR_INTERFERERS: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkOptions {
    pub interference: bool,
    /// Draw `‖h_o‖² ~ Gamma(N, 1)` instead of using its hardened value `N`.
    pub serving_fading: bool,
}

impl Default for UplinkOptions {
    fn default() -> Self {
        Self {
            interference: true,
            serving_fading: false,
        }
    }
}

/// Mean uplink throughput in bits/s.
pub fn mc_uplink_throughput(
    cfg: &NetworkConfig,
    tier: Tier,
    trials: usize,
    seed: u64,
    opts: UplinkOptions,
) -> Result<MCEstimate> {
    require_trials(trials, 1000)?;
    let samples = match tier {
        Tier::Sub6 => sub6_samples(cfg, trials, seed, opts)?,
        Tier::MmWave => mm_samples(cfg, trials, seed, opts)?,
    };
    Ok(MCEstimate::from_samples(&samples, seed))
}

/// Sub-6 uplink in the unit-density coordinates of both processes, where
/// the SINR reads `N κ^{α/2} r^{-2α} / (Σ g_j (r_j w_j)^{-α} + n')`.
fn sub6_samples(cfg: &NetworkConfig, trials: usize, seed: u64, opts: UplinkOptions) -> Result<Vec<f64>> {
    let d = cfg.derived()?;
    let s = cfg.sub6;
    let (alpha, beta, ro) = (s.pathloss.alpha, s.pathloss.beta, s.pathloss.r_ref);
    if !(alpha > 2.0) {
        return domain(format!("sub-6 uplink needs alpha > 2 (got {alpha})"));
    }
    if s.bs_density == 0.0 || s.ue_density == 0.0 {
        return domain("sub-6 uplink needs positive BS and UE densities");
    }
    let rate = (1.0 - cfg.harvest_fraction) * s.bandwidth;
    let n = s.antennas as f64;
    let signal_scale = d.kappa_sub6.powf(alpha / 2.0);
    let noise = s.ue_density.powf(-alpha / 2.0) * d.noise_sub6 / (d.hbar_sub6 * beta * beta);

    let a0 = PI * ro * ro;
    let norm = (-a0).exp();
    // Moments of r^{-α} for the restricted serving-distance law.
    let m1 = PI * ro.powf(2.0 - alpha) * exp_integral_en(alpha / 2.0, a0)?.value / norm;
    let m2 = PI * ro.powf(2.0 - 2.0 * alpha) * exp_integral_en(alpha, a0)?.value / norm;
    let w_c = ((a0 + NEAR_INTERFERERS) / PI).sqrt();
    let tail_mean = m1 * 2.0 * PI * w_c.powf(2.0 - alpha) / (alpha - 2.0);
    let tail_var = 2.0 * m2 * 2.0 * PI * w_c.powf(2.0 - 2.0 * alpha) / (2.0 * alpha - 2.0);
    let gamma = Gamma::new(n, 1.0).expect("positive shape");

    let draw_r = |rng: &mut super::TrialRng| {
        let e: f64 = Exp1.sample(rng);
        ((a0 + e) / PI).sqrt()
    };
    Ok(run_trials(seed, trials, |rng| {
        let r = draw_r(rng);
        let h = if opts.serving_fading { gamma.sample(rng) } else { n };
        let signal = h * signal_scale * r.powf(-2.0 * alpha);
        let mut interference = 0.0;
        if opts.interference {
            let mut ppp = RadialPpp::starting_at(1.0, ro);
            loop {
                let w = ppp.next_radius(rng);
                if w > w_c {
                    break;
                }
                let g: f64 = Exp1.sample(rng);
                interference += g * (draw_r(rng) * w).powf(-alpha);
            }
            let z: f64 = StandardNormal.sample(rng);
            interference += (tail_mean + tail_var.sqrt() * z).max(0.0);
        }
        rate * (signal / (interference + noise)).ln_1p() / std::f64::consts::LN_2
    }))
}

/// mmWave uplink over the LoS ball in physical coordinates.
fn mm_samples(cfg: &NetworkConfig, trials: usize, seed: u64, opts: UplinkOptions) -> Result<Vec<f64>> {
    let d = cfg.derived()?;
    let m = cfg.mmwave;
    let Some(r_los) = m.blockage.los_ball_radius() else {
        return Err(Error::Validation(
            "mmWave uplink is modelled under LoS-ball blockage only".into(),
        ));
    };
    let (alpha, beta, ro) = (m.los.alpha, m.los.beta, m.los.r_ref);
    if !(ro < r_los) {
        return domain("mmWave uplink needs r_o < R_LoS");
    }
    if m.bs_density == 0.0 {
        return domain("mmWave uplink needs a positive BS density");
    }
    let rate = (1.0 - cfg.harvest_fraction) * m.bandwidth;
    let hbar = d.hbar_mm;
    let states = m.gain_states();
    let a0 = PI * m.bs_density * ro * ro;
    let annulus = r_los * r_los - ro * ro;
    let count = Poisson::new(m.ue_density * PI * annulus).ok();

    let draw_r = |rng: &mut super::TrialRng| {
        let e: f64 = Exp1.sample(rng);
        ((a0 + e) / (PI * m.bs_density)).sqrt()
    };
    Ok(run_trials(seed, trials, |rng| {
        let r = draw_r(rng);
        if r > r_los {
            return 0.0;
        }
        let signal = hbar * m.max_gain() * beta * beta * r.powf(-2.0 * alpha);
        let mut interference = 0.0;
        if opts.interference {
            if let Some(c) = &count {
                let k = c.sample(rng) as usize;
                for _ in 0..k {
                    let y = (ro * ro + rng.random::<f64>() * annulus).sqrt();
                    let rj = draw_r(rng);
                    let g = draw_gain(&states, rng);
                    if rj <= r_los {
                        interference += hbar * beta * rj.powf(-alpha) * g * beta * y.powf(-alpha);
                    }
                }
            }
        }
        rate * (signal / (interference + d.noise_mm)).ln_1p() / std::f64::consts::LN_2
    }))
}
