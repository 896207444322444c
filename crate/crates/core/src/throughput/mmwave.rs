//! mmWave uplink over the LoS ball.
//!
//! Distances are physical. With `s = t ħ β²` the received signal is
//! `s M_B M_D r^{-2α}` and an interferer at `y` whose own serving distance
//! is `z` contributes `s G (z y)^{-α}`. UEs served beyond `R_LoS` harvest
//! nothing and stay silent.

use std::f64::consts::{LN_2, PI};

use super::hamdi::{exp_weighted_finite, rate_integral, truncation_range, LaplaceCache};
use super::{Method, ThroughputResult};
use crate::error::{domain, Error, Result};
use crate::netmodel::NetworkConfig;
use crate::numerics::{exp_integral_en, integrate, QuadratureSpec};

pub(crate) struct MmModel {
    lam: f64,
    lam_ue: f64,
    alpha: f64,
    ro: f64,
    r_los: f64,
    gain: f64,
    states: [(f64, f64); 4],
    /// `σ² / (ħ β²)`.
    noise: f64,
    rate_scale: f64,
}

impl MmModel {
    pub(crate) fn new(cfg: &NetworkConfig) -> Result<Self> {
        let d = cfg.derived()?;
        let m = &cfg.mmwave;
        let Some(r_los) = m.blockage.los_ball_radius() else {
            return Err(Error::Validation(
                "mmWave throughput is modelled under LoS-ball blockage only".into(),
            ));
        };
        let ro = m.los.r_ref;
        if !(ro < r_los) {
            return domain("mmWave throughput needs r_o < R_LoS");
        }
        if m.bs_density == 0.0 {
            return domain("mmWave throughput needs a positive BS density");
        }
        let beta = m.los.beta;
        Ok(Self {
            lam: m.bs_density,
            lam_ue: m.ue_density,
            alpha: m.los.alpha,
            ro,
            r_los,
            gain: m.max_gain(),
            states: m.gain_states(),
            noise: d.noise_mm / (d.hbar_mm * beta * beta),
            rate_scale: (1.0 - cfg.harvest_fraction) * m.bandwidth,
        })
    }

    /// Serving-distance variable `v = πλ(r² - r_o²)`, density `e^{-v}`.
    fn radius(&self, v: f64) -> f64 {
        (self.ro * self.ro + v / (PI * self.lam)).sqrt()
    }

    fn v_max(&self) -> f64 {
        PI * self.lam * (self.r_los * self.r_los - self.ro * self.ro)
    }

    fn v_at(&self, r: f64) -> f64 {
        PI * self.lam * (r * r - self.ro * self.ro)
    }

    /// `E[(1 - e^{-c z^{-p}}) 1(z ≤ R)]` over the serving-distance law.
    fn served_expm1(&self, c: f64, p: f64) -> Result<f64> {
        let z_star = c.powf(1.0 / p);
        let spec = QuadratureSpec::default();
        Ok(exp_weighted_finite(
            |v| -(-c * self.radius(v).powf(-p)).exp_m1(),
            self.v_max(),
            self.v_at(z_star),
            &spec,
        )?
        .value)
    }

    fn phi(&self, s: f64) -> Result<f64> {
        self.served_expm1(s * self.gain, 2.0 * self.alpha)
    }

    /// `-ln Ĩ(s) = 2πλ̃ ∫_{r_o}^R (1 - φ(y)) y dy`.
    fn neg_log_laplace(&self, s: f64) -> Result<f64> {
        if self.lam_ue == 0.0 {
            return Ok(0.0);
        }
        let spec = QuadratureSpec::default();
        let g = |y: f64| {
            let mut acc = 0.0;
            for &(gk, pk) in &self.states {
                if pk > 0.0 {
                    acc += pk * self.served_expm1(s * gk * y.powf(-self.alpha), self.alpha).unwrap_or(f64::NAN);
                }
            }
            acc * y
        };
        Ok(2.0 * PI * self.lam_ue * integrate(g, self.ro, self.r_los, &spec)?.value)
    }
}

pub fn mm_interference_cache(cfg: &NetworkConfig) -> Result<LaplaceCache> {
    let m = MmModel::new(cfg)?;
    let phi = |s: f64| m.phi(s);
    let (lo, hi) = truncation_range(&phi, m.noise)?;
    LaplaceCache::build(lo, hi, |s| m.neg_log_laplace(s))
}

pub fn throughput_mm_exact(cfg: &NetworkConfig) -> Result<ThroughputResult> {
    let m = MmModel::new(cfg)?;
    let phi = |s: f64| m.phi(s);
    let range = truncation_range(&phi, m.noise)?;
    let cache = LaplaceCache::build(range.0, range.1, |s| m.neg_log_laplace(s))?;
    let r = rate_integral(&phi, m.noise, Some(&cache), range)?;
    let k = m.rate_scale / LN_2;
    Ok(ThroughputResult::new(k * r.value, Method::Exact, k * r.est_error))
}

/// SNR-only rate, averaged over the serving distance with silent UEs
/// beyond `R_LoS`.
pub fn throughput_mm_noise_limited(cfg: &NetworkConfig) -> Result<ThroughputResult> {
    let m = MmModel::new(cfg)?;
    let snr = |v: f64| m.gain * m.radius(v).powf(-2.0 * m.alpha) / m.noise;
    let v_star = m.v_at((m.gain / m.noise).powf(0.5 / m.alpha));
    let r = exp_weighted_finite(|v| snr(v).ln_1p(), m.v_max(), v_star, &QuadratureSpec::default())?;
    let k = m.rate_scale / LN_2;
    Ok(ThroughputResult::new(k * r.value, Method::NoiseLimited, k * r.est_error))
}

/// Terms of the Jensen lower bound on the noise-limited rate:
/// `φ̃ = E[ln S | r_o ≤ r ≤ R]`, `a₁ = πλ r_o²`, `b₁ = πλ R²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmThroughputTerms {
    pub phi_tilde: f64,
    pub a1: f64,
    pub b1: f64,
}

impl MmThroughputTerms {
    /// Probability that the served UE is within the LoS ball.
    pub fn served_fraction(&self) -> f64 {
        -(self.a1 - self.b1).exp_m1()
    }
}

pub fn mm_lower_terms(cfg: &NetworkConfig) -> Result<MmThroughputTerms> {
    let d = cfg.derived()?;
    let m = MmModel::new(cfg)?;
    let beta = cfg.mmwave.los.beta;
    let a1 = PI * m.lam * m.ro * m.ro;
    let b1 = PI * m.lam * m.r_los * m.r_los;
    // E[ln v | a₁ ≤ v ≤ b₁] under e^{-v}, with ∫ e^{-v}/v = E₁.
    let ea = (-a1).exp();
    let eb = (-b1).exp();
    let e1 = |x: f64| exp_integral_en(1.0, x).map(|v| v.value);
    let log_v = (ea * a1.ln() - eb * b1.ln() + e1(a1)? - e1(b1)?) / (ea - eb);
    let log_r = 0.5 * (log_v - (PI * m.lam).ln());
    let phi_tilde = (d.hbar_mm * m.gain * beta * beta).ln() - 2.0 * m.alpha * log_r;
    Ok(MmThroughputTerms { phi_tilde, a1, b1 })
}

/// `(1-τ) BW p log2(1 + e^{φ̃}/σ²)` with `p` the served fraction.
pub fn throughput_mm_lower(cfg: &NetworkConfig) -> Result<ThroughputResult> {
    let t = mm_lower_terms(cfg)?;
    let d = cfg.derived()?;
    let m = &cfg.mmwave;
    let snr_log = t.phi_tilde - d.noise_mm.ln();
    // log(1 + e^x) without overflow.
    let nats = if snr_log > 30.0 {
        snr_log + (-snr_log).exp().ln_1p()
    } else {
        snr_log.exp().ln_1p()
    };
    let rate = (1.0 - cfg.harvest_fraction) * m.bandwidth * t.served_fraction() * nats / LN_2;
    Ok(ThroughputResult::new(rate, Method::LowerBound, 0.0))
}
