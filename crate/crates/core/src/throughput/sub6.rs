//! Sub-6 uplink with MRC at the BS.
//!
//! Everything is written in the unit-density coordinates of the BS process
//! (serving distance `r`) and of the interfering-UE process (distance `w`),
//! normalised by the common power scale `ħ β² λ̃^{α/2}`:
//! `SINR = N κ^{α/2} r^{-2α} / (Σ g_j (r_j w_j)^{-α} + n')`.

use std::f64::consts::{LN_2, PI};

use super::hamdi::{exp_weighted, rate_integral, truncation_range, LaplaceCache};
use super::{Method, ThroughputResult};
use crate::error::{domain, Result};
use crate::netmodel::NetworkConfig;
use crate::numerics::{exp_integral_ei, exp_integral_en, integrate, QuadratureSpec};

pub(crate) struct Sub6Model {
    /// `N κ^{α/2}`.
    signal: f64,
    alpha: f64,
    ro: f64,
    noise: f64,
    pub(crate) rate_scale: f64,
}

impl Sub6Model {
    pub(crate) fn new(cfg: &NetworkConfig) -> Result<Self> {
        let d = cfg.derived()?;
        let s = &cfg.sub6;
        let alpha = s.pathloss.alpha;
        if !(alpha > 2.0) {
            return domain(format!("sub-6 throughput needs alpha > 2 (got {alpha})"));
        }
        if s.bs_density == 0.0 || s.ue_density == 0.0 {
            return domain("sub-6 throughput needs positive BS and UE densities");
        }
        let beta = s.pathloss.beta;
        Ok(Self {
            signal: s.antennas as f64 * d.kappa_sub6.powf(alpha / 2.0),
            alpha,
            ro: s.pathloss.r_ref,
            noise: s.ue_density.powf(-alpha / 2.0) * d.noise_sub6 / (d.hbar_sub6 * beta * beta),
            rate_scale: (1.0 - cfg.harvest_fraction) * s.bandwidth,
        })
    }

    /// Serving distance at `v = π(r² - r_o²)`, where the restricted
    /// nearest-BS law becomes `e^{-v}`.
    fn radius(&self, v: f64) -> f64 {
        (self.ro * self.ro + v / PI).sqrt()
    }

    /// `1 - E[e^{-tS}]`.
    fn phi(&self, t: f64) -> Result<f64> {
        let k = t * self.signal;
        let r_star = k.powf(0.5 / self.alpha);
        let v_star = PI * (r_star * r_star - self.ro * self.ro);
        let spec = QuadratureSpec::default();
        Ok(exp_weighted(|v| -(-k * self.radius(v).powf(-2.0 * self.alpha)).exp_m1(), v_star, &spec)?.value)
    }

    /// `-ln Ĩ(t) = 2π E_y[F(t y^{-α})]` with
    /// `F(c) = ∫_{r_o}^∞ x / (1 + x^α / c) dx`.
    fn neg_log_laplace(&self, t: f64) -> Result<f64> {
        let a = self.alpha;
        let delta = 2.0 / a;
        let spec = QuadratureSpec::default();
        let big_f = |c: f64| -> f64 {
            // x^α = c e^v turns F into c^δ/α ∫_L^∞ e^{δv}/(1+e^v) dv.
            let lower = (self.ro.powf(a) / c).ln();
            let g = |v: f64| {
                if v > 0.0 {
                    ((delta - 1.0) * v).exp() / (1.0 + (-v).exp())
                } else {
                    (delta * v).exp() / (1.0 + v.exp())
                }
            };
            let j = integrate(g, lower, f64::INFINITY, &spec).map_or(f64::NAN, |r| r.value);
            c.powf(delta) / a * j
        };
        let y_star = (t / self.ro.powf(a)).powf(1.0 / a);
        let v_star = PI * (y_star * y_star - self.ro * self.ro);
        let e = exp_weighted(|v| big_f(t * self.radius(v).powf(-a)), v_star, &spec)?;
        Ok(2.0 * PI * e.value)
    }
}

/// `Ĩ(t)` tabulated over the truncation range of the rate integral.
pub fn sub6_interference_cache(cfg: &NetworkConfig) -> Result<LaplaceCache> {
    let m = Sub6Model::new(cfg)?;
    let phi = |t: f64| m.phi(t);
    let (lo, hi) = truncation_range(&phi, m.noise)?;
    LaplaceCache::build(lo, hi, |t| m.neg_log_laplace(t))
}

pub fn throughput_sub6_exact(cfg: &NetworkConfig) -> Result<ThroughputResult> {
    let m = Sub6Model::new(cfg)?;
    let phi = |t: f64| m.phi(t);
    let range = truncation_range(&phi, m.noise)?;
    let cache = LaplaceCache::build(range.0, range.1, |t| m.neg_log_laplace(t))?;
    let r = rate_integral(&phi, m.noise, Some(&cache), range)?;
    let k = m.rate_scale / LN_2;
    Ok(ThroughputResult::new(k * r.value, Method::Exact, k * r.est_error))
}

/// Pieces of the closed-form lower bound: `E[ln r^{-2α}]` of the serving
/// link and the mean interference `E[I']`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sub6LowerTerms {
    pub log_path_mean: f64,
    pub interference_mean: f64,
}

pub(crate) fn sub6_lower_terms(alpha: f64, ro: f64) -> Result<Sub6LowerTerms> {
    if !(alpha > 2.0) || !(ro > 0.0) {
        return domain("sub-6 lower bound needs alpha > 2 and r_o > 0");
    }
    let a = PI * ro * ro;
    let zeta_o = exp_integral_ei(-a)?.value - 2.0 * (-a).exp() * ro.ln();
    let zeta_1 = ro.powf(2.0 - alpha) / (alpha - 2.0);
    let interference_mean =
        2.0 * PI * PI * zeta_1 * a.exp() * ro.powf(2.0 - alpha) * exp_integral_en(alpha / 2.0, a)?.value;
    Ok(Sub6LowerTerms {
        log_path_mean: alpha * a.exp() * zeta_o,
        interference_mean,
    })
}

/// Jensen bound `log2(1 + e^{E ln S}/E[I])`, interference limited.
pub fn throughput_sub6_lower(cfg: &NetworkConfig) -> Result<ThroughputResult> {
    let d = cfg.derived()?;
    let s = &cfg.sub6;
    let t = sub6_lower_terms(s.pathloss.alpha, s.pathloss.r_ref)?;
    let sir = d.kappa_sub6.powf(s.pathloss.alpha / 2.0) * s.antennas as f64 * t.log_path_mean.exp()
        / t.interference_mean;
    let rate = (1.0 - cfg.harvest_fraction) * s.bandwidth * sir.ln_1p() / LN_2;
    Ok(ThroughputResult::new(rate, Method::LowerBound, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fig4(kappa: f64, n: u32) -> NetworkConfig {
        let mut c = NetworkConfig::default();
        c.sub6.ue_density = 0.001;
        c.sub6.bs_density = kappa * 0.001;
        c.sub6.antennas = n;
        c.sub6.pathloss.alpha = 2.6;
        c.sub6.pathloss.beta = crate::netmodel::freq_constant_beta(1e9).unwrap();
        c
    }

    #[test]
    fn laplace_is_a_valid_transform() {
        let c = sub6_interference_cache(&fig4(10.0, 8)).unwrap();
        let v = &c.interference_laplace;
        assert!(v.iter().all(|&x| x > 0.0 && x <= 1.0));
        assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(c.eval(1e-40) > 1.0 - 1e-12);
    }

    #[test]
    fn laplace_small_t_slope_is_mean_interference() {
        // -ln Ĩ(t) ≈ t E[I'] as t → 0.
        let cfg = fig4(10.0, 8);
        let m = Sub6Model::new(&cfg).unwrap();
        let terms = sub6_lower_terms(2.6, 1.0).unwrap();
        let t = 1e-7;
        let got = m.neg_log_laplace(t).unwrap() / t;
        assert!((got - terms.interference_mean).abs() < 1e-4 * terms.interference_mean);
    }

    #[test]
    fn lower_bound_scaling() {
        let cfg = fig4(1e4, 8);
        let w = (1.0 - cfg.harvest_fraction) * cfg.sub6.bandwidth;
        let a = throughput_sub6_lower(&cfg).unwrap().bits_per_second;
        let b = throughput_sub6_lower(&fig4(1e4, 16)).unwrap().bits_per_second;
        assert!(((b - a) - w).abs() < 1e-3 * w);
        let c = throughput_sub6_lower(&fig4(2e4, 8)).unwrap().bits_per_second;
        assert!(((c - a) - w * 1.3).abs() < 1e-2 * w * 1.3);
        assert!(throughput_sub6_lower(&fig4(1e-12, 8)).unwrap().bits_per_second < 1e-3);
    }

    #[test]
    fn exact_vanishes_without_uplink_time() {
        let mut cfg = fig4(10.0, 8);
        cfg.harvest_fraction = 1.0 - 1e-12;
        let r = throughput_sub6_exact(&cfg).unwrap().bits_per_second;
        assert!(r < 1e-3 * cfg.sub6.bandwidth, "{r}");
    }
}
