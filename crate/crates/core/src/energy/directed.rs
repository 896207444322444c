//! Coverage of the directed (serving-BS) harvested power in both tiers.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::netmodel::NetworkConfig;
use crate::numerics::{
    integrate, integrate_decaying, integrate_panels, upper_incomplete_gamma_reg, QuadratureSpec,
    SpecialValue,
};

/// Decay threshold for truncating the mmWave serving-distance integrals.
const TAIL_CUTOFF: f64 = 1e-14;

fn check_threshold(p_th: f64) -> Result<()> {
    if !(p_th > 0.0) || !p_th.is_finite() {
        return domain(format!("power threshold must be > 0 (got {p_th})"));
    }
    Ok(())
}

/// `Pr(η P ‖h‖² β |X|^{-α} > P_th)` with `‖h‖² ~ Gamma(N, 1)` and `|X|`
/// the nearest-BS distance.
///
/// Integrated in `v = πλ r²`, where the serving distance law becomes
/// `e^{-v}` and the Poisson tail sum is `Q(N, ·)`.
pub fn directed_coverage_sub6(cfg: &NetworkConfig, p_th: f64) -> Result<SpecialValue> {
    check_threshold(p_th)?;
    cfg.validate()?;
    let s = &cfg.sub6;
    if s.bs_density == 0.0 {
        return Ok(SpecialValue::exact(0.0));
    }
    let n = s.antennas as f64;
    let alpha = s.pathloss.alpha;
    let c = p_th / (s.efficiency * s.power * s.pathloss.beta);
    // Q argument is k v^{α/2}.
    let k = c * (PI * s.bs_density).powf(-alpha / 2.0);
    let f = |v: f64| {
        let x = k * v.powf(alpha / 2.0);
        upper_incomplete_gamma_reg(n, x).unwrap_or(0.0) * (-v).exp()
    };
    let spec = QuadratureSpec::default();
    // Q(N, ·) drops from 1 to 0 around v* where k v^{α/2} = N.
    let v_star = (n / k).powf(2.0 / alpha);
    if v_star < 40.0 {
        let mut r = integrate_panels(f, &[0.0, 0.25 * v_star, 4.0 * v_star], &spec)?;
        let tail = integrate(f, 4.0 * v_star, f64::INFINITY, &spec)?;
        r.value += tail.value;
        r.est_error += tail.est_error;
        Ok(r)
    } else {
        integrate(f, 0.0, f64::INFINITY, &spec)
    }
}

/// Large-array form `1 - exp(-πλ (η P β N / P_th)^{2/α})`.
pub fn directed_coverage_sub6_large_n(cfg: &NetworkConfig, p_th: f64) -> Result<f64> {
    check_threshold(p_th)?;
    cfg.validate()?;
    let s = &cfg.sub6;
    let reach = (s.efficiency * s.power * s.pathloss.beta * s.antennas as f64 / p_th)
        .powf(2.0 / s.pathloss.alpha);
    Ok(-(-PI * s.bs_density * reach).exp_m1())
}

/// Sub-6 BS density at which the large-array coverage equals `epsilon`.
pub fn required_sub6_density(cfg: &NetworkConfig, p_th: f64, epsilon: f64) -> Result<f64> {
    check_threshold(p_th)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must lie in (0, 1) (got {epsilon})"));
    }
    cfg.validate()?;
    let s = &cfg.sub6;
    let omega = -(-epsilon).ln_1p() / PI;
    let unit = s.efficiency * s.power * s.pathloss.beta * s.antennas as f64 / p_th;
    Ok(omega * unit.powf(-2.0 / s.pathloss.alpha))
}

/// Distance below which a link with intercept `beta` and exponent `alpha`
/// delivers more than `p_th` of directed mmWave power.
fn reach(cfg: &NetworkConfig, p_th: f64, beta: f64, alpha: f64) -> f64 {
    let m = &cfg.mmwave;
    (m.efficiency * m.power * m.max_gain() * beta / p_th).powf(1.0 / alpha)
}

/// Directed mmWave coverage with min-pathloss association over the LoS and
/// NLoS candidate sets.
pub fn directed_coverage_mm(cfg: &NetworkConfig, p_th: f64) -> Result<SpecialValue> {
    check_threshold(p_th)?;
    cfg.validate()?;
    let m = &cfg.mmwave;
    let lam = m.bs_density;
    if lam == 0.0 {
        return Ok(SpecialValue::exact(0.0));
    }
    let b = m.blockage;
    let (bl, al) = (m.los.beta, m.los.alpha);
    let (bn, an) = (m.nlos.beta, m.nlos.alpha);
    let spec = QuadratureSpec::default();
    let h = 1e-3 / lam.sqrt();

    // Distance at which an NLoS BS matches a LoS BS at distance y, and the
    // reverse.
    let nlos_equiv = |y: f64| (bn / bl).powf(1.0 / an) * y.powf(al / an);
    let los_equiv = |y: f64| (bl / bn).powf(1.0 / al) * y.powf(an / al);

    let los_f = |y: f64| {
        let f = b.los_probability(y);
        if f == 0.0 {
            return 0.0;
        }
        y * f * (-2.0 * PI * lam * (b.los_area(y) + b.nlos_area(nlos_equiv(y)))).exp()
    };
    let mut los_max = reach(cfg, p_th, bl, al);
    if let Some(r) = b.los_ball_radius() {
        los_max = los_max.min(r);
    }
    let los = integrate_decaying(los_f, 0.0, los_max, h, TAIL_CUTOFF, &spec)?;

    let nlos = if b.los_ball_radius().is_some() {
        SpecialValue::exact(0.0)
    } else {
        let nlos_f = |y: f64| {
            let f = b.nlos_probability(y);
            if f == 0.0 {
                return 0.0;
            }
            y * f * (-2.0 * PI * lam * (b.los_area(los_equiv(y)) + b.nlos_area(y))).exp()
        };
        integrate_decaying(nlos_f, 0.0, reach(cfg, p_th, bn, an), h, TAIL_CUTOFF, &spec)?
    };
    let scale = 2.0 * PI * lam;
    Ok(SpecialValue::new(
        (scale * (los.value + nlos.value)).min(1.0),
        scale * (los.est_error + nlos.est_error),
    ))
}

/// Closed form of the mmWave coverage under the LoS ball:
/// `1 - exp(-πλ ξ²)` with `ξ = min(R_LoS, LoS reach)`.
pub fn directed_coverage_mm_los_ball(cfg: &NetworkConfig, p_th: f64) -> Result<f64> {
    check_threshold(p_th)?;
    cfg.validate()?;
    let m = &cfg.mmwave;
    let Some(r_los) = m.blockage.los_ball_radius() else {
        return domain("closed form only holds under LoS-ball blockage");
    };
    let xi = r_los.min(reach(cfg, p_th, m.los.beta, m.los.alpha));
    Ok(-(-PI * m.bs_density * xi * xi).exp_m1())
}

/// Upper bound on the sub-6 BS density below which mmWave directed
/// coverage beats the sub-6 tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBound {
    /// BS/m². `f64::INFINITY` when `unbounded` is set.
    pub value: f64,
    /// Set when the competing coverage is 1 to machine precision, so every
    /// finite density satisfies the condition.
    pub unbounded: bool,
}

impl DensityBound {
    pub fn finite(value: f64) -> Self {
        Self {
            value,
            unbounded: false,
        }
    }

    pub fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            unbounded: true,
        }
    }
}

pub fn sub6_density_for_mm_dominance(cfg: &NetworkConfig, p_th: f64) -> Result<DensityBound> {
    let psi = directed_coverage_mm(cfg, p_th)?.value;
    if psi >= 1.0 - f64::EPSILON {
        return Ok(DensityBound::infinite());
    }
    let s = &cfg.sub6;
    let unit = s.efficiency * s.power * s.pathloss.beta * s.antennas as f64 / p_th;
    Ok(DensityBound::finite(
        -(-psi).ln_1p() / (PI * unit.powf(2.0 / s.pathloss.alpha)),
    ))
}

/// LoS-ball form `λ_mm ξ² (η P β N / P_th)^{-2/α}`.
pub fn sub6_density_for_mm_dominance_los_ball(cfg: &NetworkConfig, p_th: f64) -> Result<f64> {
    check_threshold(p_th)?;
    cfg.validate()?;
    let m = &cfg.mmwave;
    let Some(r_los) = m.blockage.los_ball_radius() else {
        return domain("closed form only holds under LoS-ball blockage");
    };
    let xi = r_los.min(reach(cfg, p_th, m.los.beta, m.los.alpha));
    let s = &cfg.sub6;
    let unit = s.efficiency * s.power * s.pathloss.beta * s.antennas as f64 / p_th;
    Ok(m.bs_density * xi * xi * unit.powf(-2.0 / s.pathloss.alpha))
}
