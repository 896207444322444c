//! Deployment, channel and antenna parameters for both tiers, plus the
//! constants derived from them.
//!
//! Everything here is SI. Decibel and GHz values only appear at the
//! configuration boundary, through the conversion helpers below.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

pub const SPEED_OF_LIGHT: f64 = 3e8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// `β d^{-α}`, optionally with the distance clamped below at `r_ref`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossModel {
    pub beta: f64,
    pub alpha: f64,
    pub r_ref: f64,
}

impl PathlossModel {
    pub fn new(beta: f64, alpha: f64, r_ref: f64) -> Result<Self> {
        let m = Self { beta, alpha, r_ref };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::Validation(format!("pathloss beta must be > 0 (got {})", self.beta)));
        }
        if !(self.alpha >= 2.0) || !self.alpha.is_finite() {
            return Err(Error::Validation(format!(
                "pathloss exponent must be >= 2 (got {})",
                self.alpha
            )));
        }
        if !(self.r_ref > 0.0) || !self.r_ref.is_finite() {
            return Err(Error::Validation(format!(
                "reference distance must be > 0 (got {})",
                self.r_ref
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn gain(&self, d: f64) -> f64 {
        self.beta * d.powf(-self.alpha)
    }

    #[inline]
    pub fn gain_constrained(&self, d: f64) -> f64 {
        self.beta * d.max(self.r_ref).powf(-self.alpha)
    }
}

pub fn pathloss(model: &PathlossModel, distance: f64, constrained: bool) -> Result<f64> {
    if !(distance > 0.0) {
        return domain(format!("pathloss distance must be > 0 (got {distance})"));
    }
    Ok(if constrained {
        model.gain_constrained(distance)
    } else {
        model.gain(distance)
    })
}

/// Free-space intercept `(c / 4π f_c)²`.
pub fn freq_constant_beta(carrier_hz: f64) -> Result<f64> {
    if !(carrier_hz > 0.0) || !carrier_hz.is_finite() {
        return domain(format!("carrier frequency must be > 0 (got {carrier_hz})"));
    }
    Ok((SPEED_OF_LIGHT / (4.0 * PI * carrier_hz)).powi(2))
}

/// LoS probability law for mmWave links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockageModel {
    /// `f(R) = e^{-ρR}`; links that are not LoS are NLoS.
    ExponentialLoS { rho: f64 },
    /// `f(R) = 1(R ≤ R_LoS)`; links beyond the ball are fully blocked and
    /// carry no power.
    LoSBall { r_los: f64 },
}

impl BlockageModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BlockageModel::ExponentialLoS { rho } if !(rho > 0.0) || !rho.is_finite() => Err(
                Error::Validation(format!("blockage rho must be > 0 (got {rho})")),
            ),
            BlockageModel::LoSBall { r_los } if !(r_los > 0.0) || !r_los.is_finite() => Err(
                Error::Validation(format!("LoS ball radius must be > 0 (got {r_los})")),
            ),
            _ => Ok(()),
        }
    }

    pub fn los_probability(&self, d: f64) -> f64 {
        match *self {
            BlockageModel::ExponentialLoS { rho } => (-rho * d.max(0.0)).exp(),
            BlockageModel::LoSBall { r_los } => {
                if d <= r_los {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Probability that a BS at distance `d` is an NLoS transmitter that
    /// still delivers power. Zero everywhere under the LoS ball.
    pub fn nlos_probability(&self, d: f64) -> f64 {
        match *self {
            BlockageModel::ExponentialLoS { .. } => 1.0 - self.los_probability(d),
            BlockageModel::LoSBall { .. } => 0.0,
        }
    }

    /// `Θ(y) = ∫₀^y t f(t) dt`.
    pub fn los_area(&self, y: f64) -> f64 {
        let y = y.max(0.0);
        match *self {
            BlockageModel::ExponentialLoS { rho } => {
                let x = rho * y;
                if x < 0.5 {
                    exp_area_series(x, 2) / (rho * rho)
                } else {
                    (1.0 - (-x).exp() * (1.0 + x)) / (rho * rho)
                }
            }
            BlockageModel::LoSBall { r_los } => 0.5 * y.min(r_los).powi(2),
        }
    }

    /// `Ξ(y) = ∫₀^y t (1 - f(t)) dt` over power-carrying NLoS links.
    pub fn nlos_area(&self, y: f64) -> f64 {
        let y = y.max(0.0);
        match *self {
            BlockageModel::ExponentialLoS { rho } => {
                let x = rho * y;
                if x < 0.5 {
                    -exp_area_series(x, 3) / (rho * rho)
                } else {
                    (0.5 * x * x - 1.0 + (-x).exp() * (1.0 + x)) / (rho * rho)
                }
            }
            BlockageModel::LoSBall { .. } => 0.0,
        }
    }

    pub fn los_ball_radius(&self) -> Option<f64> {
        match *self {
            BlockageModel::LoSBall { r_los } => Some(r_los),
            _ => None,
        }
    }
}

/// `Σ_{n ≥ first} (-1)^n (n-1) x^n / n!`, the Taylor tail of
/// `1 - e^{-x}(1+x)`; used where the closed form cancels.
fn exp_area_series(x: f64, first: u32) -> f64 {
    let mut term = 1.0;
    for n in 1..first {
        term *= x / n as f64;
    }
    let mut sum = 0.0;
    for n in first..60 {
        term *= x / n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let t = sign * (n as f64 - 1.0) * term;
        sum += t;
        if t.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn los_probability(b: &BlockageModel, distance: f64) -> f64 {
    b.los_probability(distance)
}

/// Main-lobe gain, side-lobe gain and beamwidth of a sectored antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectoredPattern {
    pub main_gain: f64,
    pub side_gain: f64,
    pub beamwidth: f64,
}

impl SectoredPattern {
    pub fn from_db_deg(main_db: f64, side_db: f64, beam_deg: f64) -> Self {
        Self {
            main_gain: db_to_linear(main_db),
            side_gain: db_to_linear(side_db),
            beamwidth: beam_deg.to_radians(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side_gain > 0.0) || !(self.main_gain >= self.side_gain) {
            return Err(Error::Validation(format!(
                "antenna gains need main >= side > 0 (got {}, {})",
                self.main_gain, self.side_gain
            )));
        }
        if !(self.beamwidth > 0.0) || !(self.beamwidth <= 2.0 * PI) {
            return Err(Error::Validation(format!(
                "beamwidth must lie in (0, 2π] (got {})",
                self.beamwidth
            )));
        }
        Ok(())
    }
}

/// The four (gain, probability) states of a randomly aligned BS/UE pair,
/// ordered MM, Mm, mM, mm.
pub fn gain_distribution(bs: &SectoredPattern, ue: &SectoredPattern) -> [(f64, f64); 4] {
    let two_pi = 2.0 * PI;
    let pb = bs.beamwidth / two_pi;
    let pd = ue.beamwidth / two_pi;
    [
        (bs.main_gain * ue.main_gain, pb * pd),
        (bs.main_gain * ue.side_gain, pb * (1.0 - pd)),
        (bs.side_gain * ue.main_gain, (1.0 - pb) * pd),
        (bs.side_gain * ue.side_gain, (1.0 - pb) * (1.0 - pd)),
    ]
}

/// Thermal noise `-174 + 10 log10(BW) + Nf` dBm, in watts.
pub fn noise_power(bandwidth: f64, noise_figure_db: f64) -> Result<f64> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return domain(format!("bandwidth must be > 0 (got {bandwidth})"));
    }
    Ok(dbm_to_watts(-174.0 + 10.0 * bandwidth.log10() + noise_figure_db))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sub6Tier {
    pub bs_density: f64,
    pub ue_density: f64,
    pub power: f64,
    pub efficiency: f64,
    pub bandwidth: f64,
    pub antennas: u32,
    pub pathloss: PathlossModel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmWaveTier {
    pub bs_density: f64,
    pub ue_density: f64,
    pub power: f64,
    pub efficiency: f64,
    pub bandwidth: f64,
    pub bs_pattern: SectoredPattern,
    pub ue_pattern: SectoredPattern,
    pub los: PathlossModel,
    pub nlos: PathlossModel,
    pub blockage: BlockageModel,
}

impl MmWaveTier {
    /// Boresight gain `M_B M_D` of an aligned link.
    pub fn max_gain(&self) -> f64 {
        self.bs_pattern.main_gain * self.ue_pattern.main_gain
    }

    pub fn gain_states(&self) -> [(f64, f64); 4] {
        gain_distribution(&self.bs_pattern, &self.ue_pattern)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    pub sub6: Sub6Tier,
    pub mmwave: MmWaveTier,
    /// Fraction τ of each block spent harvesting.
    pub harvest_fraction: f64,
    pub noise_figure_db: f64,
}

fn check_tier(
    name: &str,
    bs_density: f64,
    ue_density: f64,
    power: f64,
    eff: f64,
    bw: f64,
) -> Result<()> {
    let bad = |what: &str, v: f64| {
        Err(Error::Validation(format!("{name}.{what} is invalid ({v})")))
    };
    if !(bs_density >= 0.0) || !bs_density.is_finite() {
        return bad("bs_density", bs_density);
    }
    if !(ue_density >= 0.0) || !ue_density.is_finite() {
        return bad("ue_density", ue_density);
    }
    if !(power > 0.0) || !power.is_finite() {
        return bad("power", power);
    }
    if !(eff > 0.0 && eff <= 1.0) {
        return bad("efficiency", eff);
    }
    if !(bw > 0.0) || !bw.is_finite() {
        return bad("bandwidth", bw);
    }
    Ok(())
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        let s = &self.sub6;
        check_tier("sub6", s.bs_density, s.ue_density, s.power, s.efficiency, s.bandwidth)?;
        if s.antennas < 1 {
            return Err(Error::Validation("sub6.antennas must be >= 1".into()));
        }
        s.pathloss.validate()?;
        let m = &self.mmwave;
        check_tier("mmwave", m.bs_density, m.ue_density, m.power, m.efficiency, m.bandwidth)?;
        m.bs_pattern.validate()?;
        m.ue_pattern.validate()?;
        m.los.validate()?;
        m.nlos.validate()?;
        m.blockage.validate()?;
        if !(self.harvest_fraction > 0.0 && self.harvest_fraction < 1.0) {
            return Err(Error::Validation(format!(
                "harvest fraction tau must lie in (0, 1) (got {})",
                self.harvest_fraction
            )));
        }
        if !self.noise_figure_db.is_finite() {
            return Err(Error::Validation("noise figure must be finite".into()));
        }
        Ok(())
    }

    pub fn derived(&self) -> Result<DerivedConstants> {
        self.validate()?;
        let s = &self.sub6;
        let m = &self.mmwave;
        let split = self.harvest_fraction / (1.0 - self.harvest_fraction);
        let n = s.antennas as f64;
        Ok(DerivedConstants {
            hbar_sub6: split
                * s.efficiency
                * s.power
                * n
                * s.bs_density.powf(s.pathloss.alpha / 2.0),
            hbar_mm: split * m.efficiency * m.power * m.max_gain(),
            varpi: m.efficiency * m.power * m.max_gain() / (s.efficiency * s.power * n),
            kappa_sub6: s.bs_density / s.ue_density,
            kappa_mm: m.bs_density / m.ue_density,
            noise_sub6: noise_power(s.bandwidth, self.noise_figure_db)?,
            noise_mm: noise_power(m.bandwidth, self.noise_figure_db)?,
        })
    }
}

impl Default for NetworkConfig {
    /// Baseline deployment: 30 dBm BSs with 60% harvesting efficiency,
    /// a 32-antenna 1.5 GHz sub-6 tier and a 28 GHz mmWave tier with
    /// exponential blockage.
    fn default() -> Self {
        let r_ref = 1.0;
        let beta_sub6 = freq_constant_beta(1.5e9).expect("positive carrier");
        let beta_mm = freq_constant_beta(28e9).expect("positive carrier");
        NetworkConfig {
            sub6: Sub6Tier {
                bs_density: 0.002,
                ue_density: 0.001,
                power: 1.0,
                efficiency: 0.6,
                bandwidth: 20e6,
                antennas: 32,
                pathloss: PathlossModel {
                    beta: beta_sub6,
                    alpha: 2.7,
                    r_ref,
                },
            },
            mmwave: MmWaveTier {
                bs_density: 0.02,
                ue_density: 0.01,
                power: 1.0,
                efficiency: 0.6,
                bandwidth: 1e9,
                bs_pattern: SectoredPattern::from_db_deg(18.0, -2.0, 10.0),
                ue_pattern: SectoredPattern::from_db_deg(10.0, -10.0, 45.0),
                los: PathlossModel {
                    beta: beta_mm,
                    alpha: 2.0,
                    r_ref,
                },
                nlos: PathlossModel {
                    beta: beta_mm,
                    alpha: 2.9,
                    r_ref,
                },
                blockage: BlockageModel::ExponentialLoS { rho: 1.0 / 141.4 },
            },
            harvest_fraction: 0.7,
            noise_figure_db: 7.0,
        }
    }
}

/// Constants shared by the throughput and mode-selection formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// `τ/(1-τ) η P N λ^{α/2}`: sub-6 UE transmit-power scale in the
    /// unit-density mapped coordinates.
    pub hbar_sub6: f64,
    /// `τ/(1-τ) η P M_B M_D`.
    pub hbar_mm: f64,
    /// Ratio of mmWave to sub-6 directed transmit gains.
    pub varpi: f64,
    pub kappa_sub6: f64,
    pub kappa_mm: f64,
    pub noise_sub6: f64,
    pub noise_mm: f64,
}
