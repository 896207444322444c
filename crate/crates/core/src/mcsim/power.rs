//! Harvested power and mode selection at the typical UE.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::{require_trials, run_trials, EmpiricalCcdf, MCEstimate, RadialPpp, Tier};
use crate::error::{domain, Result};
use crate::netmodel::{MmWaveTier, NetworkConfig};
use crate::numerics::{integrate, QuadratureSpec};

/// Expected number of BSs simulated point by point before the remaining
/// ones are replaced by a Gaussian with their exact mean and variance.
const NEAR_FIELD_POINTS: f64 = 500.0;

/// Radius of the explicit near field at unit density for the LoS quantile.
const UNIT_NEAR_RADIUS: f64 = 20.0;

/// Draw index into the four antenna-gain states.
pub(crate) fn draw_gain<R: Rng + ?Sized>(states: &[(f64, f64); 4], rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(g, p) in &states[..3] {
        acc += p;
        if u < acc {
            return g;
        }
    }
    states[3].0
}

/// Strongest mmWave link for the UE at the origin, as `(β r^{-α}, is_los)`,
/// by walking BSs outward until no farther BS can win.
fn best_mm_link<R: Rng + ?Sized>(m: &MmWaveTier, rng: &mut R) -> Option<(f64, bool)> {
    if m.bs_density == 0.0 {
        return None;
    }
    let b = m.blockage;
    let ball = b.los_ball_radius();
    let mut ppp = RadialPpp::new(m.bs_density);
    let mut best: Option<(f64, bool)> = None;
    loop {
        let r = ppp.next_radius(rng);
        let los_possible = ball.map_or(true, |rl| r <= rl);
        let nlos_possible = ball.is_none();
        let reach = f64::max(
            if los_possible { m.los.gain(r) } else { 0.0 },
            if nlos_possible { m.nlos.gain(r) } else { 0.0 },
        );
        if reach == 0.0 || best.is_some_and(|(v, _)| reach < v) {
            return best;
        }
        let is_los = rng.random::<f64>() < b.los_probability(r);
        let g = if is_los {
            m.los.gain(r)
        } else if nlos_possible {
            m.nlos.gain(r)
        } else {
            continue;
        };
        if best.is_none_or(|(v, _)| g > v) {
            best = Some((g, is_los));
        }
    }
}

/// Per-trial directed harvested power in watts.
pub fn mc_directed_power(cfg: &NetworkConfig, tier: Tier, trials: usize, seed: u64) -> Result<EmpiricalCcdf> {
    require_trials(trials, 1000)?;
    cfg.validate()?;
    let samples = match tier {
        Tier::Sub6 => {
            let s = cfg.sub6;
            if s.bs_density == 0.0 {
                vec![0.0; trials]
            } else {
                let gamma = Gamma::new(s.antennas as f64, 1.0).expect("positive shape");
                run_trials(seed, trials, |rng| {
                    let r = RadialPpp::new(s.bs_density).next_radius(rng);
                    let h: f64 = gamma.sample(rng);
                    s.efficiency * s.power * h * s.pathloss.gain(r)
                })
            }
        }
        Tier::MmWave => {
            let m = cfg.mmwave;
            let scale = m.efficiency * m.power * m.max_gain();
            run_trials(seed, trials, |rng| {
                best_mm_link(&m, rng).map_or(0.0, |(g, _)| scale * g)
            })
        }
    };
    Ok(EmpiricalCcdf::new(samples, seed))
}

/// Exact mean and variance of a shot-noise tail beyond `r_c`:
/// `2πλ ∫ E[w] r dr` and `2πλ ∫ E[w²] r dr`.
fn tail_moments<F, G>(density: f64, r_c: f64, first: F, second: G) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let spec = QuadratureSpec::default().with_rel_tol(1e-10);
    let m = integrate(|r| first(r) * r, r_c, f64::INFINITY, &spec)?.value;
    let v = integrate(|r| second(r) * r, r_c, f64::INFINITY, &spec)?.value;
    Ok((2.0 * PI * density * m, 2.0 * PI * density * v))
}

fn gaussian_tail<R: Rng + ?Sized>(mean: f64, var: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    (mean + var.sqrt() * z).max(0.0)
}

/// Per-trial ambient harvested power in watts: every BS except the serving
/// one, with Rayleigh fading in the sub-6 tier and random sector alignment
/// in the mmWave tier. `include_nlos` only affects the mmWave tier.
pub fn mc_ambient_power(
    cfg: &NetworkConfig,
    tier: Tier,
    trials: usize,
    seed: u64,
    include_nlos: bool,
) -> Result<EmpiricalCcdf> {
    require_trials(trials, 1000)?;
    cfg.validate()?;
    let samples = match tier {
        Tier::Sub6 => {
            let s = cfg.sub6;
            if s.bs_density == 0.0 {
                vec![0.0; trials]
            } else {
                let pl = s.pathloss;
                let r_c = (NEAR_FIELD_POINTS / (PI * s.bs_density)).sqrt().max(pl.r_ref);
                // Exp(1) fading: E[g] = 1, E[g²] = 2.
                let (tm, tv) = tail_moments(
                    s.bs_density,
                    r_c,
                    |r| pl.gain_constrained(r),
                    |r| 2.0 * pl.gain_constrained(r).powi(2),
                )?;
                let scale = s.efficiency * s.power;
                run_trials(seed, trials, |rng| {
                    let mut ppp = RadialPpp::new(s.bs_density);
                    let mut sum = 0.0;
                    let mut first = true;
                    loop {
                        let r = ppp.next_radius(rng);
                        if r > r_c {
                            break;
                        }
                        if first {
                            first = false;
                            continue;
                        }
                        let g: f64 = Exp1.sample(rng);
                        sum += g * pl.gain_constrained(r);
                    }
                    scale * (sum + gaussian_tail(tm, tv, rng))
                })
            }
        }
        Tier::MmWave => {
            let m = cfg.mmwave;
            if m.bs_density == 0.0 {
                vec![0.0; trials]
            } else {
                let r_c = (NEAR_FIELD_POINTS / (PI * m.bs_density)).sqrt();
                let scale = m.efficiency * m.power;
                mm_ambient_samples(&m, m.bs_density, r_c, include_nlos, trials, seed)?
                    .into_iter()
                    .map(|x| scale * x)
                    .collect()
            }
        }
    };
    Ok(EmpiricalCcdf::new(samples, seed))
}

/// `Σ G_ℓ β max(r_o, r_ℓ)^{-α}` over non-serving mmWave BSs at `density`.
/// Serving is the minimum-pathloss BS over both candidate sets.
fn mm_ambient_samples(
    m: &MmWaveTier,
    density: f64,
    r_c: f64,
    include_nlos: bool,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let states = m.gain_states();
    let g1: f64 = states.iter().map(|(g, p)| g * p).sum();
    let g2: f64 = states.iter().map(|(g, p)| g * g * p).sum();
    let b = m.blockage;
    let nlos_w = |r: f64| if include_nlos { b.nlos_probability(r) } else { 0.0 };
    let (tm, tv) = tail_moments(
        density,
        r_c,
        |r| g1 * (b.los_probability(r) * m.los.gain_constrained(r) + nlos_w(r) * m.nlos.gain_constrained(r)),
        |r| {
            g2 * (b.los_probability(r) * m.los.gain_constrained(r).powi(2)
                + nlos_w(r) * m.nlos.gain_constrained(r).powi(2))
        },
    )?;
    let ball = b.los_ball_radius();
    Ok(run_trials(seed, trials, |rng| {
        let mut ppp = RadialPpp::new(density);
        let mut sum = 0.0;
        // Strongest link so far: unconstrained pathloss for association and
        // its harvested contribution.
        let mut serving = (0.0f64, 0.0f64);
        loop {
            let r = ppp.next_radius(rng);
            if r > r_c {
                break;
            }
            let is_los = rng.random::<f64>() < b.los_probability(r);
            let (assoc, contrib) = if is_los {
                (m.los.gain(r), draw_gain(&states, rng) * m.los.gain_constrained(r))
            } else if ball.is_none() {
                let c = draw_gain(&states, rng) * m.nlos.gain_constrained(r);
                (m.nlos.gain(r), if include_nlos { c } else { 0.0 })
            } else {
                continue;
            };
            sum += contrib;
            if assoc > serving.0 {
                serving = (assoc, contrib);
            }
        }
        (sum - serving.1).max(0.0) + gaussian_tail(tm, tv, rng)
    }))
}

/// Mean and variance of the sub-6 ambient sum `Ξ` (per unit `η P`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientMomentsEstimate {
    pub mean: MCEstimate,
    pub variance: MCEstimate,
}

/// Moments of `Ξ` with the Rayleigh fading averaged out exactly: each trial
/// draws BS positions and records `m = E[Ξ | positions]` and
/// `c = Var(Ξ | positions)`. Then `Var(Ξ)` is estimated by the mean of
/// `(m - m̄)² + c`. Only the geometry is sampled, which removes the fading
/// fourth moment from the estimator.
pub fn mc_ambient_moments_sub6(cfg: &NetworkConfig, trials: usize, seed: u64) -> Result<AmbientMomentsEstimate> {
    require_trials(trials, 1000)?;
    cfg.validate()?;
    let s = cfg.sub6;
    if s.bs_density == 0.0 {
        let zero = MCEstimate::from_mean_se(0.0, 0.0, trials, seed);
        return Ok(AmbientMomentsEstimate {
            mean: zero,
            variance: zero,
        });
    }
    let pl = s.pathloss;
    let r_c = (NEAR_FIELD_POINTS / (PI * s.bs_density)).sqrt().max(pl.r_ref);
    let (tm, tv) = tail_moments(
        s.bs_density,
        r_c,
        |r| pl.gain_constrained(r),
        |r| 2.0 * pl.gain_constrained(r).powi(2),
    )?;
    let per_trial: Vec<(f64, f64)> = run_trials(seed, trials, |rng| {
        let mut ppp = RadialPpp::new(s.bs_density);
        let (mut m, mut c) = (tm, tv);
        let mut first = true;
        loop {
            let r = ppp.next_radius(rng);
            if r > r_c {
                break;
            }
            if first {
                first = false;
                continue;
            }
            let l = pl.gain_constrained(r);
            m += l;
            c += l * l;
        }
        (m, c)
    });
    let means: Vec<f64> = per_trial.iter().map(|p| p.0).collect();
    let mean = MCEstimate::from_samples(&means, seed);
    let z: Vec<f64> = per_trial
        .iter()
        .map(|&(m, c)| (m - mean.mean).powi(2) + c)
        .collect();
    Ok(AmbientMomentsEstimate {
        mean,
        variance: MCEstimate::from_samples(&z, seed),
    })
}

/// Unit-density LoS ambient sums used for the quantile constant of the
/// mmWave ambient density condition.
pub fn unit_los_ambient_samples(m: &MmWaveTier, trials: usize, seed: u64) -> Vec<f64> {
    mm_ambient_samples(m, 1.0, UNIT_NEAR_RADIUS, false, trials, seed)
        .expect("tail moments of a validated tier")
}

/// Mode-selection frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationEstimate {
    pub p_sub6: MCEstimate,
    pub p_mm_los: MCEstimate,
    pub p_mm_nlos: MCEstimate,
}

/// Compares the sub-6 directed power `η P N L(r)` from the nearest BS with
/// `η P M_B M_D L(y)` from the strongest mmWave BS.
pub fn mc_association(cfg: &NetworkConfig, trials: usize, seed: u64) -> Result<AssociationEstimate> {
    require_trials(trials, 1000)?;
    cfg.validate()?;
    let s = cfg.sub6;
    let m = cfg.mmwave;
    if s.bs_density == 0.0 && m.bs_density == 0.0 {
        return domain("association needs at least one tier with BSs");
    }
    let sub6_scale = s.efficiency * s.power * s.antennas as f64;
    let mm_scale = m.efficiency * m.power * m.max_gain();
    let choice: Vec<u8> = run_trials(seed, trials, |rng| {
        let sub6 = if s.bs_density > 0.0 {
            sub6_scale * s.pathloss.gain(RadialPpp::new(s.bs_density).next_radius(rng))
        } else {
            0.0
        };
        match best_mm_link(&m, rng) {
            Some((g, los)) if mm_scale * g > sub6 => {
                if los {
                    1
                } else {
                    2
                }
            }
            _ => 0,
        }
    });
    let est = |k: u8| {
        let hits = choice.iter().filter(|&&c| c == k).count() as f64;
        let p = hits / trials as f64;
        MCEstimate::from_mean_se(p, (p * (1.0 - p) / trials as f64).sqrt(), trials, seed)
    };
    Ok(AssociationEstimate {
        p_sub6: est(0),
        p_mm_los: est(1),
        p_mm_nlos: est(2),
    })
}
