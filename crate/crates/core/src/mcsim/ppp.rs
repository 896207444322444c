use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};

/// Points of a homogeneous PPP in increasing distance from the origin.
///
/// `π λ r_k² - π λ r_start²` are the arrival times of a unit-rate Poisson
/// process, so successive radii are exact draws on the infinite plane.
#[derive(Debug, Clone, Copy)]
pub struct RadialPpp {
    inv_scale: f64,
    area: f64,
}

impl RadialPpp {
    pub fn new(density: f64) -> Self {
        Self::starting_at(density, 0.0)
    }

    /// Only points farther than `r_start` are generated.
    pub fn starting_at(density: f64, r_start: f64) -> Self {
        Self {
            inv_scale: 1.0 / (PI * density),
            area: PI * density * r_start * r_start,
        }
    }

    pub fn next_radius<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let e: f64 = Exp1.sample(rng);
        self.area += e;
        (self.area * self.inv_scale).sqrt()
    }
}

/// BS and UE positions in a disc.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub bs_points: Vec<[f64; 2]>,
    pub ue_points: Vec<[f64; 2]>,
    pub window_radius: f64,
    pub seed: u64,
}

/// Poisson number of points placed uniformly on the disc of radius
/// `window_radius`.
pub fn sample_hppp<R: Rng + ?Sized>(density: f64, window_radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let mean = density * PI * window_radius * window_radius;
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count = Poisson::new(mean).expect("positive mean").sample(rng) as usize;
    (0..count)
        .map(|_| {
            let r = window_radius * rng.random::<f64>().sqrt();
            let t = 2.0 * PI * rng.random::<f64>();
            [r * t.cos(), r * t.sin()]
        })
        .collect()
}

/// Default window: room for about 500 expected BSs and a few LoS radii.
pub fn default_window(density: f64, r_los: Option<f64>) -> f64 {
    let a = (500.0 / (PI * density)).sqrt();
    let b = 3.0 * r_los.unwrap_or(0.0);
    let c = 20.0 / density.sqrt();
    a.max(b).max(c)
}

pub fn sample_deployment(bs_density: f64, ue_density: f64, window_radius: f64, seed: u64) -> Deployment {
    let mut rng = super::trial_rng(seed, 0);
    let bs_points = sample_hppp(bs_density, window_radius, &mut rng);
    let ue_points = sample_hppp(ue_density, window_radius, &mut rng);
    Deployment {
        bs_points,
        ue_points,
        window_radius,
        seed,
    }
}

/// Serving-link array gain `‖h_o‖² ~ Gamma(N, 1)` and unit-mean exponential
/// interferer gains.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingDraw {
    pub serving_gain: f64,
    pub interferer_gains: Vec<f64>,
}

pub fn draw_fading<R: Rng + ?Sized>(antennas: u32, interferers: usize, rng: &mut R) -> FadingDraw {
    let g = Gamma::new(antennas as f64, 1.0).expect("positive shape");
    FadingDraw {
        serving_gain: g.sample(rng),
        interferer_gains: (0..interferers).map(|_| Exp1.sample(rng)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcsim::{run_trials, trial_rng, MCEstimate};

    #[test]
    fn empty_window_for_zero_density() {
        let mut rng = trial_rng(1, 0);
        assert!(sample_hppp(0.0, 100.0, &mut rng).is_empty());
    }

    #[test]
    fn count_mean_matches_poisson() {
        let counts: Vec<f64> = run_trials(11, 10_000, |r| sample_hppp(0.002, 500.0, r).len() as f64);
        let e = MCEstimate::from_samples(&counts, 11);
        let want = 0.002 * PI * 500.0 * 500.0;
        let sigma = want.sqrt() / 100.0;
        assert!((e.mean - want).abs() < 4.0 * sigma, "{} vs {want}", e.mean);
        assert!(sample_hppp(0.002, 500.0, &mut trial_rng(3, 3))
            .iter()
            .all(|p| p[0].hypot(p[1]) <= 500.0));
    }

    #[test]
    fn deployments_repeat_for_a_seed() {
        assert_eq!(sample_deployment(0.01, 0.02, 50.0, 9), sample_deployment(0.01, 0.02, 50.0, 9));
    }

    #[test]
    fn nearest_radius_matches_rayleigh_law() {
        // Pr(r_1 > x) = exp(-πλx²)
        let lam = 0.01;
        let r: Vec<f64> = run_trials(5, 20_000, |g| RadialPpp::new(lam).next_radius(g));
        let x = 5.0;
        let p = r.iter().filter(|&&v| v > x).count() as f64 / r.len() as f64;
        let want = (-PI * lam * x * x).exp();
        assert!((p - want).abs() < 4.0 * (want * (1.0 - want) / 2e4).sqrt());
    }

    #[test]
    fn fading_moments() {
        let d: Vec<(f64, f64)> = run_trials(2, 20_000, |r| {
            let f = draw_fading(16, 1, r);
            (f.serving_gain, f.interferer_gains[0])
        });
        let g: Vec<f64> = d.iter().map(|x| x.0).collect();
        let e: Vec<f64> = d.iter().map(|x| x.1).collect();
        assert!(MCEstimate::from_samples(&g, 2).contains(16.0));
        assert!(MCEstimate::from_samples(&e, 2).contains(1.0));
    }
}
