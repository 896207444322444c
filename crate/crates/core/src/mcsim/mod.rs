//! Poisson point process Monte Carlo simulator.
//!
//! The typical UE (or, for uplink, the typical BS) sits at the origin. Each
//! trial draws from its own ChaCha stream keyed by `(seed, trial)`, and
//! per-trial outputs are reduced in trial order, so results do not depend on
//! the number of worker threads.

mod ppp;
mod power;
mod uplink;

use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub use ppp::{default_window, draw_fading, sample_deployment, sample_hppp, Deployment, FadingDraw, RadialPpp};
pub use power::{
    mc_ambient_moments_sub6, mc_ambient_power, mc_association, mc_directed_power, unit_los_ambient_samples,
    AmbientMomentsEstimate, AssociationEstimate,
};
pub use uplink::{mc_uplink_throughput, UplinkOptions};

pub type TrialRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    Sub6,
    MmWave,
}

/// Independent stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn capped_pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n: usize = std::env::var("WPT_THREADS").ok()?.trim().parse().ok()?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .ok()
    })
    .as_ref()
}

/// Runs `trial` for indices `0..trials` in parallel and returns outputs in
/// index order. `WPT_THREADS` caps the worker count; otherwise the current
/// rayon pool is used.
pub fn run_trials<T, F>(seed: u64, trials: usize, trial: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut TrialRng) -> T + Sync + Send,
{
    let work = || {
        (0..trials as u64)
            .into_par_iter()
            .map(|i| trial(&mut trial_rng(seed, i)))
            .collect()
    };
    match capped_pool() {
        Some(pool) => pool.install(work),
        None => work(),
    }
}

pub(crate) fn require_trials(trials: usize, min: usize) -> Result<()> {
    if trials < min {
        return Err(Error::InsufficientTrials(format!(
            "need at least {min} trials (got {trials})"
        )));
    }
    Ok(())
}

/// Sample mean with standard error and a normal 99% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub ci99: (f64, f64),
    pub seed: u64,
}

impl MCEstimate {
    /// Two-sided 99% normal quantile.
    pub const Z99: f64 = 2.575_829_303_548_901;

    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self::from_mean_se(mean, (var / n as f64).sqrt(), n, seed)
    }

    pub fn from_mean_se(mean: f64, std_error: f64, trials: usize, seed: u64) -> Self {
        let half = Self::Z99 * std_error;
        Self {
            mean,
            std_error,
            trials,
            ci99: (mean - half, mean + half),
            seed,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci99.1 - self.ci99.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.ci99.0 && x <= self.ci99.1
    }
}

/// Empirical distribution of per-trial samples.
#[derive(Debug, Clone)]
pub struct EmpiricalCcdf {
    samples: Vec<f64>,
    sorted: Vec<f64>,
    pub seed: u64,
}

impl EmpiricalCcdf {
    pub fn new(samples: Vec<f64>, seed: u64) -> Self {
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        Self {
            samples,
            sorted,
            seed,
        }
    }

    pub fn trials(&self) -> usize {
        self.samples.len()
    }

    /// Samples in trial order.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Fraction of samples strictly above `x`, with its binomial standard
    /// error.
    pub fn ccdf(&self, x: f64) -> MCEstimate {
        let n = self.sorted.len();
        let below = self.sorted.partition_point(|&v| v <= x);
        let p = (n - below) as f64 / n as f64;
        MCEstimate::from_mean_se(p, (p * (1.0 - p) / n as f64).sqrt(), n, self.seed)
    }

    pub fn mean(&self) -> MCEstimate {
        MCEstimate::from_samples(&self.samples, self.seed)
    }

    /// Two-sample Kolmogorov–Smirnov statistic.
    pub fn ks_distance(&self, other: &EmpiricalCcdf) -> f64 {
        let (a, b) = (&self.sorted, &other.sorted);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / na - j as f64 / nb).abs());
        }
        d
    }

    /// Maps every sample through `f`, keeping trial order.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.samples.iter().map(|&x| f(x)).collect(), self.seed)
    }
}

/// Writes `trial,value` rows.
pub fn write_samples_csv(path: &Path, samples: &[f64]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "trial,value")?;
    for (i, v) in samples.iter().enumerate() {
        writeln!(out, "{i},{v:e}")?;
    }
    out.flush()
}
