//! Uplink throughput of wireless-powered UEs in both tiers.
//!
//! Exact rates use `E[ln(1+SINR)] = ∫₀^∞ (1 - E[e^{-tS}]) E[e^{-tI}] e^{-tσ²} dt / t`
//! with the interference Laplace transform tabulated on a log grid.

mod hamdi;
mod mmwave;
mod solvers;
mod sub6;

pub use hamdi::LaplaceCache;
pub use mmwave::{
    mm_interference_cache, mm_lower_terms, throughput_mm_exact, throughput_mm_lower,
    throughput_mm_noise_limited, MmThroughputTerms,
};
pub use solvers::{
    cross_tier_verdict, kappa_threshold_sub6, mm_density_threshold, CrossTierVerdict, Winner,
};
pub use sub6::{
    sub6_interference_cache, throughput_sub6_exact, throughput_sub6_lower, Sub6LowerTerms,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    LowerBound,
    NoiseLimited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputResult {
    pub bits_per_second: f64,
    pub method: Method,
    pub quadrature_error: f64,
}

impl ThroughputResult {
    fn new(bits_per_second: f64, method: Method, quadrature_error: f64) -> Self {
        Self {
            bits_per_second: bits_per_second.max(0.0),
            method,
            quadrature_error: quadrature_error.abs(),
        }
    }
}
