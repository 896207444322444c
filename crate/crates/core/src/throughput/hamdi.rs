use crate::error::Result;
use crate::numerics::{integrate, integrate_panels, MonotoneCubic, QuadratureSpec, SpecialValue};

const LAPLACE_NODES: usize = 64;
const TRUNCATION: f64 = 1e-12;

/// Interference Laplace transform `Ĩ(t)` on log-spaced nodes, interpolated
/// as a monotone cubic in `(ln t, ln(-ln Ĩ))`.
#[derive(Debug, Clone)]
pub struct LaplaceCache {
    pub t_grid: Vec<f64>,
    pub interference_laplace: Vec<f64>,
    curve: MonotoneCubic,
}

impl LaplaceCache {
    /// `neg_log` returns `-ln Ĩ(t)`.
    pub fn build<F>(u_lo: f64, u_hi: f64, mut neg_log: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut us = Vec::with_capacity(LAPLACE_NODES);
        let mut ys = Vec::with_capacity(LAPLACE_NODES);
        let mut t_grid = Vec::with_capacity(LAPLACE_NODES);
        let mut vals = Vec::with_capacity(LAPLACE_NODES);
        for i in 0..LAPLACE_NODES {
            let u = u_lo + (u_hi - u_lo) * i as f64 / (LAPLACE_NODES - 1) as f64;
            let t = u.exp();
            let nl = neg_log(t)?.max(1e-300);
            us.push(u);
            ys.push(nl.ln());
            t_grid.push(t);
            vals.push((-nl).exp());
        }
        Ok(Self {
            t_grid,
            interference_laplace: vals,
            curve: MonotoneCubic::new(us, ys)?,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        (-self.curve.eval(t.ln()).exp()).exp()
    }
}

/// Range of `u = ln t` where `φ(e^u) e^{-e^u n}` is above `1e-12` of its
/// peak.
pub fn truncation_range<P>(phi: &P, noise: f64) -> Result<(f64, f64)>
where
    P: Fn(f64) -> Result<f64>,
{
    const STEP: f64 = 0.5;
    let us: Vec<f64> = (0..=400).map(|i| -100.0 + STEP * i as f64).collect();
    let mut g = Vec::with_capacity(us.len());
    for &u in &us {
        let t = u.exp();
        g.push(phi(t)? * (-t * noise).exp());
    }
    let peak = g.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok((0.0, 0.0));
    }
    let first = g.iter().position(|&v| v >= TRUNCATION * peak).unwrap_or(0);
    let last = g.iter().rposition(|&v| v >= TRUNCATION * peak).unwrap_or(us.len() - 1);
    Ok((us[first.saturating_sub(1)], us[(last + 1).min(us.len() - 1)]))
}

/// `∫ φ(t) Ĩ(t) e^{-tn} dt / t` over `t = e^u`, in nats.
pub fn rate_integral<P>(phi: &P, noise: f64, laplace: Option<&LaplaceCache>, range: (f64, f64)) -> Result<SpecialValue>
where
    P: Fn(f64) -> Result<f64>,
{
    let (lo, hi) = range;
    if hi <= lo {
        return Ok(SpecialValue::exact(0.0));
    }
    let f = |u: f64| {
        let t = u.exp();
        let i = laplace.map_or(1.0, |c| c.eval(t));
        phi(t).unwrap_or(f64::NAN) * i * (-t * noise).exp()
    };
    let panels = 32;
    let bps: Vec<f64> = (0..=panels)
        .map(|k| lo + (hi - lo) * k as f64 / panels as f64)
        .collect();
    integrate_panels(f, &bps, &QuadratureSpec::default())
}

/// `∫₀^∞ g(v) e^{-v} dv`, split around `v_star` where `g` changes regime.
pub fn exp_weighted<G: Fn(f64) -> f64>(g: G, v_star: f64, spec: &QuadratureSpec) -> Result<SpecialValue> {
    let f = |v: f64| {
        let w = (-v).exp();
        if w == 0.0 {
            0.0
        } else {
            g(v) * w
        }
    };
    if v_star.is_finite() && v_star > 1e-3 && v_star < 60.0 {
        let mut r = integrate_panels(&f, &[0.0, 0.25 * v_star, v_star, 4.0 * v_star], spec)?;
        let t = integrate(&f, 4.0 * v_star, f64::INFINITY, spec)?;
        r.value += t.value;
        r.est_error += t.est_error;
        Ok(r)
    } else {
        integrate(f, 0.0, f64::INFINITY, spec)
    }
}

/// `∫₀^V g(v) e^{-v} dv` on a finite range with a regime change at
/// `v_star`.
pub fn exp_weighted_finite<G: Fn(f64) -> f64>(g: G, upper: f64, v_star: f64, spec: &QuadratureSpec) -> Result<SpecialValue> {
    let f = |v: f64| g(v) * (-v).exp();
    let mut bps = vec![0.0];
    for p in [0.25 * v_star, v_star, 4.0 * v_star] {
        if p.is_finite() && p > *bps.last().unwrap() && p < upper {
            bps.push(p);
        }
    }
    bps.push(upper);
    integrate_panels(f, &bps, spec)
}
