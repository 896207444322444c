//! WPT mode selection: which tier delivers the larger directed power.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::netmodel::NetworkConfig;
use crate::numerics::{integrate, integrate_decaying, QuadratureSpec};

const TAIL_CUTOFF: f64 = 1e-14;

/// Probabilities of harvesting from the sub-6 tier, a LoS mmWave BS or an
/// NLoS mmWave BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationProbs {
    pub p_sub6: f64,
    pub p_mm_los: f64,
    pub p_mm_nlos: f64,
}

impl AssociationProbs {
    pub fn sum(&self) -> f64 {
        self.p_sub6 + self.p_mm_los + self.p_mm_nlos
    }
}

struct Geometry {
    lam_mu: f64,
    lam_mm: f64,
    beta_mu: f64,
    alpha_mu: f64,
    beta_l: f64,
    alpha_l: f64,
    beta_n: f64,
    alpha_n: f64,
    varpi: f64,
}

impl Geometry {
    fn new(cfg: &NetworkConfig) -> Result<Self> {
        let d = cfg.derived()?;
        let m = &cfg.mmwave;
        Ok(Self {
            lam_mu: cfg.sub6.bs_density,
            lam_mm: m.bs_density,
            beta_mu: cfg.sub6.pathloss.beta,
            alpha_mu: cfg.sub6.pathloss.alpha,
            beta_l: m.los.beta,
            alpha_l: m.los.alpha,
            beta_n: m.nlos.beta,
            alpha_n: m.nlos.alpha,
            varpi: d.varpi,
        })
    }

    /// Distance at which a mmWave BS with intercept `beta`, exponent `alpha`
    /// matches the sub-6 directed power from distance `r`.
    fn mm_equiv(&self, r: f64, beta: f64, alpha: f64) -> f64 {
        (self.varpi * beta / self.beta_mu).powf(1.0 / alpha) * r.powf(self.alpha_mu / alpha)
    }

    /// `π r_μ²` for the sub-6 distance `r_μ` matching a mmWave link at `y`.
    fn sub6_equiv_area(&self, y: f64, beta: f64, alpha: f64) -> f64 {
        PI * (self.beta_mu / (self.varpi * beta)).powf(2.0 / self.alpha_mu)
            * y.powf(2.0 * alpha / self.alpha_mu)
    }
}

/// Mode-selection probabilities. Under LoS-ball blockage the LoS-only
/// simplification is used; otherwise both mmWave candidate sets enter and
/// the NLoS share is the complement.
pub fn association_probabilities(cfg: &NetworkConfig) -> Result<AssociationProbs> {
    let g = Geometry::new(cfg)?;
    check_densities(&g)?;
    if g.lam_mm == 0.0 {
        return Ok(AssociationProbs {
            p_sub6: 1.0,
            p_mm_los: 0.0,
            p_mm_nlos: 0.0,
        });
    }
    if let Some(r_los) = cfg.mmwave.blockage.los_ball_radius() {
        let p_sub6 = if g.lam_mu == 0.0 {
            0.0
        } else {
            let f = |v: f64| {
                let r = (v / (PI * g.lam_mu)).sqrt();
                let y = g.mm_equiv(r, g.beta_l, g.alpha_l).min(r_los);
                (-v - PI * g.lam_mm * y * y).exp()
            };
            integrate(f, 0.0, f64::INFINITY, &QuadratureSpec::default())?.value
        };
        return Ok(AssociationProbs {
            p_sub6,
            p_mm_los: 1.0 - p_sub6,
            p_mm_nlos: 0.0,
        });
    }
    association_general(cfg)
}

fn check_densities(g: &Geometry) -> Result<()> {
    if g.lam_mu == 0.0 && g.lam_mm == 0.0 {
        return domain("association needs at least one tier with BSs");
    }
    Ok(())
}

/// Both candidate-set integrals evaluated for any blockage law, with the
/// NLoS share taken as the complement.
pub fn association_general(cfg: &NetworkConfig) -> Result<AssociationProbs> {
    let g = Geometry::new(cfg)?;
    check_densities(&g)?;
    let b = cfg.mmwave.blockage;
    let spec = QuadratureSpec::default();
    let lam = g.lam_mm;

    let p_sub6 = if g.lam_mu == 0.0 {
        0.0
    } else {
        let f = |v: f64| {
            let r = (v / (PI * g.lam_mu)).sqrt();
            let void = b.los_area(g.mm_equiv(r, g.beta_l, g.alpha_l))
                + b.nlos_area(g.mm_equiv(r, g.beta_n, g.alpha_n));
            (-v - 2.0 * PI * lam * void).exp()
        };
        integrate(f, 0.0, f64::INFINITY, &spec)?.value
    };
    if lam == 0.0 {
        return Ok(AssociationProbs {
            p_sub6,
            p_mm_los: 0.0,
            p_mm_nlos: 0.0,
        });
    }

    let nlos_for_los = |y: f64| (g.beta_n / g.beta_l).powf(1.0 / g.alpha_n) * y.powf(g.alpha_l / g.alpha_n);
    let f = |y: f64| {
        let p = b.los_probability(y);
        if p == 0.0 {
            return 0.0;
        }
        let void = b.los_area(y) + b.nlos_area(nlos_for_los(y));
        y * p * (-2.0 * PI * lam * void - g.lam_mu * g.sub6_equiv_area(y, g.beta_l, g.alpha_l)).exp()
    };
    let upper = b.los_ball_radius().unwrap_or(f64::INFINITY);
    let h = 1e-3 / lam.sqrt();
    let p_mm_los = 2.0 * PI * lam * integrate_decaying(f, 0.0, upper, h, TAIL_CUTOFF, &spec)?.value;
    Ok(AssociationProbs {
        p_sub6,
        p_mm_los,
        p_mm_nlos: (1.0 - p_sub6 - p_mm_los).max(0.0),
    })
}

/// NLoS share from its own integral rather than the complement.
pub fn nlos_association_direct(cfg: &NetworkConfig) -> Result<f64> {
    let g = Geometry::new(cfg)?;
    check_densities(&g)?;
    let b = cfg.mmwave.blockage;
    let lam = g.lam_mm;
    if lam == 0.0 || b.los_ball_radius().is_some() {
        return Ok(0.0);
    }
    let los_for_nlos = |y: f64| (g.beta_l / g.beta_n).powf(1.0 / g.alpha_l) * y.powf(g.alpha_n / g.alpha_l);
    let f = |y: f64| {
        let p = b.nlos_probability(y);
        let void = b.los_area(los_for_nlos(y)) + b.nlos_area(y);
        y * p * (-2.0 * PI * lam * void - g.lam_mu * g.sub6_equiv_area(y, g.beta_n, g.alpha_n)).exp()
    };
    let h = 1e-3 / lam.sqrt();
    Ok(2.0
        * PI
        * lam
        * integrate_decaying(f, 0.0, f64::INFINITY, h, TAIL_CUTOFF, &QuadratureSpec::default())?
            .value)
}
