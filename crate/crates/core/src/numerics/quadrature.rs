//! Adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Finite intervals are bisected globally (largest error first) until the
//! summed error estimate meets the tolerance. Semi-infinite intervals are
//! mapped onto `[0, 1)` with `t = a + u/(1-u)` first.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions < 1 {
            return Err(Error::Validation(format!(
                "quadrature spec needs rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1 \
                 (got {rel_tol}, {abs_tol}, {max_subdivisions})"
            )));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }
}

/// A computed value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: f64,
    pub est_error: f64,
}

impl SpecialValue {
    pub fn new(value: f64, est_error: f64) -> Self {
        Self {
            value,
            est_error: est_error.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        Self {
            value,
            est_error: 0.0,
        }
    }
}

// Kronrod abscissae on [-1, 1]; odd indices are the embedded Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_643_482_221,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        domain(format!("integrand is not finite at x = {x:e}"))
    }
}

/// One Gauss–Kronrod 21 panel with QUADPACK's error rescaling.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center)?;
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel { a, b, value, error })
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<SpecialValue> {
    let first = gk21(f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut splits = 1usize;
    loop {
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            break;
        }
        if splits >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                estimate: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel is at floating-point resolution; nothing left to refine.
            return Err(Error::NonConvergence {
                estimate: total,
                error: total_err,
            });
        }
        let left = gk21(f, worst.a, mid)?;
        let right = gk21(f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        splits += 1;
        if splits % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(SpecialValue::new(value, error))
}

/// `∫₀^∞ f(s) ds` as `[0, 1]` directly plus `[1, ∞)` in `s = e^v`,
/// `v = u/(1-u)`. The log step turns algebraic tails `s^{-p}` into
/// exponential ones, so neither piece has an endpoint singularity.
fn half_line<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<SpecialValue> {
    let head = adaptive(&f, 0.0, 1.0, spec)?;
    let g = |u: f64| {
        let w = 1.0 - u;
        let s = (u / w).exp();
        if w <= 0.0 || !s.is_finite() {
            return 0.0;
        }
        let v = f(s);
        if v == 0.0 {
            0.0
        } else {
            v * s / (w * w)
        }
    };
    let tail = adaptive(&g, 0.0, 1.0, spec)?;
    Ok(SpecialValue::new(head.value + tail.value, head.est_error + tail.est_error))
}

/// Integrates `f` over `[lower, upper]`. Either bound may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    spec: &QuadratureSpec,
) -> Result<SpecialValue> {
    if lower.is_nan() || upper.is_nan() {
        return domain("integration bounds must not be NaN");
    }
    if lower == upper {
        return Ok(SpecialValue::exact(0.0));
    }
    let (a, b, sign) = if lower < upper {
        (lower, upper, 1.0)
    } else {
        (upper, lower, -1.0)
    };
    let r = match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(&f, a, b, spec)?,
        (true, false) => half_line(|s| f(a + s), spec)?,
        (false, true) => half_line(|s| f(b - s), spec)?,
        (false, false) => {
            let p = half_line(&f, spec)?;
            let n = half_line(|s| f(-s), spec)?;
            SpecialValue::new(p.value + n.value, p.est_error + n.est_error)
        }
    };
    Ok(SpecialValue::new(sign * r.value, r.est_error))
}

/// Integrates over consecutive panels `[p0,p1], [p1,p2], ...` and sums.
/// Useful when the integrand has kinks or widely varying scales.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<SpecialValue> {
    let mut value = 0.0;
    let mut error = 0.0;
    for w in breakpoints.windows(2) {
        let r = integrate(&f, w[0], w[1], spec)?;
        value += r.value;
        error += r.est_error;
    }
    Ok(SpecialValue::new(value, error))
}

/// Integrates a non-negative integrand that decays to zero over
/// `[lower, upper]`, where `upper` may be huge or infinite.
///
/// The integrand is scanned on the geometric grid `lower + h 2^k`; the
/// domain is cut where every later grid value is below `cutoff` times the
/// peak, and the rest is integrated panel by panel so each panel sees a
/// single length scale.
pub fn integrate_decaying<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    h: f64,
    cutoff: f64,
    spec: &QuadratureSpec,
) -> Result<SpecialValue> {
    if !(h > 0.0) || !lower.is_finite() {
        return domain("integrate_decaying needs a finite lower bound and h > 0");
    }
    if upper <= lower {
        return Ok(SpecialValue::exact(0.0));
    }
    let mut grid = vec![lower];
    let mut step = h;
    while grid.len() < 1100 {
        let x = lower + step;
        if x >= upper || !x.is_finite() {
            if upper.is_finite() {
                grid.push(upper);
            }
            break;
        }
        grid.push(x);
        step *= 2.0;
    }
    let vals: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let y = f(x).abs();
            if y.is_finite() {
                y
            } else {
                0.0
            }
        })
        .collect();
    let peak = vals.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        // Sample points missed everything; fall back to the plain rule.
        return integrate(&f, lower, grid[grid.len() - 1], spec);
    }
    let mut last = grid.len() - 1;
    while last > 1 && vals[last] < cutoff * peak && vals[last - 1] < cutoff * peak {
        last -= 1;
    }
    integrate_panels(&f, &grid[..=last], spec)
}
