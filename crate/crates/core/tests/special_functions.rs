//! Special functions against brute-force quadrature of their defining
//! integrals. The oracle is a composite Gauss–Legendre rule with its own node
//! generator, so it shares no code with the library integrator.

use proptest::prelude::*;
use wpnet_core::numerics::{
    exp_integral_ei, exp_integral_en, integrate, upper_incomplete_gamma_reg, QuadratureSpec,
};

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn oracle<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let gl = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for &(x, w) in &gl {
            s += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

/// E_ν(z) with t = e^y: ∫_0^∞ exp(-z e^y + (1-ν) y) dy.
fn en_oracle(nu: f64, z: f64) -> f64 {
    let upper = (800.0 / z).ln().max(1.0);
    oracle(|y| (-z * y.exp() + (1.0 - nu) * y).exp(), 0.0, upper, 4000)
}

/// Γ(s, x) with t = e^y over [ln x, ln 800]; Γ(s) likewise from a deep
/// lower cutoff.
fn upper_gamma_oracle(s: f64, x: f64) -> f64 {
    let lo = if x > 0.0 { x.ln() } else { -60.0 / s.min(1.0) };
    oracle(|y| (-y.exp() + s * y).exp(), lo, 800f64.ln(), 6000)
}

fn q_oracle(s: f64, x: f64) -> f64 {
    upper_gamma_oracle(s, x) / upper_gamma_oracle(s, 0.0)
}

fn ei_oracle(x: f64) -> f64 {
    let lo = (-x).ln();
    -oracle(|y| (-y.exp()).exp(), lo, 800f64.ln().max(lo + 1.0), 4000)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn oracle_sanity() {
    // E_1(1) and Γ(3) as checks on the oracle itself.
    assert!(rel(en_oracle(1.0, 1.0), 0.219_383_934_395_520_3) < 1e-13);
    assert!(rel(upper_gamma_oracle(3.0, 0.0), 2.0) < 1e-13);
}

#[test]
fn en_matches_defining_integral_on_grid() {
    let orders = [0.0, 0.3, 0.5, 0.9, 1.0, 1.3, 1.35, 2.0, 2.6, 5.4];
    let zs = log_grid(1e-3, 30.0, 5);
    let mut worst: f64 = 0.0;
    for &nu in &orders {
        for &z in &zs {
            let got = exp_integral_en(nu, z).unwrap().value;
            let want = en_oracle(nu, z);
            worst = worst.max(rel(got, want));
            assert!(rel(got, want) < 1e-10, "E_{nu}({z}) = {got:e}, oracle {want:e}");
        }
    }
    eprintln!("E_nu worst relative error {worst:e}");
}

#[test]
fn en_order_one_point_three_small_argument() {
    let z = 0.003_141_6;
    let got = exp_integral_en(1.3, z).unwrap().value;
    assert!(rel(got, en_oracle(1.3, z)) < 1e-10);
}

#[test]
fn ei_matches_defining_integral_on_grid() {
    for x in log_grid(1e-4, 50.0, 50) {
        let got = exp_integral_ei(-x).unwrap().value;
        let want = ei_oracle(-x);
        assert!(rel(got, want) < 1e-10, "Ei(-{x}) = {got:e}, oracle {want:e}");
    }
    let pi = std::f64::consts::PI;
    let v = exp_integral_ei(-pi).unwrap().value;
    assert!(rel(v, ei_oracle(-pi)) < 1e-12);
    assert!((v + 0.010_906_300_899_274).abs() < 1e-14, "Ei(-pi) = {v}");
}

#[test]
fn q_matches_defining_integral_on_grid() {
    let shapes = [0.5, 1.0, 1.35, 2.7, 8.0, 16.0, 32.0, 40.0, 3.3, 12.5];
    for &s in &shapes {
        for k in 0..5 {
            let x = (3.0 * s + 10.0) * k as f64 / 4.0;
            let got = upper_incomplete_gamma_reg(s, x).unwrap();
            let want = q_oracle(s, x);
            assert!(rel(got, want) < 1e-10, "Q({s}, {x}) = {got:e}, oracle {want:e}");
        }
    }
}

#[test]
fn q_integer_shape_is_poisson_tail() {
    let poisson_tail = |n: usize, x: f64| {
        let mut term = (-x).exp();
        let mut sum = term;
        for k in 1..n {
            term *= x / k as f64;
            sum += term;
        }
        sum
    };
    let q = upper_incomplete_gamma_reg(32.0, 32.0).unwrap();
    assert!((q - poisson_tail(32, 32.0)).abs() < 1e-12);
    for n in [1usize, 2, 8, 16, 32] {
        for x in [0.1, 1.0, 5.0, 20.0, 40.0] {
            let q = upper_incomplete_gamma_reg(n as f64, x).unwrap();
            assert!((q - poisson_tail(n, x)).abs() < 1e-12, "Q({n}, {x})");
        }
    }
}

#[test]
fn q_is_one_at_zero_and_non_increasing() {
    for s in [0.3, 1.0, 2.7, 16.0, 32.0] {
        assert_eq!(upper_incomplete_gamma_reg(s, 0.0).unwrap(), 1.0);
        let mut prev = 1.0;
        for i in 1..200 {
            let q = upper_incomplete_gamma_reg(s, i as f64 * 0.5).unwrap();
            assert!(q <= prev + 1e-15, "Q({s}, .) increased");
            prev = q;
        }
    }
}

#[test]
fn e1_agrees_with_minus_ei() {
    for z in log_grid(1e-4, 50.0, 60) {
        let en = exp_integral_en(1.0, z).unwrap().value;
        let ei = exp_integral_ei(-z).unwrap().value;
        assert!(rel(en, -ei) < 1e-10, "z = {z}: {en:e} vs {ei:e}");
    }
}

#[test]
fn ei_vanishes_at_minus_infinity() {
    assert!(exp_integral_ei(-50.0).unwrap().value.abs() < 1e-20);
    assert!(exp_integral_ei(-50.0).unwrap().value < 0.0);
}

proptest! {
    #[test]
    fn integration_is_additive(a in -3.0f64..0.0, b in 0.0f64..2.0, c in 2.0f64..6.0) {
        let s = QuadratureSpec::default();
        let f = |x: f64| (x.sin() + 1.5) * (-0.1 * x * x).exp();
        let ab = integrate(f, a, b, &s).unwrap();
        let bc = integrate(f, b, c, &s).unwrap();
        let ac = integrate(f, a, c, &s).unwrap();
        let tol = ab.est_error + bc.est_error + ac.est_error + 1e-8 * ac.value.abs();
        prop_assert!((ab.value + bc.value - ac.value).abs() <= tol);
    }

    #[test]
    fn special_values_carry_finite_errors(nu in 0.0f64..6.0, z in 1e-3f64..40.0) {
        let v = exp_integral_en(nu, z).unwrap();
        prop_assert!(v.est_error.is_finite() && v.est_error >= 0.0);
        prop_assert!(v.value > 0.0);
    }
}
