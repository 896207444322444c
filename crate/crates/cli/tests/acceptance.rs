//! The ten acceptance criteria, one pass/fail line each.
//!
//! Every criterion runs even if an earlier one fails; the test fails if any
//! of them does. All simulations share one seed, fixed up front.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use wpnet_cli::figures::FigureId;
use wpnet_cli::run::{run_experiment, ExperimentKind, ExperimentSpec, RunOptions};
use wpnet_cli::table::{data_rows, ResultTable};
use wpnet_core::energy::{
    ambient_coverage_bound_sub6, ambient_moments_sub6, association_probabilities, directed_coverage_mm,
    directed_coverage_sub6, directed_coverage_sub6_large_n, required_sub6_density,
};
use wpnet_core::mcsim::{
    mc_ambient_moments_sub6, mc_ambient_power, mc_association, mc_directed_power, mc_uplink_throughput, Tier,
    UplinkOptions,
};
use wpnet_core::netmodel::{dbm_to_watts, freq_constant_beta, BlockageModel, NetworkConfig, SectoredPattern};
use wpnet_core::numerics::{exp_integral_ei, exp_integral_en, upper_incomplete_gamma_reg};
use wpnet_core::throughput::{
    kappa_threshold_sub6, mm_density_threshold, throughput_mm_exact, throughput_mm_lower,
    throughput_mm_noise_limited, throughput_sub6_exact, throughput_sub6_lower,
};

const SEED: u64 = 1;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dbm_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| dbm_to_watts(lo + (hi - lo) * i as f64 / (n - 1) as f64))
        .collect()
}

fn fig1() -> NetworkConfig {
    NetworkConfig::default()
}

fn fig4(kappa: f64, n: u32) -> NetworkConfig {
    let mut c = NetworkConfig::default();
    c.sub6.ue_density = 0.001;
    c.sub6.bs_density = kappa * 0.001;
    c.sub6.antennas = n;
    c.sub6.pathloss.alpha = 2.6;
    c.sub6.pathloss.beta = freq_constant_beta(1e9).unwrap();
    c
}

fn fig5(lam: f64) -> NetworkConfig {
    let mut c = fig4(2.0, 32);
    c.mmwave.bs_density = lam;
    c.mmwave.ue_density = 0.01;
    c.mmwave.blockage = BlockageModel::LoSBall { r_los: 20.0 };
    c.mmwave.ue_pattern = SectoredPattern::from_db_deg(3.0, -3.0, 45.0);
    c
}

const KAPPAS: [f64; 9] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0];
const DENSITIES: [f64; 9] = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5];

fn energy_coverage_vs_simulation() -> Outcome {
    let cfg = fig1();
    let grid = dbm_grid(-34.0, 0.0, 20);
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for tier in [Tier::Sub6, Tier::MmWave] {
        let ccdf = mc_directed_power(&cfg, tier, 100_000, SEED).unwrap();
        for &p in &grid {
            let v = match tier {
                Tier::Sub6 => directed_coverage_sub6(&cfg, p).unwrap().value,
                Tier::MmWave => directed_coverage_mm(&cfg, p).unwrap().value,
            };
            let e = ccdf.ccdf(p);
            let gap = (v - e.mean).abs();
            worst = worst.max(gap);
            if gap > e.half_width().max(0.015) {
                bad.push(format!("{tier:?} at {p:e} W: {v} vs {}", e.mean));
            }
        }
    }
    check(bad.is_empty(), format!("max |analytic - MC| = {worst:.4}; {}", bad.join("; ")))
}

fn los_ball_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let lam = 10f64.powf(-3.0 + 3.0 * i as f64 / 9.0);
        for p in dbm_grid(-30.0, 10.0, 10) {
            let mut cfg = NetworkConfig::default();
            cfg.mmwave.bs_density = lam;
            cfg.mmwave.blockage = BlockageModel::LoSBall { r_los: 20.0 };
            let m = cfg.mmwave;
            let reach =
                (m.efficiency * m.power * m.bs_pattern.main_gain * m.ue_pattern.main_gain * m.los.beta / p)
                    .powf(1.0 / m.los.alpha);
            let xi = reach.min(20.0);
            let want = 1.0 - (-PI * lam * xi * xi).exp();
            let got = directed_coverage_mm(&cfg, p).unwrap().value;
            worst = worst.max((got - want).abs());
        }
    }
    check(worst <= 1e-6, format!("max deviation {worst:e} over 10x10 grid"))
}

fn inverse_solver_round_trips() -> Outcome {
    let cfg = fig1();
    let mut e1: f64 = 0.0;
    for eps in [0.01, 0.1, 0.5, 0.9, 0.99] {
        for p in dbm_grid(-30.0, 0.0, 5) {
            let mut c = cfg;
            c.sub6.bs_density = required_sub6_density(&cfg, p, eps).unwrap();
            e1 = e1.max((directed_coverage_sub6_large_n(&c, p).unwrap() - eps).abs());
        }
    }
    let mut e4: f64 = 0.0;
    for target in [1e6, 5e6, 5e7, 2e8] {
        for n in [8, 16] {
            let k = kappa_threshold_sub6(&fig4(1.0, n), target).unwrap();
            let got = throughput_sub6_lower(&fig4(k, n)).unwrap().bits_per_second;
            e4 = e4.max((got - target).abs() / target);
        }
    }
    let mut e5: f64 = 0.0;
    for target in [1e8, 5e8, 1e9, 2e9] {
        let lam = mm_density_threshold(&fig5(0.01), target).unwrap();
        let got = throughput_mm_lower(&fig5(lam)).unwrap().bits_per_second;
        e5 = e5.max((got - target).abs() / target);
    }
    check(
        e1 <= 1e-12 && e4 <= 1e-9 && e5 <= 1e-6,
        format!("sub-6 density {e1:e} (abs), kappa {e4:e} (rel), mmWave density {e5:e} (rel)"),
    )
}

fn ambient_moments_vs_simulation() -> Outcome {
    let mut cfg = NetworkConfig::default();
    cfg.sub6.pathloss.alpha = 2.6;
    cfg.mmwave.bs_density = 0.5;
    let m = ambient_moments_sub6(&cfg).unwrap();
    let est = mc_ambient_moments_sub6(&cfg, 100_000, SEED).unwrap();
    let mean_ok = est.mean.contains(m.mean);
    let var_ok = est.variance.contains(m.variance);
    let k = cfg.sub6.efficiency * cfg.sub6.power;
    let ccdf = mc_ambient_power(&cfg, Tier::Sub6, 100_000, SEED, true).unwrap();
    let mut bound_bad = Vec::new();
    for p in dbm_grid(-40.0, -5.0, 20).into_iter().filter(|&p| p > k * m.mean) {
        let b = ambient_coverage_bound_sub6(&cfg, p).unwrap();
        let e = ccdf.ccdf(p).mean;
        if b < e {
            bound_bad.push(format!("{p:e}: bound {b} < {e}"));
        }
    }
    check(
        mean_ok && var_ok && bound_bad.is_empty(),
        format!(
            "mean {:e} in [{:e}, {:e}]: {mean_ok}; variance {:e} in [{:e}, {:e}]: {var_ok}; bound {}",
            m.mean,
            est.mean.ci99.0,
            est.mean.ci99.1,
            m.variance,
            est.variance.ci99.0,
            est.variance.ci99.1,
            if bound_bad.is_empty() { "holds".into() } else { bound_bad.join("; ") }
        ),
    )
}

fn association_vs_simulation() -> Outcome {
    let mut bad = Vec::new();
    let mut worst_sum: f64 = 0.0;
    let lams: Vec<f64> = (0..10).map(|i| 10f64.powf(-4.0 + 3.0 * i as f64 / 9.0)).collect();
    let mut h = [[0.0; 10]; 2];
    for (j, n) in [16u32, 32].into_iter().enumerate() {
        for (i, &lam) in lams.iter().enumerate() {
            let mut cfg = NetworkConfig::default();
            cfg.mmwave.bs_density = 0.01;
            cfg.sub6.bs_density = lam;
            cfg.sub6.antennas = n;
            let a = association_probabilities(&cfg).unwrap();
            let e = mc_association(&cfg, 100_000, SEED).unwrap();
            worst_sum = worst_sum.max((a.sum() - 1.0).abs());
            for (name, v, est) in [
                ("sub6", a.p_sub6, e.p_sub6),
                ("los", a.p_mm_los, e.p_mm_los),
                ("nlos", a.p_mm_nlos, e.p_mm_nlos),
            ] {
                if !est.contains(v) {
                    bad.push(format!("N={n} lam={lam:.2e} {name}: {v} vs {:?}", est.ci99));
                }
            }
            h[j][i] = a.p_sub6;
        }
    }
    let mono_lam = h.iter().all(|r| r.windows(2).all(|w| w[1] >= w[0]));
    let mono_n = (0..10).all(|i| h[1][i] >= h[0][i]);
    check(
        bad.is_empty() && worst_sum <= 1e-6 && mono_lam && mono_n,
        format!(
            "CI misses {}; max |sum - 1| {worst_sum:e}; monotone in lambda {mono_lam}, in N {mono_n}{}",
            bad.len(),
            if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }
        ),
    )
}

fn throughput_bounds_and_agreement() -> Outcome {
    let mut bad = Vec::new();
    for n in [8, 16] {
        for kappa in KAPPAS {
            let cfg = fig4(kappa, n);
            let exact = throughput_sub6_exact(&cfg).unwrap().bits_per_second;
            let lower = throughput_sub6_lower(&cfg).unwrap().bits_per_second;
            if lower > exact {
                bad.push(format!("sub6 N={n} kappa={kappa}: lower/exact {:.4}", lower / exact));
            }
            let est = mc_uplink_throughput(&cfg, Tier::Sub6, 10_000, SEED, UplinkOptions::default()).unwrap();
            if !est.contains(exact) {
                bad.push(format!("sub6 N={n} kappa={kappa}: exact {exact:e} outside {:?}", est.ci99));
            }
        }
    }
    let snr = UplinkOptions {
        interference: false,
        ..UplinkOptions::default()
    };
    for lam in DENSITIES {
        let cfg = fig5(lam);
        let nl = throughput_mm_noise_limited(&cfg).unwrap().bits_per_second;
        let exact = throughput_mm_exact(&cfg).unwrap().bits_per_second;
        let lower = throughput_mm_lower(&cfg).unwrap().bits_per_second;
        if lower > nl {
            bad.push(format!("mm {lam}: lower > noise-limited"));
        }
        if exact > nl {
            bad.push(format!("mm {lam}: exact > noise-limited"));
        }
        let a = mc_uplink_throughput(&cfg, Tier::MmWave, 10_000, SEED, UplinkOptions::default()).unwrap();
        let b = mc_uplink_throughput(&cfg, Tier::MmWave, 10_000, SEED, snr).unwrap();
        let gap = (b.mean - a.mean).abs() / b.mean;
        if gap > 0.05 {
            bad.push(format!("mm {lam}: SINR vs SNR {:.1}%", 100.0 * gap));
        }
    }
    check(bad.is_empty(), format!("{} violations: {}", bad.len(), bad.join("; ")))
}

fn scaling_laws() -> Outcome {
    let lower = |kappa: f64, n: u32| throughput_sub6_lower(&fig4(kappa, n)).unwrap().bits_per_second;
    let cfg = fig4(1e4, 16);
    let unit = (1.0 - cfg.harvest_fraction) * cfg.sub6.bandwidth;
    let dn = lower(1e4, 32) - lower(1e4, 16);
    let dk = lower(2e4, 16) - lower(1e4, 16);
    let want_k = unit * cfg.sub6.pathloss.alpha / 2.0;
    let en = (dn - unit).abs() / unit;
    let ek = (dk - want_k).abs() / want_k;
    check(
        en <= 1e-3 && ek <= 1e-2,
        format!("doubling N off by {:.4}%, doubling kappa off by {:.4}%", 100.0 * en, 100.0 * ek),
    )
}

fn figure_tables(id: FigureId, dir: &Path) -> Vec<(String, ResultTable)> {
    let spec = ExperimentSpec {
        kind: ExperimentKind::Figure(id),
        config: NetworkConfig::default(),
        sweep: None,
        options: RunOptions {
            seed: SEED,
            trials: None,
            mc: true,
        },
        output_path: dir.to_path_buf(),
        command: format!("figure {id:?}"),
    };
    run_experiment(&spec)
        .unwrap()
        .into_iter()
        .map(|(p, t)| (p.file_stem().unwrap().to_string_lossy().into_owned(), t))
        .collect()
}

fn figure_ordering() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let f6 = figure_tables(FigureId::Fig6, dir.path());
    let col = |ts: &[(String, ResultTable)], name: &str, c: &str| {
        ts.iter().find(|(n, _)| n == name).unwrap().1.column(c).unwrap()
    };
    let (s, m) = (col(&f6, "fig6_sub6", "analytic"), col(&f6, "fig6_mmwave", "analytic"));
    let (s_hi, m_lo) = (col(&f6, "fig6_sub6", "mc_ci_hi"), col(&f6, "fig6_mmwave", "mc_ci_lo"));
    let fig6_ok = s.iter().zip(&m).all(|(a, b)| b > a) && s_hi.iter().zip(&m_lo).all(|(a, b)| b > a);

    let f7 = figure_tables(FigureId::Fig7, dir.path());
    let curves: Vec<Vec<f64>> = ["fig7_28ghz", "fig7_38ghz", "fig7_60ghz", "fig7_73ghz"]
        .iter()
        .map(|n| col(&f7, n, "analytic"))
        .collect();
    let top = (0..curves[0].len()).all(|i| curves[1..].iter().all(|c| curves[0][i] > c[i]));
    let gap: Vec<f64> = curves[0].iter().zip(&curves[2]).map(|(a, b)| a - b).collect();
    let widening = gap.windows(2).all(|w| w[1] > w[0]);
    check(
        fig6_ok && top && widening,
        format!("fig6 mmWave above sub-6 {fig6_ok}; fig7 28 GHz on top {top}; 28-60 GHz gap widens {widening}"),
    )
}

/// Composite 20-point Gauss-Legendre oracle, independent of the library
/// integrator.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
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
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn oracle<F: Fn(f64) -> f64>(gl: &[(f64, f64)], f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            0.5 * h * gl.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>()
        })
        .sum()
}

fn special_functions() -> Outcome {
    let gl = gauss_legendre(20);
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let log_grid = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect()
    };
    // t = e^y in every defining integral.
    let en = |nu: f64, z: f64| {
        let upper = (800.0 / z).ln().max(1.0);
        oracle(&gl, |y| (-z * y.exp() + (1.0 - nu) * y).exp(), 0.0, upper, 4000)
    };
    let upper_gamma = |s: f64, x: f64| {
        let lo = if x > 0.0 { x.ln() } else { -60.0 / s.min(1.0) };
        oracle(&gl, |y| (-y.exp() + s * y).exp(), lo, 800f64.ln(), 6000)
    };
    let ei = |x: f64| {
        let lo = (-x).ln();
        -oracle(&gl, |y| (-y.exp()).exp(), lo, 800f64.ln().max(lo + 1.0), 4000)
    };
    let (mut w_en, mut w_ei, mut w_q): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for nu in [0.0, 0.3, 0.5, 0.9, 1.0, 1.3, 1.35, 2.0, 2.6, 5.4] {
        for z in log_grid(1e-3, 30.0, 5) {
            w_en = w_en.max(rel(exp_integral_en(nu, z).unwrap().value, en(nu, z)));
        }
    }
    for x in log_grid(1e-4, 50.0, 50) {
        w_ei = w_ei.max(rel(exp_integral_ei(-x).unwrap().value, ei(-x)));
    }
    for s in [0.5, 1.0, 1.35, 2.7, 8.0, 16.0, 32.0, 40.0, 3.3, 12.5] {
        for k in 0..5 {
            let x = (3.0 * s + 10.0) * k as f64 / 4.0;
            let want = upper_gamma(s, x) / upper_gamma(s, 0.0);
            w_q = w_q.max(rel(upper_incomplete_gamma_reg(s, x).unwrap(), want));
        }
    }
    check(
        w_en <= 1e-10 && w_ei <= 1e-10 && w_q <= 1e-10,
        format!("worst relative error E_nu {w_en:e}, Ei {w_ei:e}, Q {w_q:e}"),
    )
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 4] = [
        &["analyze", "energy", "--trials", "20000"],
        &["analyze", "association", "--trials", "5000"],
        &["analyze", "throughput", "--tier", "sub6", "--trials", "2000", "--sweep", "sub6.kappa=1,10,100"],
        &["simulate", "--what", "ambient", "--trials", "5000"],
    ];
    let run = |threads: &str, args: &[&str], dir: &Path| {
        let o = Command::new(env!("CARGO_BIN_EXE_wpnet"))
            .env("WPT_THREADS", threads)
            .args(["--seed", "1"])
            .args(args)
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let mut files: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        files
            .into_iter()
            .map(|p| {
                let text = std::fs::read_to_string(&p).unwrap();
                let rows: Vec<String> = if text.starts_with('#') {
                    data_rows(&text).into_iter().map(String::from).collect()
                } else {
                    text.lines().map(String::from).collect()
                };
                (p.file_name().unwrap().to_string_lossy().into_owned(), rows)
            })
            .collect::<Vec<_>>()
    };
    let mut compared = 0;
    let mut bad = Vec::new();
    for args in commands {
        let runs: Vec<_> = ["1", "3", "1"]
            .iter()
            .map(|t| {
                let dir = tempfile::tempdir().unwrap();
                run(t, args, dir.path())
            })
            .collect();
        compared += runs[0].len();
        if runs[0] != runs[1] || runs[0] != runs[2] {
            bad.push(args.join(" "));
        }
    }
    check(
        bad.is_empty(),
        format!("{compared} files compared across 1/3/1 threads; differing: {bad:?}"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("energy coverage vs MC", Duration::from_secs(60), energy_coverage_vs_simulation),
        ("LoS-ball closed form", Duration::from_secs(5), los_ball_closed_form),
        ("solver round trips", Duration::from_secs(3), inverse_solver_round_trips),
        ("ambient moments", Duration::from_secs(120), ambient_moments_vs_simulation),
        ("association", Duration::from_secs(300), association_vs_simulation),
        ("throughput bounds and MC", Duration::from_secs(600), throughput_bounds_and_agreement),
        ("scaling laws", Duration::from_secs(1), scaling_laws),
        ("figure ordering", Duration::from_secs(600), figure_ordering),
        ("special functions", Duration::from_secs(5), special_functions),
        ("determinism", Duration::from_secs(300), determinism),
    ];
    let mut failed = Vec::new();
    let mut lines = Vec::new();
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if took <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(d) => (false, d),
        };
        let line = format!(
            "acceptance {:>2} {}: {name} ({:.1} s, budget {} s) {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
        println!("{line}");
        lines.push(line);
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}\n{}", lines.join("\n"));
}
