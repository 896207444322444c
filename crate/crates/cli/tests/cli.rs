//! End-to-end runs of the `wpnet` binary and of `run_experiment`.

use std::path::Path;
use std::process::{Command, Output};

use wpnet_cli::figures::FigureId;
use wpnet_cli::run::{
    run_experiment, ExperimentKind, ExperimentSpec, RunOptions, Sweep, TierSel, THROUGHPUT_TRIALS,
};
use wpnet_cli::table::data_rows;
use wpnet_core::netmodel::NetworkConfig;

fn wpnet(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpnet"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn spec(kind: ExperimentKind, sweep: Option<Sweep>, out: &Path) -> ExperimentSpec {
    ExperimentSpec {
        kind,
        config: NetworkConfig::default(),
        sweep,
        options: RunOptions {
            seed: 5,
            trials: Some(THROUGHPUT_TRIALS),
            mc: true,
        },
        output_path: out.to_path_buf(),
        command: "test".into(),
    }
}

#[test]
fn successful_run_exits_zero_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = wpnet(&["analyze", "energy", "--tier", "sub6", "--trials", "2000"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("energy_sub6.csv")).unwrap();
    assert!(csv.contains("# seed: 1\n"));
    assert!(csv.contains("# config_sha256: "));
    assert_eq!(data_rows(&csv).len(), 20);
}

#[test]
fn unknown_figure_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = wpnet(&["figure", "fig9"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_sweep_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    for s in ["p_th=3,2", "nonsense=1", "p_th="] {
        let o = wpnet(&["analyze", "energy", "--no-mc", "--sweep", s], dir.path());
        assert_eq!(o.status.code(), Some(2), "{s}");
    }
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    for text in ["sub6.alpha = 1.5\n", "sub6.bogus = 1\n", "tau = abc\n"] {
        std::fs::write(&bad, text).unwrap();
        let o = wpnet(
            &["--config", bad.to_str().unwrap(), "analyze", "energy", "--no-mc"],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(2), "{text}");
    }
    let o = wpnet(&["--config", "/nonexistent/x.cfg", "analyze", "energy"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_error_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "# comment\nsub6.power = 30 furlongs\n").unwrap();
    let o = wpnet(&["--config", bad.to_str().unwrap(), "analyze", "energy"], dir.path());
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(2));
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn numeric_failure_exits_one_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = wpnet(
        &["analyze", "throughput", "--tier", "sub6", "--no-mc", "--sweep", "sub6.alpha=2,2.6"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("throughput_sub6.csv")).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.ends_with(",error"));
    let rows = data_rows(&csv);
    assert!(rows[0].contains("NaN") && rows[0].ends_with('"'));
    assert!(!rows[1].contains("NaN"));
}

#[test]
fn config_file_values_reach_the_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("n8.cfg");
    std::fs::write(&cfg, "sub6.antennas = 8\nsub6.power = 30 dBm\n").unwrap();
    let o = wpnet(
        &["--config", cfg.to_str().unwrap(), "analyze", "energy", "--tier", "sub6", "--no-mc"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("energy_sub6.csv")).unwrap();
    assert!(csv.contains("# config: sub6.antennas = 8\n"));
    assert!(csv.contains("# trials: none\n"));
}

#[test]
fn solve_and_simulate_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = wpnet(&["solve", "density", "--what", "sub6-rate", "--rate", "50Mbps"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("solve_sub6_rate.csv")).unwrap();
    assert_eq!(data_rows(&csv).len(), 1);
    let o = wpnet(
        &["simulate", "--what", "directed", "--tier", "sub6", "--trials", "1000"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let samples = std::fs::read_to_string(dir.path().join("samples_directed_sub6.csv")).unwrap();
    assert!(samples.starts_with("trial,value\n"));
    assert_eq!(samples.lines().count(), 1001);
    // mmWave rates need the LoS ball.
    let o = wpnet(&["solve", "density", "--what", "mm-rate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_reproduce_data_rows() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "9", "analyze", "association", "--trials", "5000"];
    assert_eq!(wpnet(&args, a.path()).status.code(), Some(0));
    assert_eq!(wpnet(&args, b.path()).status.code(), Some(0));
    let read = |d: &Path| std::fs::read_to_string(d.join("association.csv")).unwrap();
    let (ra, rb) = (read(a.path()), read(b.path()));
    assert_eq!(data_rows(&ra), data_rows(&rb));
    // Only the echoed command (with its --out path) differs.
    let meta = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| l.starts_with('#') && !l.starts_with("# command"))
            .map(String::from)
            .collect()
    };
    assert_eq!(meta(&ra), meta(&rb));
}

#[test]
fn energy_sweep_ccdf_columns_are_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    let kind = ExperimentKind::EnergyCoverage {
        tiers: TierSel::Both,
        p_th: 1e-4,
    };
    let sweep = Sweep::parse("p_th=lin(-34,0,20)dBm").unwrap();
    for (_, t) in run_experiment(&spec(kind, Some(sweep), dir.path())).unwrap() {
        for col in ["analytic", "mc_mean"] {
            let v = t.column(col).unwrap();
            assert!(v.windows(2).all(|w| w[1] <= w[0]), "{col}: {v:?}");
        }
    }
}

#[test]
fn throughput_kappa_sweep_lower_below_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let kind = ExperimentKind::Throughput {
        tiers: Some(TierSel::Sub6),
    };
    let sweep = Sweep::parse("sub6.kappa=1,2,5,10,20,50,100,200,500").unwrap();
    let tables = run_experiment(&spec(kind, Some(sweep), dir.path())).unwrap();
    let t = &tables[0].1;
    let (lo, ex, x) = (
        t.column("analytic_lower").unwrap(),
        t.column("analytic").unwrap(),
        t.column("x").unwrap(),
    );
    for i in 0..x.len() {
        assert!(lo[i] <= ex[i], "kappa {}: lower {} > analytic {}", x[i], lo[i], ex[i]);
    }
}

#[test]
fn fig6_mmwave_beats_sub6_at_every_density() {
    let dir = tempfile::tempdir().unwrap();
    let tables = run_experiment(&spec(ExperimentKind::Figure(FigureId::Fig6), None, dir.path())).unwrap();
    let col = |name: &str, c: &str| {
        let t = &tables.iter().find(|(p, _)| p.ends_with(name)).unwrap().1;
        t.column(c).unwrap()
    };
    let (sub6, mm) = (col("fig6_sub6.csv", "analytic"), col("fig6_mmwave.csv", "analytic"));
    assert_eq!(col("fig6_sub6.csv", "x"), col("fig6_mmwave.csv", "x"));
    assert!(sub6.iter().zip(&mm).all(|(s, m)| m > s), "{sub6:?} {mm:?}");
    let (sub6, mm) = (col("fig6_sub6.csv", "mc_ci_hi"), col("fig6_mmwave.csv", "mc_ci_lo"));
    assert!(sub6.iter().zip(&mm).all(|(s, m)| m > s));
}
