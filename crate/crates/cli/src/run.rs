//! Experiments: sweeps over a config parameter or threshold, evaluated
//! analytically and (optionally) by simulation, collected into tables.

use std::path::{Path, PathBuf};

use thiserror::Error;
use wpnet_core::energy::{
    ambient_coverage_bound_sub6, ambient_moments_sub6, association_probabilities, directed_coverage_mm,
    directed_coverage_sub6, directed_coverage_sub6_large_n, mm_density_for_ambient_dominance,
    required_sub6_density, sub6_density_for_mm_dominance,
};
use wpnet_core::mcsim::{
    mc_ambient_moments_sub6, mc_ambient_power, mc_association, mc_directed_power, mc_uplink_throughput,
    write_samples_csv, EmpiricalCcdf, MCEstimate, Tier, UplinkOptions,
};
use wpnet_core::netmodel::{dbm_to_watts, NetworkConfig};
use wpnet_core::throughput::{
    cross_tier_verdict, kappa_threshold_sub6, mm_density_threshold, throughput_mm_exact, throughput_mm_lower,
    throughput_mm_noise_limited, throughput_sub6_exact, throughput_sub6_lower, Winner,
};

use crate::config::{apply_assignment, parse_value, quantity_of, ConfigError, Quantity};
use crate::figures::{reproduce_figure, FigureId};
use crate::table::ResultTable;

pub const COVERAGE_TRIALS: usize = 100_000;
pub const THROUGHPUT_TRIALS: usize = 10_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numeric(#[from] wpnet_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    /// Some rows failed; the tables were still written.
    #[error("{failed} row(s) failed, first: {first}")]
    Partial { failed: usize, first: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) | CliError::Partial { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub trials: Option<usize>,
    pub mc: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: None,
            mc: true,
        }
    }
}

impl RunOptions {
    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TierSel {
    Sub6,
    MmWave,
    Both,
}

impl TierSel {
    fn tiers(self) -> &'static [Tier] {
        match self {
            TierSel::Sub6 => &[Tier::Sub6],
            TierSel::MmWave => &[Tier::MmWave],
            TierSel::Both => &[Tier::Sub6, Tier::MmWave],
        }
    }
}

pub fn tier_name(t: Tier) -> &'static str {
    match t {
        Tier::Sub6 => "sub6",
        Tier::MmWave => "mmwave",
    }
}

/// A parameter and the strictly increasing grid it runs over.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub values: Vec<f64>,
}

/// Sweepable names besides the numeric config keys.
pub const SWEEP_EXTRAS: &[&str] = &["p_th", "sub6.kappa", "mmwave.kappa"];

fn sweep_quantity(name: &str) -> Option<Quantity> {
    match name {
        "p_th" => Some(Quantity::Power),
        "sub6.kappa" | "mmwave.kappa" => Some(Quantity::Number),
        _ => quantity_of(name).filter(|q| *q != Quantity::Word),
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.log10(), b.log10(), n)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

impl Sweep {
    pub fn new(name: &str, values: Vec<f64>) -> Result<Self, CliError> {
        if sweep_quantity(name).is_none() {
            return Err(CliError::Usage(format!("`{name}` cannot be swept")));
        }
        if values.is_empty() {
            return Err(CliError::Usage("sweep grid is empty".into()));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Usage("sweep grid must be strictly increasing".into()));
        }
        Ok(Self {
            name: name.to_string(),
            values,
        })
    }

    /// `name=v1,v2,...`, `name=lin(a,b,n)` or `name=log(a,b,n)`; values
    /// take the parameter's units, and a unit after the closing
    /// parenthesis applies to every point (`p_th=lin(-34,0,20)dBm`).
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let usage = |m: String| CliError::Usage(format!("bad sweep `{spec}`: {m}"));
        let (name, grid) = spec
            .split_once('=')
            .ok_or_else(|| usage("expected name=grid".into()))?;
        let name = name.trim();
        let q = sweep_quantity(name).ok_or_else(|| usage(format!("`{name}` cannot be swept")))?;
        let grid = grid.trim();
        let value = |t: &str| parse_value(t, q).map_err(|(_, m)| usage(m));
        let values = if let Some(rest) = grid.strip_prefix("lin(").or_else(|| grid.strip_prefix("log(")) {
            let (args, unit) = rest
                .split_once(')')
                .ok_or_else(|| usage("missing `)`".into()))?;
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            let [a, b, n] = parts[..] else {
                return Err(usage("expected three arguments".into()));
            };
            let parse_num = |t: &str| t.parse::<f64>().map_err(|_| usage(format!("`{t}` is not a number")));
            let n: usize = n.parse().map_err(|_| usage(format!("`{n}` is not a count")))?;
            let (a, b) = (parse_num(a)?, parse_num(b)?);
            let raw = if grid.starts_with("log(") {
                if !(a > 0.0 && b > 0.0) {
                    return Err(usage("log grids need positive ends".into()));
                }
                logspace(a, b, n)
            } else {
                linspace(a, b, n)
            };
            raw.iter()
                .map(|x| value(&format!("{x:?} {unit}")))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            grid.split(',').map(value).collect::<Result<Vec<_>, _>>()?
        };
        Sweep::new(name, values)
    }

    fn sweeps_threshold(&self) -> bool {
        self.name == "p_th"
    }

    /// Config at each grid point (unchanged for threshold sweeps).
    fn configs(&self, cfg: &NetworkConfig) -> Result<Vec<NetworkConfig>, CliError> {
        self.values
            .iter()
            .map(|&x| {
                let c = match self.name.as_str() {
                    "p_th" => *cfg,
                    "sub6.kappa" => {
                        let mut c = *cfg;
                        c.sub6.bs_density = x * c.sub6.ue_density;
                        c
                    }
                    "mmwave.kappa" => {
                        let mut c = *cfg;
                        c.mmwave.bs_density = x * c.mmwave.ue_density;
                        c
                    }
                    key => apply_assignment(cfg, key, x)?,
                };
                c.validate()
                    .map_err(|e| ConfigError::Validation(format!("{} = {x}: {e}", self.name)))?;
                Ok(c)
            })
            .collect()
    }
}

/// Named table, written as `<name>.csv`.
#[derive(Debug, Clone)]
pub struct Output {
    pub name: String,
    pub table: ResultTable,
}

const MC_COLUMNS: [&str; 3] = ["mc_mean", "mc_ci_lo", "mc_ci_hi"];

fn mc_cells(e: &MCEstimate) -> [f64; 3] {
    [e.mean, e.ci99.0, e.ci99.1]
}

/// One row per grid point; a failing row is kept with its message.
fn sweep_table<S, F>(columns: &[S], xs: &[f64], mut row: F) -> ResultTable
where
    S: AsRef<str>,
    F: FnMut(usize, f64) -> Result<Vec<f64>, CliError>,
{
    let mut t = ResultTable::new(columns);
    for (i, &x) in xs.iter().enumerate() {
        match row(i, x) {
            Ok(r) => t.push(r),
            Err(e) => t.push_error(x, e.to_string()),
        }
    }
    t
}

/// Threshold at each point: the swept value or the fixed `p_th`.
fn thresholds(sweep: &Sweep, p_th: f64) -> Vec<f64> {
    if sweep.sweeps_threshold() {
        sweep.values.clone()
    } else {
        vec![p_th; sweep.values.len()]
    }
}

/// CCDF columns from one shared run on threshold sweeps, else one run per
/// point.
fn coverage_table<A, M>(
    cfg: &NetworkConfig,
    sweep: &Sweep,
    p_th: f64,
    opts: &RunOptions,
    analytic_names: &[&str],
    analytic: A,
    simulate: M,
) -> Result<ResultTable, CliError>
where
    A: Fn(&NetworkConfig, f64) -> wpnet_core::Result<Vec<f64>>,
    M: Fn(&NetworkConfig, usize, u64) -> wpnet_core::Result<EmpiricalCcdf>,
{
    let configs = sweep.configs(cfg)?;
    let ths = thresholds(sweep, p_th);
    let mut cols = vec!["x", "p_th"];
    cols.extend_from_slice(analytic_names);
    if opts.mc {
        cols.extend(MC_COLUMNS);
    }
    let trials = opts.trials_or(COVERAGE_TRIALS);
    let shared = if opts.mc && sweep.sweeps_threshold() {
        Some(simulate(cfg, trials, opts.seed)?)
    } else {
        None
    };
    Ok(sweep_table(&cols, &sweep.values, |i, x| {
        let (c, p) = (&configs[i], ths[i]);
        let mut r = vec![x, p];
        r.extend(analytic(c, p)?);
        if opts.mc {
            let est = match &shared {
                Some(s) => s.ccdf(p),
                None => simulate(c, trials, opts.seed)?.ccdf(p),
            };
            r.extend(mc_cells(&est));
        }
        Ok(r)
    }))
}

pub fn directed_table(
    cfg: &NetworkConfig,
    tier: Tier,
    sweep: &Sweep,
    p_th: f64,
    opts: &RunOptions,
) -> Result<ResultTable, CliError> {
    let sim = |c: &NetworkConfig, n, seed| mc_directed_power(c, tier, n, seed);
    match tier {
        Tier::Sub6 => coverage_table(
            cfg,
            sweep,
            p_th,
            opts,
            &["analytic", "analytic_large_n"],
            |c, p| Ok(vec![directed_coverage_sub6(c, p)?.value, directed_coverage_sub6_large_n(c, p)?]),
            sim,
        ),
        Tier::MmWave => coverage_table(
            cfg,
            sweep,
            p_th,
            opts,
            &["analytic"],
            |c, p| Ok(vec![directed_coverage_mm(c, p)?.value]),
            sim,
        ),
    }
}

/// Sub-6 carries the Chebyshev bound as its analytic column; the mmWave
/// ambient coverage has no closed form and is simulated only.
pub fn ambient_table(
    cfg: &NetworkConfig,
    tier: Tier,
    sweep: &Sweep,
    p_th: f64,
    opts: &RunOptions,
) -> Result<ResultTable, CliError> {
    let sim = |c: &NetworkConfig, n, seed| mc_ambient_power(c, tier, n, seed, true);
    match tier {
        Tier::Sub6 => coverage_table(
            cfg,
            sweep,
            p_th,
            opts,
            &["analytic"],
            |c, p| Ok(vec![ambient_coverage_bound_sub6(c, p)?]),
            sim,
        ),
        Tier::MmWave => coverage_table(cfg, sweep, p_th, opts, &[], |_, _| Ok(vec![]), sim),
    }
}

/// Mean and variance of the sub-6 ambient power in watts. Threshold
/// sweeps give a single row at the config's own BS density.
pub fn ambient_moments_table(cfg: &NetworkConfig, sweep: &Sweep, opts: &RunOptions) -> Result<ResultTable, CliError> {
    let (xs, configs) = if sweep.sweeps_threshold() {
        (vec![cfg.sub6.bs_density], vec![*cfg])
    } else {
        (sweep.values.clone(), sweep.configs(cfg)?)
    };
    let mut cols = vec!["x", "mean", "variance"];
    if opts.mc {
        cols.extend([
            "mc_mean",
            "mc_mean_ci_lo",
            "mc_mean_ci_hi",
            "mc_variance",
            "mc_variance_ci_lo",
            "mc_variance_ci_hi",
        ]);
    }
    let trials = opts.trials_or(COVERAGE_TRIALS);
    Ok(sweep_table(&cols, &xs, |i, x| {
        let c = &configs[i];
        let k = c.sub6.efficiency * c.sub6.power;
        let m = ambient_moments_sub6(c)?;
        let mut r = vec![x, k * m.mean, k * k * m.variance];
        if opts.mc {
            let e = mc_ambient_moments_sub6(c, trials, opts.seed)?;
            r.extend(mc_cells(&e.mean).map(|v| k * v));
            r.extend(mc_cells(&e.variance).map(|v| k * k * v));
        }
        Ok(r)
    }))
}

pub fn association_table(cfg: &NetworkConfig, sweep: &Sweep, opts: &RunOptions) -> Result<ResultTable, CliError> {
    if sweep.sweeps_threshold() {
        return Err(CliError::Usage("association does not depend on p_th".into()));
    }
    let configs = sweep.configs(cfg)?;
    let mut cols: Vec<String> = ["x", "sub6", "mm_los", "mm_nlos"].map(String::from).to_vec();
    if opts.mc {
        for p in ["sub6", "mm_los", "mm_nlos"] {
            cols.extend(MC_COLUMNS.map(|s| format!("{p}_{s}")));
        }
    }
    let trials = opts.trials_or(COVERAGE_TRIALS);
    Ok(sweep_table(&cols, &sweep.values, |i, x| {
        let c = &configs[i];
        let a = association_probabilities(c)?;
        let mut r = vec![x, a.p_sub6, a.p_mm_los, a.p_mm_nlos];
        if opts.mc {
            let e = mc_association(c, trials, opts.seed)?;
            for est in [e.p_sub6, e.p_mm_los, e.p_mm_nlos] {
                r.extend(mc_cells(&est));
            }
        }
        Ok(r)
    }))
}

pub fn sub6_throughput_table(cfg: &NetworkConfig, sweep: &Sweep, opts: &RunOptions) -> Result<ResultTable, CliError> {
    if sweep.sweeps_threshold() {
        return Err(CliError::Usage("throughput does not depend on p_th".into()));
    }
    let configs = sweep.configs(cfg)?;
    let mut cols = vec!["x", "analytic", "analytic_lower"];
    if opts.mc {
        cols.extend(MC_COLUMNS);
    }
    let trials = opts.trials_or(THROUGHPUT_TRIALS);
    Ok(sweep_table(&cols, &sweep.values, |i, x| {
        let c = &configs[i];
        let mut r = vec![
            x,
            throughput_sub6_exact(c)?.bits_per_second,
            throughput_sub6_lower(c)?.bits_per_second,
        ];
        if opts.mc {
            let e = mc_uplink_throughput(c, Tier::Sub6, trials, opts.seed, UplinkOptions::default())?;
            r.extend(mc_cells(&e));
        }
        Ok(r)
    }))
}

/// mmWave throughput: exact, lower bound, noise-limited, and the SINR and
/// SNR simulations.
pub fn mm_throughput_table(cfg: &NetworkConfig, sweep: &Sweep, opts: &RunOptions) -> Result<ResultTable, CliError> {
    if sweep.sweeps_threshold() {
        return Err(CliError::Usage("throughput does not depend on p_th".into()));
    }
    let configs = sweep.configs(cfg)?;
    require_los_ball(cfg)?;
    let mut cols = vec!["x", "analytic", "analytic_lower", "noise_limited"];
    if opts.mc {
        cols.extend(MC_COLUMNS);
        cols.extend(["mc_snr_mean", "mc_snr_ci_lo", "mc_snr_ci_hi"]);
    }
    let trials = opts.trials_or(THROUGHPUT_TRIALS);
    Ok(sweep_table(&cols, &sweep.values, |i, x| {
        let c = &configs[i];
        let mut r = vec![
            x,
            throughput_mm_exact(c)?.bits_per_second,
            throughput_mm_lower(c)?.bits_per_second,
            throughput_mm_noise_limited(c)?.bits_per_second,
        ];
        if opts.mc {
            let sinr = mc_uplink_throughput(c, Tier::MmWave, trials, opts.seed, UplinkOptions::default())?;
            let snr = UplinkOptions {
                interference: false,
                ..UplinkOptions::default()
            };
            let snr = mc_uplink_throughput(c, Tier::MmWave, trials, opts.seed, snr)?;
            r.extend(mc_cells(&sinr));
            r.extend(mc_cells(&snr));
        }
        Ok(r)
    }))
}

fn require_los_ball(cfg: &NetworkConfig) -> Result<(), CliError> {
    if cfg.mmwave.blockage.los_ball_radius().is_none() {
        return Err(ConfigError::Validation(
            "mmWave throughput needs `mmwave.blockage = los_ball`".into(),
        )
        .into());
    }
    Ok(())
}

/// What `solve density` computes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveTarget {
    /// Sub-6 BS density for directed coverage `epsilon` at `p_th`.
    Sub6Coverage { p_th: f64, epsilon: f64 },
    /// Sub-6 density ratio for a lower-bound rate.
    Sub6Rate { rate: f64 },
    /// mmWave BS density for a lower-bound rate.
    MmRate { rate: f64 },
    /// Sub-6 density below which mmWave directed power wins at `p_th`.
    MmDominance { p_th: f64 },
    /// mmWave density whose ambient LoS power beats the sub-6 bound.
    AmbientDominance { p_th: f64 },
    CrossTier,
}

pub fn solve_table(cfg: &NetworkConfig, target: SolveTarget, opts: &RunOptions) -> Result<ResultTable, CliError> {
    let t = match target {
        SolveTarget::Sub6Coverage { p_th, epsilon } => {
            let mut t = ResultTable::new(&["p_th", "epsilon", "sub6_bs_density"]);
            t.push(vec![p_th, epsilon, required_sub6_density(cfg, p_th, epsilon)?]);
            t
        }
        SolveTarget::Sub6Rate { rate } => {
            let k = kappa_threshold_sub6(cfg, rate)?;
            let mut t = ResultTable::new(&["rate", "sub6_kappa", "sub6_bs_density"]);
            t.push(vec![rate, k, k * cfg.sub6.ue_density]);
            t
        }
        SolveTarget::MmRate { rate } => {
            require_los_ball(cfg)?;
            let mut t = ResultTable::new(&["rate", "mmwave_bs_density"]);
            t.push(vec![rate, mm_density_threshold(cfg, rate)?]);
            t
        }
        SolveTarget::MmDominance { p_th } => {
            let b = sub6_density_for_mm_dominance(cfg, p_th)?;
            let mut t = ResultTable::new(&["p_th", "sub6_bs_density", "unbounded"]);
            t.push(vec![p_th, b.value, if b.unbounded { 1.0 } else { 0.0 }]);
            t
        }
        SolveTarget::AmbientDominance { p_th } => {
            let trials = opts.trials_or(COVERAGE_TRIALS);
            let v = mm_density_for_ambient_dominance(cfg, p_th, trials, opts.seed)?;
            let mut t = ResultTable::new(&["p_th", "mmwave_bs_density"]);
            // NaN: the sub-6 bound is 1, so every density qualifies.
            t.push(vec![p_th, v.unwrap_or(f64::NAN)]);
            t
        }
        SolveTarget::CrossTier => {
            require_los_ball(cfg)?;
            let v = cross_tier_verdict(cfg)?;
            let winner = match v.winner_at_cfg {
                Winner::Sub6 => -1.0,
                Winner::Tie => 0.0,
                Winner::MmWave => 1.0,
            };
            let mut t = ResultTable::new(&[
                "sub6_rate",
                "mm_rate",
                "sub6_needs_kappa",
                "mm_needs_density",
                "winner",
            ]);
            t.push(vec![
                v.sub6_rate,
                v.mm_rate,
                v.sub6_needs_kappa,
                v.mm_needs_density.unwrap_or(f64::NAN),
                winner,
            ]);
            t.meta("winner", "-1 sub-6, 0 tie, 1 mmWave");
            t
        }
    };
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulateWhat {
    Directed,
    Ambient,
    Association,
    Uplink,
}

/// Raw samples (directed and ambient) plus a summary row per tier.
pub fn simulate_outputs(
    cfg: &NetworkConfig,
    what: SimulateWhat,
    tiers: TierSel,
    interference: bool,
    opts: &RunOptions,
    out_dir: &Path,
) -> Result<Vec<Output>, CliError> {
    let mut outs = Vec::new();
    let summary_cols = ["mean", "std_error", "ci_lo", "ci_hi", "trials"];
    let summary = |e: &MCEstimate| {
        let mut t = ResultTable::new(&summary_cols);
        t.push(vec![e.mean, e.std_error, e.ci99.0, e.ci99.1, e.trials as f64]);
        t
    };
    match what {
        SimulateWhat::Directed | SimulateWhat::Ambient => {
            let trials = opts.trials_or(COVERAGE_TRIALS);
            for &tier in tiers.tiers() {
                let ccdf = if what == SimulateWhat::Directed {
                    mc_directed_power(cfg, tier, trials, opts.seed)?
                } else {
                    mc_ambient_power(cfg, tier, trials, opts.seed, true)?
                };
                let kind = if what == SimulateWhat::Directed { "directed" } else { "ambient" };
                let name = format!("samples_{kind}_{}.csv", tier_name(tier));
                write_samples_csv(&out_dir.join(name), ccdf.samples())?;
                outs.push(Output {
                    name: format!("simulate_{kind}_{}", tier_name(tier)),
                    table: summary(&ccdf.mean()),
                });
            }
        }
        SimulateWhat::Association => {
            let e = mc_association(cfg, opts.trials_or(COVERAGE_TRIALS), opts.seed)?;
            let mut t = ResultTable::new(&["sub6", "mm_los", "mm_nlos", "sub6_se", "mm_los_se", "mm_nlos_se"]);
            t.push(vec![
                e.p_sub6.mean,
                e.p_mm_los.mean,
                e.p_mm_nlos.mean,
                e.p_sub6.std_error,
                e.p_mm_los.std_error,
                e.p_mm_nlos.std_error,
            ]);
            outs.push(Output {
                name: "simulate_association".into(),
                table: t,
            });
        }
        SimulateWhat::Uplink => {
            let trials = opts.trials_or(THROUGHPUT_TRIALS);
            for &tier in tiers.tiers() {
                if tier == Tier::MmWave {
                    require_los_ball(cfg)?;
                }
                let o = UplinkOptions {
                    interference,
                    ..UplinkOptions::default()
                };
                let e = mc_uplink_throughput(cfg, tier, trials, opts.seed, o)?;
                outs.push(Output {
                    name: format!("simulate_uplink_{}", tier_name(tier)),
                    table: summary(&e),
                });
            }
        }
    }
    Ok(outs)
}

/// Fig. 1 style thresholds: 20 points from -34 to 0 dBm.
pub fn default_energy_sweep() -> Sweep {
    Sweep::new("p_th", linspace(-34.0, 0.0, 20).into_iter().map(dbm_to_watts).collect()).expect("valid grid")
}

pub fn default_ambient_sweep() -> Sweep {
    Sweep::new("p_th", linspace(-40.0, -5.0, 20).into_iter().map(dbm_to_watts).collect()).expect("valid grid")
}

pub fn default_association_sweep() -> Sweep {
    Sweep::new("sub6.bs_density", logspace(1e-4, 1e-1, 10)).expect("valid grid")
}

/// 1-2-5 steps from 0.001 to 0.5 BS/m².
pub fn density_grid() -> Vec<f64> {
    vec![0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5]
}

pub fn kappa_grid() -> Vec<f64> {
    vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0]
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentKind {
    EnergyCoverage { tiers: TierSel, p_th: f64 },
    Ambient { tiers: TierSel, p_th: f64 },
    Association,
    /// `None` picks sub-6, plus mmWave when the config uses the LoS ball.
    Throughput { tiers: Option<TierSel> },
    DensitySolver(SolveTarget),
    Simulate { what: SimulateWhat, tiers: TierSel, interference: bool },
    Figure(FigureId),
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub config: NetworkConfig,
    pub sweep: Option<Sweep>,
    pub options: RunOptions,
    pub output_path: PathBuf,
    /// Echoed into every CSV.
    pub command: String,
}

fn experiment_outputs(spec: &ExperimentSpec) -> Result<Vec<Output>, CliError> {
    let cfg = &spec.config;
    let opts = &spec.options;
    let mut outs = Vec::new();
    let named = |name: String, table| Output { name, table };
    match &spec.kind {
        ExperimentKind::EnergyCoverage { tiers, p_th } => {
            let sweep = spec.sweep.clone().unwrap_or_else(default_energy_sweep);
            for &tier in tiers.tiers() {
                let t = directed_table(cfg, tier, &sweep, *p_th, opts)?;
                outs.push(named(format!("energy_{}", tier_name(tier)), t));
            }
        }
        ExperimentKind::Ambient { tiers, p_th } => {
            let sweep = spec.sweep.clone().unwrap_or_else(default_ambient_sweep);
            for &tier in tiers.tiers() {
                let t = ambient_table(cfg, tier, &sweep, *p_th, opts)?;
                outs.push(named(format!("ambient_{}", tier_name(tier)), t));
            }
            if tiers.tiers().contains(&Tier::Sub6) {
                outs.push(named("ambient_moments".into(), ambient_moments_table(cfg, &sweep, opts)?));
            }
        }
        ExperimentKind::Association => {
            let sweep = spec.sweep.clone().unwrap_or_else(default_association_sweep);
            outs.push(named("association".into(), association_table(cfg, &sweep, opts)?));
        }
        ExperimentKind::Throughput { tiers } => {
            let tiers = tiers.unwrap_or(if cfg.mmwave.blockage.los_ball_radius().is_some() {
                TierSel::Both
            } else {
                TierSel::Sub6
            });
            for &tier in tiers.tiers() {
                let t = match tier {
                    Tier::Sub6 => {
                        let sweep = spec
                            .sweep
                            .clone()
                            .unwrap_or_else(|| Sweep::new("sub6.kappa", kappa_grid()).expect("valid grid"));
                        sub6_throughput_table(cfg, &sweep, opts)?
                    }
                    Tier::MmWave => {
                        let sweep = spec
                            .sweep
                            .clone()
                            .unwrap_or_else(|| Sweep::new("mmwave.bs_density", density_grid()).expect("valid grid"));
                        mm_throughput_table(cfg, &sweep, opts)?
                    }
                };
                outs.push(named(format!("throughput_{}", tier_name(tier)), t));
            }
        }
        ExperimentKind::DensitySolver(target) => {
            let name = match target {
                SolveTarget::Sub6Coverage { .. } => "solve_sub6_coverage",
                SolveTarget::Sub6Rate { .. } => "solve_sub6_rate",
                SolveTarget::MmRate { .. } => "solve_mm_rate",
                SolveTarget::MmDominance { .. } => "solve_mm_dominance",
                SolveTarget::AmbientDominance { .. } => "solve_ambient_dominance",
                SolveTarget::CrossTier => "solve_cross_tier",
            };
            outs.push(named(name.into(), solve_table(cfg, *target, opts)?));
        }
        ExperimentKind::Simulate {
            what,
            tiers,
            interference,
        } => {
            outs = simulate_outputs(cfg, *what, *tiers, *interference, opts, &spec.output_path)?;
        }
        ExperimentKind::Figure(id) => outs = reproduce_figure(*id, cfg, opts)?,
    }
    Ok(outs)
}

/// Runs `spec`, writes one CSV per table into `spec.output_path` and
/// returns the tables with their paths. Tables with failed rows are
/// written before the error is returned.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<(PathBuf, ResultTable)>, CliError> {
    std::fs::create_dir_all(&spec.output_path)?;
    let trials = match spec.kind {
        ExperimentKind::Throughput { .. } => spec.options.trials_or(THROUGHPUT_TRIALS),
        ExperimentKind::DensitySolver(SolveTarget::AmbientDominance { .. }) => {
            spec.options.trials_or(COVERAGE_TRIALS)
        }
        ExperimentKind::DensitySolver(_) => 0,
        _ => spec.options.trials_or(COVERAGE_TRIALS),
    };
    let mc_used = spec.options.mc && trials > 0;
    let mut written = Vec::new();
    let mut failed = 0;
    let mut first = None;
    for mut out in experiment_outputs(spec)? {
        let trials_meta = match &spec.kind {
            ExperimentKind::Figure(id) => id.trials(&spec.options),
            _ => mc_used.then_some(trials),
        };
        let mut table = ResultTable::new(&out.table.columns);
        table.stamp(&spec.command, &spec.config, spec.options.seed, trials_meta);
        table.metadata.append(&mut out.table.metadata);
        table.rows = std::mem::take(&mut out.table.rows);
        table.errors = std::mem::take(&mut out.table.errors);
        for e in table.errors.iter().flatten() {
            failed += 1;
            first.get_or_insert_with(|| e.clone());
        }
        let path = spec.output_path.join(format!("{}.csv", out.name));
        table.write(&path)?;
        written.push((path, table));
    }
    match first {
        Some(first) => Err(CliError::Partial { failed, first }),
        None => Ok(written),
    }
}
