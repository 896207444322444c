//! The seven reproduction figures. Each one fixes its caption parameters
//! on top of the user's config and sweeps a preset grid.

use clap::ValueEnum;
use wpnet_core::mcsim::Tier;
use wpnet_core::netmodel::{freq_constant_beta, BlockageModel, NetworkConfig, SectoredPattern};

use crate::run::{
    ambient_moments_table, ambient_table, association_table, default_ambient_sweep, default_association_sweep,
    default_energy_sweep, density_grid, directed_table, kappa_grid, mm_throughput_table, sub6_throughput_table,
    CliError, Output, RunOptions, Sweep, COVERAGE_TRIALS, THROUGHPUT_TRIALS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
    ];

    /// Trials per MC column, `None` without simulation.
    pub fn trials(self, opts: &RunOptions) -> Option<usize> {
        let default = match self {
            FigureId::Fig1 | FigureId::Fig2 | FigureId::Fig3 => COVERAGE_TRIALS,
            _ => THROUGHPUT_TRIALS,
        };
        opts.mc.then(|| opts.trials_or(default))
    }
}

/// Energy figures: the default deployment.
fn energy_base(cfg: &NetworkConfig) -> NetworkConfig {
    let mut c = *cfg;
    c.sub6.pathloss.alpha = 2.7;
    c.sub6.bs_density = 0.002;
    c
}

/// Throughput figures: 1 GHz sub-6 carrier, alpha 2.6, 20 MHz and 1 GHz
/// bandwidths, low-gain UE beams and a 20 m LoS ball.
fn throughput_base(cfg: &NetworkConfig) -> NetworkConfig {
    let mut c = *cfg;
    c.harvest_fraction = 0.7;
    c.sub6.pathloss.beta = freq_constant_beta(1e9).expect("positive carrier");
    c.sub6.pathloss.alpha = 2.6;
    c.sub6.bandwidth = 20e6;
    c.mmwave.bandwidth = 1e9;
    c.mmwave.ue_pattern = SectoredPattern::from_db_deg(3.0, -3.0, 45.0);
    c.mmwave.bs_pattern = SectoredPattern::from_db_deg(18.0, -2.0, 10.0);
    c.mmwave.blockage = BlockageModel::LoSBall { r_los: 20.0 };
    c
}

fn grid(name: &str, values: Vec<f64>) -> Sweep {
    Sweep::new(name, values).expect("valid preset grid")
}

fn out(name: &str, table: crate::table::ResultTable) -> Output {
    Output {
        name: name.to_string(),
        table,
    }
}

/// Tables of one figure, unstamped.
pub fn reproduce_figure(id: FigureId, cfg: &NetworkConfig, opts: &RunOptions) -> Result<Vec<Output>, CliError> {
    let mut outs = Vec::new();
    match id {
        FigureId::Fig1 => {
            let mut c = energy_base(cfg);
            c.sub6.antennas = 32;
            c.mmwave.bs_density = 0.02;
            let s = default_energy_sweep();
            outs.push(out("fig1_sub6", directed_table(&c, Tier::Sub6, &s, 0.0, opts)?));
            outs.push(out("fig1_mmwave", directed_table(&c, Tier::MmWave, &s, 0.0, opts)?));
        }
        FigureId::Fig2 => {
            let mut c = energy_base(cfg);
            c.sub6.pathloss.alpha = 2.6;
            c.mmwave.bs_density = 0.5;
            let s = default_ambient_sweep();
            outs.push(out("fig2_sub6", ambient_table(&c, Tier::Sub6, &s, 0.0, opts)?));
            outs.push(out("fig2_mmwave", ambient_table(&c, Tier::MmWave, &s, 0.0, opts)?));
            outs.push(out("fig2_moments", ambient_moments_table(&c, &s, opts)?));
        }
        FigureId::Fig3 => {
            let mut c = energy_base(cfg);
            c.mmwave.bs_density = 0.01;
            for n in [16, 32] {
                c.sub6.antennas = n;
                let t = association_table(&c, &default_association_sweep(), opts)?;
                outs.push(out(&format!("fig3_n{n}"), t));
            }
        }
        FigureId::Fig4 => {
            let mut c = throughput_base(cfg);
            c.sub6.ue_density = 0.001;
            for n in [8, 16] {
                c.sub6.antennas = n;
                let t = sub6_throughput_table(&c, &grid("sub6.kappa", kappa_grid()), opts)?;
                outs.push(out(&format!("fig4_n{n}"), t));
            }
        }
        FigureId::Fig5 => {
            let mut c = throughput_base(cfg);
            c.mmwave.ue_density = 0.01;
            let t = mm_throughput_table(&c, &grid("mmwave.bs_density", density_grid()), opts)?;
            outs.push(out("fig5_mmwave", t));
        }
        FigureId::Fig6 => {
            let mut c = throughput_base(cfg);
            c.sub6.ue_density = 0.01;
            c.mmwave.ue_density = 0.01;
            c.sub6.antennas = 32;
            let t = sub6_throughput_table(&c, &grid("sub6.bs_density", density_grid()), opts)?;
            outs.push(out("fig6_sub6", t));
            let t = mm_throughput_table(&c, &grid("mmwave.bs_density", density_grid()), opts)?;
            outs.push(out("fig6_mmwave", t));
        }
        FigureId::Fig7 => {
            let mut c = throughput_base(cfg);
            c.mmwave.ue_density = 0.01;
            for (ghz, alpha) in [(28, 2.0), (38, 2.0), (60, 2.25), (73, 2.0)] {
                c.mmwave.los.beta = freq_constant_beta(ghz as f64 * 1e9).expect("positive carrier");
                c.mmwave.los.alpha = alpha;
                c.mmwave.nlos.beta = c.mmwave.los.beta;
                let t = mm_throughput_table(&c, &grid("mmwave.bs_density", density_grid()), opts)?;
                outs.push(out(&format!("fig7_{ghz}ghz"), t));
            }
        }
    }
    Ok(outs)
}
