//! Flat `section.key = value` configuration files.
//!
//! Lines are `key = value [unit]`, `#` starts a comment. Unset keys keep
//! their defaults. Values are normalised to SI on parse; `emit_config`
//! writes SI values back out so that parse(emit(cfg)) == cfg.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;
use wpnet_core::netmodel::{
    db_to_linear, dbm_to_watts, freq_constant_beta, BlockageModel, NetworkConfig,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

/// What a key measures, which fixes the units it accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Number,
    /// Watts; also `mW` and `dBm`.
    Power,
    /// Linear; also `dB`.
    Gain,
    /// Always in dB.
    Decibel,
    /// Hz; also `kHz`, `MHz`, `GHz`.
    Frequency,
    /// Meters.
    Length,
    /// Degrees when bare; also `deg` and `rad`.
    Angle,
    Count,
    Word,
    /// Bits per second; also `kbps`, `Mbps`, `Gbps`.
    Rate,
}

/// Every accepted key with its quantity.
pub const KEYS: &[(&str, Quantity)] = &[
    ("tau", Quantity::Number),
    ("noise_figure", Quantity::Decibel),
    ("sub6.bs_density", Quantity::Number),
    ("sub6.ue_density", Quantity::Number),
    ("sub6.power", Quantity::Power),
    ("sub6.efficiency", Quantity::Number),
    ("sub6.bandwidth", Quantity::Frequency),
    ("sub6.antennas", Quantity::Count),
    ("sub6.carrier", Quantity::Frequency),
    ("sub6.beta", Quantity::Number),
    ("sub6.alpha", Quantity::Number),
    ("sub6.r_ref", Quantity::Length),
    ("mmwave.bs_density", Quantity::Number),
    ("mmwave.ue_density", Quantity::Number),
    ("mmwave.power", Quantity::Power),
    ("mmwave.efficiency", Quantity::Number),
    ("mmwave.bandwidth", Quantity::Frequency),
    ("mmwave.carrier", Quantity::Frequency),
    ("mmwave.los_beta", Quantity::Number),
    ("mmwave.los_alpha", Quantity::Number),
    ("mmwave.nlos_beta", Quantity::Number),
    ("mmwave.nlos_alpha", Quantity::Number),
    ("mmwave.r_ref", Quantity::Length),
    ("mmwave.bs_main_gain", Quantity::Gain),
    ("mmwave.bs_side_gain", Quantity::Gain),
    ("mmwave.bs_beamwidth", Quantity::Angle),
    ("mmwave.ue_main_gain", Quantity::Gain),
    ("mmwave.ue_side_gain", Quantity::Gain),
    ("mmwave.ue_beamwidth", Quantity::Angle),
    ("mmwave.blockage", Quantity::Word),
    ("mmwave.blockage_rho", Quantity::Number),
    ("mmwave.r_los", Quantity::Length),
];

/// Radius used when `mmwave.blockage = los_ball` is set without `r_los`.
pub const DEFAULT_R_LOS: f64 = 20.0;

pub fn quantity_of(key: &str) -> Option<Quantity> {
    KEYS.iter().find(|(k, _)| *k == key).map(|&(_, q)| q)
}

/// Length of the leading numeric literal in `t`.
fn number_len(t: &str) -> usize {
    let b = t.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let prev = if i > 0 { b[i - 1] } else { b' ' };
        let next_digit = b.get(i + 1).is_some_and(|d| d.is_ascii_digit() || *d == b'-' || *d == b'+');
        let ok = c.is_ascii_digit()
            || c == b'.'
            || ((c == b'+' || c == b'-') && (i == 0 || prev == b'e' || prev == b'E'))
            || ((c == b'e' || c == b'E') && (prev.is_ascii_digit() || prev == b'.') && next_digit);
        if !ok {
            break;
        }
        i += 1;
    }
    i
}

/// Parses a number with an optional unit suffix into SI. On failure
/// returns the byte offset (within `text`) of the offending part.
pub fn parse_value(text: &str, q: Quantity) -> Result<f64, (usize, String)> {
    let lead = text.len() - text.trim_start().len();
    let t = text.trim();
    let split = number_len(t);
    let (num, unit) = (t[..split].trim(), t[split..].trim());
    let x: f64 = num
        .parse()
        .map_err(|_| (lead, format!("expected a number, found `{num}`")))?;
    if !x.is_finite() {
        return Err((lead, "value must be finite".into()));
    }
    let unit_at = lead + split + (t[split..].len() - t[split..].trim_start().len());
    let bad_unit = || Err((unit_at, format!("unit `{unit}` does not apply here")));
    let v = match (q, unit) {
        (Quantity::Word, _) => return Err((lead, "expected a word".into())),
        (_, "") => match q {
            Quantity::Angle => x.to_radians(),
            Quantity::Count if x.fract() != 0.0 || x < 0.0 => {
                return Err((lead, format!("expected a whole number, found {x}")))
            }
            _ => x,
        },
        (Quantity::Power, "W") => x,
        (Quantity::Power, "mW") => 1e-3 * x,
        (Quantity::Power, "dBm") => dbm_to_watts(x),
        (Quantity::Gain, "dB") => db_to_linear(x),
        (Quantity::Decibel, "dB") => x,
        (Quantity::Frequency, "Hz") => x,
        (Quantity::Frequency, "kHz") => 1e3 * x,
        (Quantity::Frequency, "MHz") => 1e6 * x,
        (Quantity::Frequency, "GHz") => 1e9 * x,
        (Quantity::Length, "m") => x,
        (Quantity::Angle, "deg") => x.to_radians(),
        (Quantity::Angle, "rad") => x,
        (Quantity::Rate, "bps") => x,
        (Quantity::Rate, "kbps") => 1e3 * x,
        (Quantity::Rate, "Mbps") => 1e6 * x,
        (Quantity::Rate, "Gbps") => 1e9 * x,
        _ => return bad_unit(),
    };
    Ok(v)
}

#[derive(Debug, Clone, Copy)]
enum BlockageKind {
    Exponential,
    LoSBall,
}

/// Applies one `key = value` assignment.
struct Builder {
    cfg: NetworkConfig,
    kind: BlockageKind,
    rho: f64,
    r_los: f64,
}

impl Builder {
    fn new(cfg: NetworkConfig) -> Self {
        let (kind, rho, r_los) = match cfg.mmwave.blockage {
            BlockageModel::ExponentialLoS { rho } => (BlockageKind::Exponential, rho, DEFAULT_R_LOS),
            BlockageModel::LoSBall { r_los } => (BlockageKind::LoSBall, 1.0 / 141.4, r_los),
        };
        Self { cfg, kind, rho, r_los }
    }

    fn set_word(&mut self, key: &str, word: &str) -> Result<(), String> {
        debug_assert_eq!(key, "mmwave.blockage");
        self.kind = match word {
            "exponential" => BlockageKind::Exponential,
            "los_ball" => BlockageKind::LoSBall,
            _ => return Err(format!("blockage must be `exponential` or `los_ball`, found `{word}`")),
        };
        Ok(())
    }

    fn set(&mut self, key: &str, v: f64) -> Result<(), String> {
        let c = &mut self.cfg;
        let (s, m) = (&mut c.sub6, &mut c.mmwave);
        match key {
            "tau" => c.harvest_fraction = v,
            "noise_figure" => c.noise_figure_db = v,
            "sub6.bs_density" => s.bs_density = v,
            "sub6.ue_density" => s.ue_density = v,
            "sub6.power" => s.power = v,
            "sub6.efficiency" => s.efficiency = v,
            "sub6.bandwidth" => s.bandwidth = v,
            "sub6.antennas" => {
                s.antennas = u32::try_from(v as u64).map_err(|_| format!("too many antennas ({v})"))?
            }
            "sub6.carrier" => s.pathloss.beta = freq_constant_beta(v).map_err(|e| e.to_string())?,
            "sub6.beta" => s.pathloss.beta = v,
            "sub6.alpha" => s.pathloss.alpha = v,
            "sub6.r_ref" => s.pathloss.r_ref = v,
            "mmwave.bs_density" => m.bs_density = v,
            "mmwave.ue_density" => m.ue_density = v,
            "mmwave.power" => m.power = v,
            "mmwave.efficiency" => m.efficiency = v,
            "mmwave.bandwidth" => m.bandwidth = v,
            "mmwave.carrier" => {
                let b = freq_constant_beta(v).map_err(|e| e.to_string())?;
                m.los.beta = b;
                m.nlos.beta = b;
            }
            "mmwave.los_beta" => m.los.beta = v,
            "mmwave.los_alpha" => m.los.alpha = v,
            "mmwave.nlos_beta" => m.nlos.beta = v,
            "mmwave.nlos_alpha" => m.nlos.alpha = v,
            "mmwave.r_ref" => {
                m.los.r_ref = v;
                m.nlos.r_ref = v;
            }
            "mmwave.bs_main_gain" => m.bs_pattern.main_gain = v,
            "mmwave.bs_side_gain" => m.bs_pattern.side_gain = v,
            "mmwave.bs_beamwidth" => m.bs_pattern.beamwidth = v,
            "mmwave.ue_main_gain" => m.ue_pattern.main_gain = v,
            "mmwave.ue_side_gain" => m.ue_pattern.side_gain = v,
            "mmwave.ue_beamwidth" => m.ue_pattern.beamwidth = v,
            "mmwave.blockage_rho" => self.rho = v,
            "mmwave.r_los" => self.r_los = v,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    fn finish(mut self) -> NetworkConfig {
        self.cfg.mmwave.blockage = match self.kind {
            BlockageKind::Exponential => BlockageModel::ExponentialLoS { rho: self.rho },
            BlockageKind::LoSBall => BlockageModel::LoSBall { r_los: self.r_los },
        };
        self.cfg
    }
}

/// Sets a single key on an existing config, with the same value syntax
/// as the file format. Used for sweeps.
pub fn apply_assignment(cfg: &NetworkConfig, key: &str, value: f64) -> Result<NetworkConfig, ConfigError> {
    let mut b = Builder::new(*cfg);
    b.set(key, value).map_err(ConfigError::Validation)?;
    Ok(b.finish())
}

pub fn parse_config_str(text: &str) -> Result<NetworkConfig, ConfigError> {
    let mut b = Builder::new(NetworkConfig::default());
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let err = |col: usize, message: String| ConfigError::Parse {
            line,
            column: col + 1,
            message,
        };
        let Some(eq) = body.find('=') else {
            let col = body.len() - body.trim_start().len();
            return Err(err(col, "expected `key = value`".into()));
        };
        let key = body[..eq].trim();
        let key_col = body.len() - body.trim_start().len();
        let Some(q) = quantity_of(key) else {
            return Err(err(key_col, format!("unknown key `{key}`")));
        };
        let value = &body[eq + 1..];
        if value.trim().is_empty() {
            return Err(err(eq + 1, format!("missing value for `{key}`")));
        }
        let value_col = eq + 1 + (value.len() - value.trim_start().len());
        if q == Quantity::Word {
            b.set_word(key, value.trim()).map_err(|m| err(value_col, m))?;
            continue;
        }
        let v = parse_value(value, q).map_err(|(off, m)| err(eq + 1 + off, m))?;
        b.set(key, v).map_err(|m| err(value_col, m))?;
    }
    let cfg = b.finish();
    cfg.validate().map_err(|e| ConfigError::Validation(e.to_string()))?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<NetworkConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

/// SI text form of `cfg`; every key except the carrier shortcuts.
pub fn emit_config(cfg: &NetworkConfig) -> String {
    let s = &cfg.sub6;
    let m = &cfg.mmwave;
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    let f = |x: f64| format!("{x:?}");
    put("tau", f(cfg.harvest_fraction));
    put("noise_figure", format!("{:?} dB", cfg.noise_figure_db));
    put("sub6.bs_density", f(s.bs_density));
    put("sub6.ue_density", f(s.ue_density));
    put("sub6.power", format!("{:?} W", s.power));
    put("sub6.efficiency", f(s.efficiency));
    put("sub6.bandwidth", format!("{:?} Hz", s.bandwidth));
    put("sub6.antennas", s.antennas.to_string());
    put("sub6.beta", f(s.pathloss.beta));
    put("sub6.alpha", f(s.pathloss.alpha));
    put("sub6.r_ref", format!("{:?} m", s.pathloss.r_ref));
    put("mmwave.bs_density", f(m.bs_density));
    put("mmwave.ue_density", f(m.ue_density));
    put("mmwave.power", format!("{:?} W", m.power));
    put("mmwave.efficiency", f(m.efficiency));
    put("mmwave.bandwidth", format!("{:?} Hz", m.bandwidth));
    put("mmwave.los_beta", f(m.los.beta));
    put("mmwave.los_alpha", f(m.los.alpha));
    put("mmwave.nlos_beta", f(m.nlos.beta));
    put("mmwave.nlos_alpha", f(m.nlos.alpha));
    // One r_ref key covers both link classes.
    put("mmwave.r_ref", format!("{:?} m", m.los.r_ref));
    put("mmwave.bs_main_gain", f(m.bs_pattern.main_gain));
    put("mmwave.bs_side_gain", f(m.bs_pattern.side_gain));
    put("mmwave.bs_beamwidth", format!("{:?} rad", m.bs_pattern.beamwidth));
    put("mmwave.ue_main_gain", f(m.ue_pattern.main_gain));
    put("mmwave.ue_side_gain", f(m.ue_pattern.side_gain));
    put("mmwave.ue_beamwidth", format!("{:?} rad", m.ue_pattern.beamwidth));
    match m.blockage {
        BlockageModel::ExponentialLoS { rho } => {
            put("mmwave.blockage", "exponential".into());
            put("mmwave.blockage_rho", f(rho));
        }
        BlockageModel::LoSBall { r_los } => {
            put("mmwave.blockage", "los_ball".into());
            put("mmwave.r_los", format!("{r_los:?} m"));
        }
    }
    out
}
