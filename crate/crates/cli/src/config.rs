//! TOML experiment files and their flag overrides.
//!
//! Angles may be written as plain radians or as multiples of pi, e.g.
//! `"pi/2"`, `"11pi/12"`, `"-3*pi/4"`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer};

use polcirc::circuit::{linear_grid, log_grid};

/// Malformed input rather than a failed computation; maps to exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Angle(v)),
            Raw::Text(s) => parse_angle(&s).map(Angle).map_err(serde::de::Error::custom),
        }
    }
}

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || format!("cannot read angle '{text}'");
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let coef = s[..pos].trim_end_matches('*');
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &s[pos + 2..];
    let div = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?
    };
    Ok(coef * PI / div)
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarCfg {
    pub r: f64,
    pub phi: Angle,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GklsCfg {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub energy: Option<f64>,
    /// Choose the energy that keeps the initial orientation fixed.
    pub hold_orientation: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveCfg {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateCfg {
    pub gamma: Option<Angle>,
    pub lambda_par: Option<f64>,
    pub lambda_perp: Option<f64>,
    pub ancilla: Option<PolarCfg>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitCfg {
    pub example: Option<String>,
    pub reference: Option<PolarCfg>,
    pub target: Option<PolarCfg>,
    pub epsilon: Option<f64>,
    pub dt: Option<f64>,
    pub max_steps: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub eps_grid: Option<String>,
    pub epsilons: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCfg {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub state: Option<PolarCfg>,
    #[serde(default)]
    pub gkls: GklsCfg,
    #[serde(default)]
    pub evolve: EvolveCfg,
    #[serde(default)]
    pub gate: GateCfg,
    #[serde(default)]
    pub circuit: CircuitCfg,
    #[serde(default)]
    pub sweep: SweepCfg,
    #[serde(default)]
    pub verify: VerifyCfg,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// `lo:hi:count[:log|lin]`, log-spaced unless stated otherwise.
pub fn parse_grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(usage(format!("epsilon grid '{spec}' must look like lo:hi:count[:log|lin]")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("bad number '{s}' in grid '{spec}'")));
    let (lo, hi) = (num(parts[0])?, num(parts[1])?);
    let count: usize = parts[2]
        .parse()
        .map_err(|_| usage(format!("bad count '{}' in grid '{spec}'", parts[2])))?;
    if count == 0 {
        return Err(usage(format!("epsilon grid '{spec}' is empty")));
    }
    let grid = match parts.get(3).copied().unwrap_or("log") {
        "log" => log_grid(lo, hi, count),
        "lin" | "linear" => linear_grid(lo, hi, count),
        other => return Err(usage(format!("unknown grid spacing '{other}'"))),
    };
    grid.map_err(|e| usage(e.to_string()))
}
