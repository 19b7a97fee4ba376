//! Parameter sweeps over one axis and a list of regimes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nondarcy_core::{compute_pi, RegimeAssignment, SolverOptions};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::sci;

pub const CSV_HEADER: [&str; 11] = [
    "axis_name",
    "axis_value",
    "regime",
    "s",
    "v_D",
    "v_F",
    "q_over_h",
    "r_F",
    "r_D",
    "j_raw",
    "j_dimensionless",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    QOverH,
    S,
    VD,
    VF,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::QOverH => "q_over_h",
            Axis::S => "s",
            Axis::VD => "v_D",
            Axis::VF => "v_F",
        }
    }

    fn apply(self, cfg: &mut RunConfig, value: f64) {
        match self {
            Axis::QOverH => cfg.q_over_h = value,
            Axis::S => cfg.params.s = value,
            Axis::VD => cfg.params.v_d = value,
            Axis::VF => cfg.params.v_f = value,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q_over_h" | "q" | "Q" => Ok(Axis::QOverH),
            "s" => Ok(Axis::S),
            "v_D" | "v_d" | "vd" => Ok(Axis::VD),
            "v_F" | "v_f" | "vf" => Ok(Axis::VF),
            other => Err(format!("unknown axis `{other}` (expected q_over_h, s, v_D or v_F)")),
        }
    }
}

/// Comma-separated list of numbers.
pub fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|_| CliError::Config(format!("sweep value `{t}` is not a number")))
        })
        .collect()
}

/// `start:stop:points`, log-spaced with both endpoints included.
pub fn parse_log_range(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Config(format!("range `{text}` must be START:STOP:POINTS"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [start, stop, points] = parts[..] else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let points: usize = points.parse().map_err(|_| bad())?;
    if !(start > 0.0 && stop > 0.0) || points == 0 {
        return Err(CliError::Config(format!(
            "range `{text}` needs positive endpoints and at least one point"
        )));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let (lo, hi) = (start.ln(), stop.ln());
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                start
            } else if i + 1 == points {
                stop
            } else {
                (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

/// Comma-separated regime names; custom triples are written `F-D-pD`.
pub fn parse_regimes(text: &str) -> CliResult<Vec<RegimeAssignment>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|e| CliError::Config(format!("regime list: {e}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub regimes: Vec<RegimeAssignment>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis: Axis,
    pub axis_value: f64,
    pub regime: RegimeAssignment,
    pub s: f64,
    pub v_d: f64,
    pub v_f: f64,
    pub q_over_h: f64,
    pub r_f: f64,
    pub r_d: f64,
    pub j_raw: f64,
    pub j_dimensionless: f64,
}

impl SweepRow {
    pub fn fields(&self) -> [String; 11] {
        [
            self.axis.name().to_string(),
            sci(self.axis_value),
            self.regime.to_string(),
            sci(self.s),
            sci(self.v_d),
            sci(self.v_f),
            sci(self.q_over_h),
            sci(self.r_f),
            sci(self.r_d),
            sci(self.j_raw),
            sci(self.j_dimensionless),
        ]
    }
}

/// Evaluates every (value, regime) pair concurrently; rows come back in
/// axis-major order regardless of scheduling.
pub fn run_sweep(
    base: &RunConfig,
    spec: &SweepSpec,
    opts: &SolverOptions,
    continuous_predarcy: bool,
) -> CliResult<Vec<SweepRow>> {
    if spec.values.is_empty() {
        return Err(CliError::Config("sweep needs at least one axis value".into()));
    }
    if spec.regimes.is_empty() {
        return Err(CliError::Config("sweep needs at least one regime".into()));
    }
    let jobs: Vec<(f64, RegimeAssignment)> = spec
        .values
        .iter()
        .flat_map(|&v| spec.regimes.iter().map(move |&r| (v, r)))
        .collect();
    jobs.par_iter()
        .map(|&(value, regime)| {
            let mut cfg = *base;
            spec.axis.apply(&mut cfg, value);
            cfg.regime = regime;
            let scn = cfg.scenario(continuous_predarcy).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!(
                    "{} = {value}: {msg}",
                    spec.axis.name()
                )),
                other => other,
            })?;
            let pi = compute_pi(&scn, opts)?;
            let p = scn.params();
            Ok(SweepRow {
                axis: spec.axis,
                axis_value: value,
                regime,
                s: p.s,
                v_d: p.v_d,
                v_f: p.v_f,
                q_over_h: scn.q_over_h(),
                r_f: pi.zone_partition.r_f,
                r_d: pi.zone_partition.r_d,
                j_raw: pi.j_raw,
                j_dimensionless: pi.j_dimensionless,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(())
}
