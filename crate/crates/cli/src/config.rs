//! Flat `key = value` scenario files.
//!
//! ```text
//! # reference reservoir, Darcy everywhere
//! geometry.r_e   = 1000
//! geometry.r_w   = 0.3
//! geometry.h     = 10
//! params.alpha   = 1.01e10
//! params.beta    = 2.4318e11
//! params.lambda  = 1.01e10
//! params.s       = 0.7
//! params.gamma   = 1e-8
//! params.v_d     = 1e-7
//! params.v_f     = 1e-5
//! flow.q_over_h  = 1e-4
//! regime.preset  = D
//! ```
//!
//! Every key is optional and defaults to the value shown. Blank lines and
//! text after `#` are ignored.

use std::path::Path;

use nondarcy_core::{FlowParameters, Geometry, RegimeAssignment, Scenario};

use crate::error::{CliError, CliResult};

/// Every accepted key, in the order written by [`RunConfig::to_text`].
pub const KEYS: [&str; 12] = [
    "geometry.r_e",
    "geometry.r_w",
    "geometry.h",
    "params.alpha",
    "params.beta",
    "params.lambda",
    "params.s",
    "params.gamma",
    "params.v_d",
    "params.v_f",
    "flow.q_over_h",
    "regime.preset",
];

/// Config key for a parameter name reported by the core library.
pub fn key_for(name: &str) -> &str {
    match name {
        "r_e" => "geometry.r_e",
        "r_w" => "geometry.r_w",
        "h" => "geometry.h",
        "alpha" => "params.alpha",
        "beta" => "params.beta",
        "lambda" => "params.lambda",
        "s" => "params.s",
        "gamma" => "params.gamma",
        "v_d" => "params.v_d",
        "v_f" => "params.v_f",
        "q_over_h" => "flow.q_over_h",
        "regime" => "regime.preset",
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub params: FlowParameters,
    pub q_over_h: f64,
    pub regime: RegimeAssignment,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            geometry: Geometry::baseline(),
            params: FlowParameters::baseline(),
            q_over_h: 1e-4,
            regime: RegimeAssignment::DARCY,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), strip_prefix(e))))
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected `key = value`, found `{line}`",
                    idx + 1
                )));
            };
            cfg.set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {}", idx + 1, strip_prefix(e))))?;
        }
        Ok(cfg)
    }

    /// Applies a `KEY=VALUE` override as given on the command line.
    pub fn apply_override(&mut self, assignment: &str) -> CliResult<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            CliError::Config(format!("override `{assignment}` is not of the form KEY=VALUE"))
        })?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if key == "regime.preset" {
            self.regime = value
                .parse()
                .map_err(|e| CliError::Config(format!("`regime.preset`: {e}")))?;
            return Ok(());
        }
        let slot = match key {
            "geometry.r_e" => &mut self.geometry.r_e,
            "geometry.r_w" => &mut self.geometry.r_w,
            "geometry.h" => &mut self.geometry.h,
            "params.alpha" => &mut self.params.alpha,
            "params.beta" => &mut self.params.beta,
            "params.lambda" => &mut self.params.lambda,
            "params.s" => &mut self.params.s,
            "params.gamma" => &mut self.params.gamma,
            "params.v_d" | "params.v_D" => &mut self.params.v_d,
            "params.v_f" | "params.v_F" => &mut self.params.v_f,
            "flow.q_over_h" => &mut self.q_over_h,
            _ => {
                return Err(CliError::Config(format!(
                    "unknown key `{key}` (expected one of {})",
                    KEYS.join(", ")
                )))
            }
        };
        *slot = value
            .parse()
            .map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{value}` as a number")))?;
        Ok(())
    }

    /// Validated scenario; with `continuous_predarcy` λ is replaced by α·v_D^s.
    pub fn scenario(&self, continuous_predarcy: bool) -> CliResult<Scenario> {
        let mut params = self.params;
        if continuous_predarcy {
            params = params.with_continuous_predarcy()?;
        }
        Ok(Scenario::new(self.geometry, params, self.regime, self.q_over_h)?)
    }

    pub fn to_text(&self) -> String {
        let g = &self.geometry;
        let p = &self.params;
        let values = [
            g.r_e.to_string(),
            g.r_w.to_string(),
            g.h.to_string(),
            p.alpha.to_string(),
            p.beta.to_string(),
            p.lambda.to_string(),
            p.s.to_string(),
            p.gamma.to_string(),
            p.v_d.to_string(),
            p.v_f.to_string(),
            self.q_over_h.to_string(),
            self.regime.to_string(),
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

fn strip_prefix(err: CliError) -> String {
    match err {
        CliError::Config(msg) => msg,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_comments() {
        let cfg = RunConfig::parse("# nothing\n\n  flow.q_over_h = 1e-2  # faster\nregime.preset=FDpD\n")
            .unwrap();
        assert_eq!(cfg.q_over_h, 1e-2);
        assert_eq!(cfg.regime, RegimeAssignment::FDPD);
        assert_eq!(cfg.geometry, Geometry::baseline());
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.apply_override("params.s=0.3").unwrap();
        cfg.apply_override("regime.preset = F-D-pD").unwrap();
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::parse("params.alpha = abc").unwrap_err().to_string();
        assert!(err.contains("line 1") && err.contains("params.alpha"), "{err}");
        let err = RunConfig::parse("bogus.key = 1").unwrap_err().to_string();
        assert!(err.contains("bogus.key"), "{err}");
        let err = RunConfig::parse("no equals sign").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");

        let cfg = RunConfig::parse("flow.q_over_h = -1").unwrap();
        let err = cfg.scenario(false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("flow.q_over_h"), "{err}");

        let cfg = RunConfig::parse("geometry.r_w = 2000").unwrap();
        assert!(cfg.scenario(false).unwrap_err().to_string().contains("geometry.r_e"));
    }

    #[test]
    fn continuous_predarcy_rescales_lambda() {
        let cfg = RunConfig::default();
        let scn = cfg.scenario(true).unwrap();
        let p = cfg.params;
        assert_eq!(scn.params().lambda, p.alpha * p.v_d.powf(p.s));
    }
}
