//! Hydrodynamic parameters and the piecewise constitutive law.
//!
//! The momentum balance is written as `g(|v|) v = -∇p` with a resistance
//! `g` that switches between three branches:
//!
//! | law          | g(ξ)        |
//! |--------------|-------------|
//! | pre-Darcy    | λ ξ^(-s)    |
//! | Darcy        | α           |
//! | Forchheimer  | α + β ξ     |
//!
//! and the equivalent explicit form `v = -K(|∇p|) ∇p` gives the mobility `K`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Hydrodynamic coefficients and critical velocities, all in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParameters {
    /// Darcy coefficient μ/k, Pa·s/m².
    pub alpha: f64,
    /// Forchheimer coefficient, Pa·s²/m³.
    pub beta: f64,
    /// Pre-Darcy coefficient, Pa·s^(1-s)/m^(2-s).
    pub lambda: f64,
    /// Pre-Darcy exponent.
    pub s: f64,
    /// Fluid compressibility, 1/Pa.
    pub gamma: f64,
    /// Pre-Darcy / Darcy transition speed, m/s.
    pub v_d: f64,
    /// Darcy / Forchheimer transition speed, m/s.
    pub v_f: f64,
}

impl FlowParameters {
    /// Parameters of the reference sandstone reservoir study: α = λ = 1.01e10,
    /// β = 2.4318e11, s = 0.7, γ = 1e-8, v_D = 1e-7, v_F = 1e-5.
    pub fn baseline() -> Self {
        FlowParameters {
            alpha: 1.01e10,
            beta: 2.4318e11,
            lambda: 1.01e10,
            s: 0.7,
            gamma: 1e-8,
            v_d: 1e-7,
            v_f: 1e-5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn check(name: &'static str, ok: bool, reason: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: reason.to_string(),
                })
            }
        }
        let finite = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("lambda", self.lambda),
            ("s", self.s),
            ("gamma", self.gamma),
            ("v_d", self.v_d),
            ("v_f", self.v_f),
        ];
        for (name, value) in finite {
            check(name, value.is_finite(), "must be finite")?;
        }
        check("alpha", self.alpha > 0.0, "must be > 0")?;
        check("beta", self.beta >= 0.0, "must be >= 0")?;
        check("lambda", self.lambda > 0.0, "must be > 0")?;
        check("gamma", self.gamma >= 0.0, "must be >= 0")?;
        check("s", (0.0..=1.0).contains(&self.s), "must lie in [0, 1]")?;
        check("v_d", self.v_d >= 0.0, "must be >= 0")?;
        check("v_f", self.v_f >= self.v_d, "must be >= v_d")?;
        Ok(())
    }

    /// Rescales λ to α·v_D^s so the composite resistance is continuous at v_D.
    pub fn with_continuous_predarcy(mut self) -> Result<Self> {
        if self.v_d <= 0.0 && self.s > 0.0 {
            return Err(Error::InvalidParameter {
                name: "v_d",
                reason: "continuous pre-Darcy scaling needs v_d > 0 when s > 0".into(),
            });
        }
        self.lambda = self.alpha * self.v_d.powf(self.s);
        Ok(self)
    }

    /// Law that the composite resistance selects at speed `xi`.
    pub fn law_at_speed(&self, xi: f64) -> ZoneLaw {
        if xi < self.v_d {
            ZoneLaw::PreDarcy
        } else if xi <= self.v_f {
            ZoneLaw::Darcy
        } else {
            ZoneLaw::Forchheimer
        }
    }

    /// Resistance g(ξ) of the given law, Pa·s/m².
    pub fn resistance(&self, law: ZoneLaw, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) {
            return Err(Error::Domain {
                what: "resistance",
                value: xi,
                reason: "speed must be non-negative",
            });
        }
        match law {
            ZoneLaw::PreDarcy => {
                if xi == 0.0 && self.s > 0.0 {
                    return Err(Error::Domain {
                        what: "pre-Darcy resistance",
                        value: xi,
                        reason: "λ ξ^(-s) is singular at zero speed",
                    });
                }
                Ok(self.lambda * xi.powf(-self.s))
            }
            ZoneLaw::Darcy => Ok(self.alpha),
            ZoneLaw::Forchheimer => Ok(self.alpha + self.beta * xi),
        }
    }

    /// Pressure-gradient magnitude g(ξ)·ξ sustaining speed `xi`, Pa/m.
    ///
    /// Unlike [`resistance`](Self::resistance) this is finite at ξ = 0 for
    /// every law.
    pub fn pressure_gradient(&self, law: ZoneLaw, xi: f64) -> f64 {
        match law {
            ZoneLaw::PreDarcy => self.lambda * xi.powf(1.0 - self.s),
            ZoneLaw::Darcy => self.alpha * xi,
            ZoneLaw::Forchheimer => (self.alpha + self.beta * xi) * xi,
        }
    }

    /// Dissipation density g(ξ)·ξ², finite at ξ = 0.
    pub fn dissipation(&self, law: ZoneLaw, xi: f64) -> f64 {
        match law {
            ZoneLaw::PreDarcy => self.lambda * xi.powf(2.0 - self.s),
            ZoneLaw::Darcy => self.alpha * xi * xi,
            ZoneLaw::Forchheimer => (self.alpha + self.beta * xi) * xi * xi,
        }
    }

    /// Mobility K(|∇p|) with v = K ∇p, m²/(Pa·s).
    pub fn mobility(&self, law: ZoneLaw, grad_p: f64) -> Result<f64> {
        if !(grad_p >= 0.0) {
            return Err(Error::Domain {
                what: "mobility",
                value: grad_p,
                reason: "pressure gradient must be non-negative",
            });
        }
        match law {
            ZoneLaw::PreDarcy => {
                if self.s >= 1.0 {
                    return Err(Error::Domain {
                        what: "pre-Darcy mobility",
                        value: self.s,
                        reason: "inverse form does not exist for s = 1",
                    });
                }
                if grad_p == 0.0 && self.s > 0.0 {
                    return Err(Error::Domain {
                        what: "pre-Darcy mobility",
                        value: grad_p,
                        reason: "mobility is singular at zero gradient",
                    });
                }
                let inv = 1.0 / (1.0 - self.s);
                Ok(self.lambda.powf(-inv) * grad_p.powf(self.s * inv))
            }
            ZoneLaw::Darcy => Ok(1.0 / self.alpha),
            ZoneLaw::Forchheimer => {
                let a = self.alpha;
                Ok(2.0 / (a + (a * a + 4.0 * self.beta * grad_p).sqrt()))
            }
        }
    }
}

impl Default for FlowParameters {
    fn default() -> Self {
        Self::baseline()
    }
}

/// One branch of the composite constitutive law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZoneLaw {
    PreDarcy,
    Darcy,
    Forchheimer,
}

impl ZoneLaw {
    pub fn code(self) -> &'static str {
        match self {
            ZoneLaw::PreDarcy => "pD",
            ZoneLaw::Darcy => "D",
            ZoneLaw::Forchheimer => "F",
        }
    }
}

impl FromStr for ZoneLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pD" | "pd" | "predarcy" | "preDarcy" | "pre-darcy" => Ok(ZoneLaw::PreDarcy),
            "D" | "d" | "darcy" | "Darcy" => Ok(ZoneLaw::Darcy),
            "F" | "f" | "forchheimer" | "Forchheimer" => Ok(ZoneLaw::Forchheimer),
            other => Err(Error::InvalidParameter {
                name: "zone law",
                reason: format!("unknown law `{other}` (expected pD, D or F)"),
            }),
        }
    }
}

/// Which law governs the fast (near-well), moderate (middle) and slow
/// (near-boundary) velocity zones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegimeAssignment {
    pub near_well: ZoneLaw,
    pub middle: ZoneLaw,
    pub near_boundary: ZoneLaw,
}

impl RegimeAssignment {
    pub const fn new(near_well: ZoneLaw, middle: ZoneLaw, near_boundary: ZoneLaw) -> Self {
        RegimeAssignment {
            near_well,
            middle,
            near_boundary,
        }
    }

    pub const DARCY: Self = Self::new(ZoneLaw::Darcy, ZoneLaw::Darcy, ZoneLaw::Darcy);
    pub const FORCHHEIMER: Self = Self::new(
        ZoneLaw::Forchheimer,
        ZoneLaw::Forchheimer,
        ZoneLaw::Forchheimer,
    );
    pub const FDD: Self = Self::new(ZoneLaw::Forchheimer, ZoneLaw::Darcy, ZoneLaw::Darcy);
    pub const DDPD: Self = Self::new(ZoneLaw::Darcy, ZoneLaw::Darcy, ZoneLaw::PreDarcy);
    pub const FDPD: Self = Self::new(ZoneLaw::Forchheimer, ZoneLaw::Darcy, ZoneLaw::PreDarcy);
    pub const FPDPD: Self = Self::new(
        ZoneLaw::Forchheimer,
        ZoneLaw::PreDarcy,
        ZoneLaw::PreDarcy,
    );
    pub const PRE_DARCY: Self =
        Self::new(ZoneLaw::PreDarcy, ZoneLaw::PreDarcy, ZoneLaw::PreDarcy);

    /// The seven named presets, in a fixed order.
    pub const PRESETS: [(&'static str, RegimeAssignment); 7] = [
        ("D", Self::DARCY),
        ("F", Self::FORCHHEIMER),
        ("FDD", Self::FDD),
        ("DDpD", Self::DDPD),
        ("FDpD", Self::FDPD),
        ("FpDpD", Self::FPDPD),
        ("pD", Self::PRE_DARCY),
    ];

    pub fn laws(&self) -> [ZoneLaw; 3] {
        [self.near_well, self.middle, self.near_boundary]
    }

    /// Preset name, or `None` for an unnamed triple.
    pub fn preset_name(&self) -> Option<&'static str> {
        Self::PRESETS
            .iter()
            .find(|(_, r)| r == self)
            .map(|(name, _)| *name)
    }
}

impl fmt::Display for RegimeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.preset_name() {
            Some(name) => f.write_str(name),
            None => write!(
                f,
                "{}-{}-{}",
                self.near_well.code(),
                self.middle.code(),
                self.near_boundary.code()
            ),
        }
    }
}

impl FromStr for RegimeAssignment {
    type Err = Error;

    /// Accepts a preset name (`D`, `F`, `FDD`, `DDpD`, `FDpD`, `FpDpD`, `pD`,
    /// with `Forch`, `preDarcy` and `pure-preDarcy` as aliases) or an explicit
    /// triple such as `F-pD-D`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let alias = match s {
            "Darcy" | "darcy" => Some(Self::DARCY),
            "Forch" | "forch" | "Forchheimer" | "forchheimer" => Some(Self::FORCHHEIMER),
            "preDarcy" | "predarcy" | "pure-preDarcy" | "pure-predarcy" => {
                Some(Self::PRE_DARCY)
            }
            _ => None,
        };
        if let Some(r) = alias {
            return Ok(r);
        }
        if let Some((_, r)) = Self::PRESETS.iter().find(|(name, _)| *name == s) {
            return Ok(*r);
        }
        let parts: Vec<&str> = s.split(['-', '/', ',']).collect();
        if parts.len() == 3 {
            return Ok(Self::new(
                parts[0].parse()?,
                parts[1].parse()?,
                parts[2].parse()?,
            ));
        }
        Err(Error::InvalidParameter {
            name: "regime",
            reason: format!("unknown regime `{s}`"),
        })
    }
}
