//! Productivity index assembled from zone integrals.
//!
//! For any regime the PI is `J = L / (S[near well] + S[middle] + S[near boundary])`
//! with `L = 2πh (r_e² − r_w²)²`, each zone integral chosen by the law that
//! governs it. Zones of zero radial extent contribute exactly zero, so the
//! named presets are all special cases of the same three-term sum.

use std::f64::consts::PI;

use crate::error::Result;
use crate::kinematics::{Scenario, ZonePartition};
use crate::model::{RegimeAssignment, ZoneLaw};
use crate::quadrature::{s_darcy, s_forch, s_predarcy, Tolerance};

/// Numerical settings shared by the PI routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: Tolerance,
    /// Multiplier applied to every Forchheimer zone integral. Only the
    /// validation harness sets this, to check that it notices the fault.
    #[doc(hidden)]
    pub forchheimer_fault: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: Tolerance::default(),
            forchheimer_fault: 1.0,
        }
    }
}

impl SolverOptions {
    pub fn with_rel_tol(rel: f64) -> Self {
        SolverOptions {
            tolerance: Tolerance::relative(rel),
            ..SolverOptions::default()
        }
    }
}

/// Per-zone contributions to the PI denominator, Pa·s·m⁴ (S-integral units).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZoneContributions {
    pub near_well: f64,
    pub middle: f64,
    pub near_boundary: f64,
}

impl ZoneContributions {
    pub fn total(&self) -> f64 {
        self.near_well + self.middle + self.near_boundary
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.near_well, self.middle, self.near_boundary]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiResult {
    /// PI in m³/(Pa·s).
    pub j_raw: f64,
    /// `j_raw · α / (2πh)`.
    pub j_dimensionless: f64,
    pub zone_partition: ZonePartition,
    pub contributions: ZoneContributions,
    pub regime: RegimeAssignment,
}

impl PiResult {
    pub(crate) fn from_denominator(
        scn: &Scenario,
        partition: ZonePartition,
        contributions: ZoneContributions,
        j_raw: f64,
    ) -> Self {
        PiResult {
            j_raw,
            j_dimensionless: j_raw * dimensionless_factor(scn),
            zone_partition: partition,
            contributions,
            regime: scn.regime(),
        }
    }
}

/// α / (2πh), the factor turning a raw PI into the dimensionless one.
pub fn dimensionless_factor(scn: &Scenario) -> f64 {
    scn.params().alpha / (2.0 * PI * scn.geometry().h)
}

/// L = 2πh (r_e² − r_w²)².
pub fn numerator(scn: &Scenario) -> f64 {
    let g = scn.geometry();
    2.0 * PI * g.h * g.annulus_span().powi(2)
}

/// Zone integral for one law over `[r1, r2]`.
pub fn zone_integral(
    scn: &Scenario,
    law: ZoneLaw,
    r1: f64,
    r2: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    match law {
        ZoneLaw::Darcy => s_darcy(scn, r1, r2),
        ZoneLaw::Forchheimer => Ok(s_forch(scn, r1, r2)? * opts.forchheimer_fault),
        ZoneLaw::PreDarcy => s_predarcy(scn, r1, r2, &opts.tolerance),
    }
}

fn contributions(
    scn: &Scenario,
    partition: &ZonePartition,
    opts: &SolverOptions,
) -> Result<ZoneContributions> {
    let [near, mid, far] = partition.intervals(scn.geometry());
    let regime = scn.regime();
    Ok(ZoneContributions {
        near_well: zone_integral(scn, regime.near_well, near.0, near.1, opts)?,
        middle: zone_integral(scn, regime.middle, mid.0, mid.1, opts)?,
        near_boundary: zone_integral(scn, regime.near_boundary, far.0, far.1, opts)?,
    })
}

/// Σ S over the zones, with adjacent zones of the same law integrated as one
/// interval. A single-law regime then never depends on where the zone
/// boundaries fall, e.g. the Darcy PI is bit-identical for every flux.
fn denominator(scn: &Scenario, partition: &ZonePartition, opts: &SolverOptions) -> Result<f64> {
    let bounds = partition.intervals(scn.geometry());
    let laws = scn.regime().laws();
    let mut total = 0.0;
    let mut i = 0;
    while i < 3 {
        let mut j = i;
        while j + 1 < 3 && laws[j + 1] == laws[i] {
            j += 1;
        }
        total += zone_integral(scn, laws[i], bounds[i].0, bounds[j].1, opts)?;
        i = j + 1;
    }
    Ok(total)
}

/// Pseudo-steady-state productivity index of the scenario's regime.
pub fn compute_pi(scn: &Scenario, opts: &SolverOptions) -> Result<PiResult> {
    let partition = scn.partition();
    let parts = contributions(scn, &partition, opts)?;
    let j_raw = numerator(scn) / denominator(scn, &partition, opts)?;
    Ok(PiResult::from_denominator(scn, partition, parts, j_raw))
}

/// Skin ratio J_regime / J_D = S_D[r_w, r_e] / Σ S_zone.
pub fn darcy_ratio(scn: &Scenario, opts: &SolverOptions) -> Result<f64> {
    let g = scn.geometry();
    let darcy = s_darcy(scn, g.r_w, g.r_e)?;
    Ok(darcy / denominator(scn, &scn.partition(), opts)?)
}

/// Darcy PI of the same reservoir, independent of the regime.
pub fn darcy_pi(scn: &Scenario) -> Result<f64> {
    let g = scn.geometry();
    Ok(numerator(scn) / s_darcy(scn, g.r_w, g.r_e)?)
}
