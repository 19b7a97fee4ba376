//! Independent validation paths for the productivity index.
//!
//! [`pi_from_profile`] rebuilds the PI from the pressure profile W(r) by
//! nested quadrature instead of the zone integrals, and
//! [`compressible_velocity`] solves the radial continuity equation with the
//! compressibility term retained so its distance from the truncated profile
//! can be measured.

use std::f64::consts::PI;

use crate::error::Result;
use crate::kinematics::{Scenario, ZonePartition};
use crate::model::ZoneLaw;
use crate::ode::{self, StepControl};
use crate::productivity::{PiResult, SolverOptions, ZoneContributions};
use crate::quadrature::integrate;

/// One point of the basic pressure profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    /// Radius, m.
    pub r: f64,
    /// W(r), Pa; zero on the well.
    pub w: f64,
    /// Radial speed, m/s.
    pub v: f64,
}

struct Zones {
    bounds: [(f64, f64); 3],
    laws: [ZoneLaw; 3],
}

impl Zones {
    fn new(scn: &Scenario, partition: &ZonePartition) -> Self {
        Zones {
            bounds: partition.intervals(scn.geometry()),
            laws: scn.regime().laws(),
        }
    }
}

/// Pressure gradient g(v)·v at radius `r` under `law`.
fn gradient_at(scn: &Scenario, law: ZoneLaw, r: f64) -> f64 {
    scn.params()
        .pressure_gradient(law, scn.velocity_unchecked(r).max(0.0))
}

/// W(r) = ∫_{r_w}^{r} g(v(ρ)) v(ρ) dρ with the zone law at each ρ.
pub fn pressure_profile(scn: &Scenario, r: f64, opts: &SolverOptions) -> Result<f64> {
    scn.check_radius(r)?;
    let zones = Zones::new(scn, &scn.partition());
    let mut w = 0.0;
    for (&(a, b), &law) in zones.bounds.iter().zip(&zones.laws) {
        if r <= a {
            break;
        }
        let upper = b.min(r);
        w += integrate(|x| gradient_at(scn, law, x), a, upper, &opts.tolerance)?.value;
    }
    Ok(w)
}

/// W, v sampled on `n` log-spaced radii from r_w to r_e.
pub fn profile_samples(scn: &Scenario, n: usize, opts: &SolverOptions) -> Result<Vec<ProfileSample>> {
    let g = scn.geometry();
    let (lo, hi) = (g.r_w.ln(), g.r_e.ln());
    (0..n)
        .map(|i| {
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            let r = if i + 1 == n { g.r_e } else { (lo + t * (hi - lo)).exp() };
            let r = r.clamp(g.r_w, g.r_e);
            Ok(ProfileSample {
                r,
                w: pressure_profile(scn, r, opts)?,
                v: scn.velocity(r)?,
            })
        })
        .collect()
}

/// PI from the pressure profile, `J = Q|U| / ∫_U W dx`.
///
/// The volume integral uses the same measure as |U| = 2πh(r_e² − r_w²),
/// i.e. `∫_U W dx = 4πh ∫ r W(r) dr`. W is itself a quadrature, so this is a
/// nested integration that never touches the zone-integral closed forms.
/// `contributions` holds the per-zone dissipation `A⁻² ∫ r g(v) v² dr`,
/// which equals the zone S-integral.
pub fn pi_from_profile(scn: &Scenario, opts: &SolverOptions) -> Result<PiResult> {
    let partition = scn.partition();
    let zones = Zones::new(scn, &partition);
    let tol = &opts.tolerance;

    // W at each zone's inner edge.
    let mut w_start = [0.0; 3];
    for i in 1..3 {
        let (a, b) = zones.bounds[i - 1];
        let law = zones.laws[i - 1];
        w_start[i] = w_start[i - 1] + integrate(|x| gradient_at(scn, law, x), a, b, tol)?.value;
    }

    let mut moment = 0.0;
    for i in 0..3 {
        let (a, b) = zones.bounds[i];
        let law = zones.laws[i];
        let inner_err = std::cell::Cell::new(None);
        let w_of = |r: f64| match integrate(|x| gradient_at(scn, law, x), a, r, tol) {
            Ok(res) => w_start[i] + res.value,
            Err(e) => {
                inner_err.set(Some(e));
                f64::NAN
            }
        };
        let outer = integrate(|r| r * w_of(r), a, b, tol);
        if let Some(e) = inner_err.take() {
            return Err(e);
        }
        moment += outer?.value;
    }

    let g = scn.geometry();
    let volume_integral = 4.0 * PI * g.h * moment;
    let j_raw = scn.flux() * g.measure() / volume_integral;

    let contributions = dissipation_by_zone(scn, &partition, opts)?;
    Ok(PiResult::from_denominator(scn, partition, contributions, j_raw))
}

fn dissipation_by_zone(
    scn: &Scenario,
    partition: &ZonePartition,
    opts: &SolverOptions,
) -> Result<ZoneContributions> {
    let zones = Zones::new(scn, partition);
    let a = scn.flux_density();
    let p = scn.params();
    let mut parts = [0.0; 3];
    for (i, part) in parts.iter_mut().enumerate() {
        let (lo, hi) = zones.bounds[i];
        let law = zones.laws[i];
        let f = |r: f64| r * p.dissipation(law, scn.velocity_unchecked(r).max(0.0));
        *part = integrate(f, lo, hi, &opts.tolerance)?.value / (a * a);
    }
    Ok(ZoneContributions {
        near_well: parts[0],
        middle: parts[1],
        near_boundary: parts[2],
    })
}

/// PI from the energy identity `J = Q² / (2πh ∫ r g(v) v² dr)`.
pub fn pi_from_dissipation(scn: &Scenario, opts: &SolverOptions) -> Result<f64> {
    let parts = dissipation_by_zone(scn, &scn.partition(), opts)?;
    let a = scn.flux_density();
    let g = scn.geometry();
    let q = scn.flux();
    Ok(q * q / (2.0 * PI * g.h * a * a * parts.total()))
}

/// Speed with and without the compressibility term at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocitySample {
    pub r: f64,
    pub v_gamma: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressibleProfile {
    pub gamma: f64,
    /// Samples ordered by increasing radius, r_w and r_e included.
    pub samples: Vec<VelocitySample>,
}

impl CompressibleProfile {
    /// max_r |v_γ(r) − v(r)|.
    pub fn max_deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.v_gamma - s.v).abs())
            .fold(0.0, f64::max)
    }
}

/// Solves `(r v_γ)' = −2A r − γ r g(v_γ) v_γ²`, `v_γ(r_e) = 0`, from r_e
/// inwards to r_w.
///
/// At γ = 0 this reduces to the truncated equation whose solution is
/// [`Scenario::velocity`]. The law in each zone follows the partition of the
/// truncated profile; integration restarts at each zone boundary.
pub fn compressible_velocity(scn: &Scenario, gamma: f64) -> Result<CompressibleProfile> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(crate::error::Error::InvalidParameter {
            name: "gamma",
            reason: "must be finite and >= 0".into(),
        });
    }
    let partition = scn.partition();
    let zones = Zones::new(scn, &partition);
    let a = scn.flux_density();
    let g = scn.geometry();
    let p = *scn.params();
    let scale = a * g.r_e * g.r_e;
    let ctl = StepControl {
        rel_tol: 1e-12,
        abs_tol: 1e-12 * scale,
        ..StepControl::default()
    };

    // y = r v_γ, swept from the outer boundary inwards.
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut y = 0.0;
    for i in (0..3).rev() {
        let (lo, hi) = zones.bounds[i];
        if hi <= lo {
            continue;
        }
        let law = zones.laws[i];
        let rhs = |r: f64, y: f64| {
            let v = (y / r).max(0.0);
            -2.0 * a * r - gamma * r * p.dissipation(law, v)
        };
        let seg = ode::integrate(rhs, hi, y, lo, &ctl)?;
        let skip = usize::from(!points.is_empty());
        points.extend(seg.iter().skip(skip));
        y = seg.last().map(|pt| pt.1).unwrap_or(y);
    }
    points.reverse();

    let samples = points
        .into_iter()
        .map(|(r, y)| VelocitySample {
            r,
            v_gamma: y / r,
            v: scn.velocity_unchecked(r),
        })
        .collect();
    Ok(CompressibleProfile { gamma, samples })
}
