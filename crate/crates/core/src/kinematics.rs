//! Pseudo-steady radial velocity field and the three-zone partition.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{FlowParameters, RegimeAssignment};

/// Cylindrical reservoir drained by a fully penetrating central well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Reservoir radius, m.
    pub r_e: f64,
    /// Well radius, m.
    pub r_w: f64,
    /// Thickness, m.
    pub h: f64,
}

impl Geometry {
    /// r_e = 1000 m, r_w = 0.3 m, h = 10 m.
    pub fn baseline() -> Self {
        Geometry {
            r_e: 1000.0,
            r_w: 0.3,
            h: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.r_w.is_finite() && self.r_w > 0.0) {
            return bad("r_w", "must be finite and > 0");
        }
        if !(self.r_e.is_finite() && self.r_e > self.r_w) {
            return bad("r_e", "must be finite and > r_w");
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return bad("h", "must be finite and > 0");
        }
        Ok(())
    }

    /// r_e² − r_w², computed without cancellation.
    pub fn annulus_span(&self) -> f64 {
        (self.r_e - self.r_w) * (self.r_e + self.r_w)
    }

    /// |U| = 2πh(r_e² − r_w²), the reservoir measure used throughout.
    pub fn measure(&self) -> f64 {
        2.0 * PI * self.h * self.annulus_span()
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Self::baseline()
    }
}

/// A complete, validated problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    geometry: Geometry,
    params: FlowParameters,
    regime: RegimeAssignment,
    q_over_h: f64,
}

impl Scenario {
    pub fn new(
        geometry: Geometry,
        params: FlowParameters,
        regime: RegimeAssignment,
        q_over_h: f64,
    ) -> Result<Self> {
        geometry.validate()?;
        params.validate()?;
        if !(q_over_h.is_finite() && q_over_h > 0.0) {
            return Err(Error::InvalidParameter {
                name: "q_over_h",
                reason: "specific flux must be finite and > 0".into(),
            });
        }
        Ok(Scenario {
            geometry,
            params,
            regime,
            q_over_h,
        })
    }

    /// Reference reservoir with the given regime at Q/h = 1e-4 m²/s.
    pub fn baseline(regime: RegimeAssignment) -> Self {
        Scenario {
            geometry: Geometry::baseline(),
            params: FlowParameters::baseline(),
            regime,
            q_over_h: 1e-4,
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn params(&self) -> &FlowParameters {
        &self.params
    }

    pub fn regime(&self) -> RegimeAssignment {
        self.regime
    }

    pub fn q_over_h(&self) -> f64 {
        self.q_over_h
    }

    /// Total well flux Q, m³/s.
    pub fn flux(&self) -> f64 {
        self.q_over_h * self.geometry.h
    }

    pub fn with_regime(mut self, regime: RegimeAssignment) -> Self {
        self.regime = regime;
        self
    }

    pub fn with_params(self, params: FlowParameters) -> Result<Self> {
        Scenario::new(self.geometry, params, self.regime, self.q_over_h)
    }

    pub fn with_q_over_h(self, q_over_h: f64) -> Result<Self> {
        Scenario::new(self.geometry, self.params, self.regime, q_over_h)
    }

    pub fn with_geometry(self, geometry: Geometry) -> Result<Self> {
        Scenario::new(geometry, self.params, self.regime, self.q_over_h)
    }

    /// A = Q / |U|.
    pub fn flux_density(&self) -> f64 {
        self.flux() / self.geometry.measure()
    }

    /// Radial speed v(r) = A (r_e² − r²) / r.
    pub fn velocity(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.velocity_unchecked(r))
    }

    pub(crate) fn velocity_unchecked(&self, r: f64) -> f64 {
        let r_e = self.geometry.r_e;
        self.flux_density() * (r_e - r) * (r_e + r) / r
    }

    /// Speed at the well face, the maximum of the profile.
    pub fn well_velocity(&self) -> f64 {
        self.velocity_unchecked(self.geometry.r_w)
    }

    /// Inverse of [`velocity`](Self::velocity): the radius where the speed
    /// equals `v`.
    pub fn radius_of_velocity(&self, v: f64) -> Result<f64> {
        let v_max = self.well_velocity();
        if !(v >= 0.0 && v <= v_max) {
            return Err(Error::SpeedOutOfRange { v, v_max });
        }
        let r = self.radius_unclamped(v);
        Ok(r.clamp(self.geometry.r_w, self.geometry.r_e))
    }

    /// Positive root of A r² + v r − A r_e² = 0 in rationalized form.
    fn radius_unclamped(&self, v: f64) -> f64 {
        let a = self.flux_density();
        let r_e = self.geometry.r_e;
        let two_a_re = 2.0 * a * r_e;
        two_a_re * r_e / (v + v.hypot(two_a_re))
    }

    /// Critical radii r_F = r(v_F) and r_D = r(v_D), clamped to the annulus.
    pub fn partition(&self) -> ZonePartition {
        let Geometry { r_w, r_e, .. } = self.geometry;
        let clamp = |v: f64| {
            if v <= 0.0 {
                // Zero speed is reached exactly at the outer boundary.
                return (r_e, false);
            }
            let r = self.radius_unclamped(v);
            if r < r_w {
                (r_w, true)
            } else if r > r_e {
                (r_e, true)
            } else {
                (r, false)
            }
        };
        let (r_f, f_clamped) = clamp(self.params.v_f);
        let (r_d, d_clamped) = clamp(self.params.v_d);
        ZonePartition {
            r_f,
            r_d: r_d.max(r_f),
            r_f_clamped: f_clamped,
            r_d_clamped: d_clamped,
        }
    }

    pub(crate) fn check_radius(&self, r: f64) -> Result<()> {
        let Geometry { r_w, r_e, .. } = self.geometry;
        if r >= r_w && r <= r_e {
            Ok(())
        } else {
            Err(Error::RadiusOutOfRange { r, r_w, r_e })
        }
    }

    pub(crate) fn check_interval(&self, r1: f64, r2: f64) -> Result<()> {
        let Geometry { r_w, r_e, .. } = self.geometry;
        if r1 >= r_w && r1 <= r2 && r2 <= r_e {
            Ok(())
        } else {
            Err(Error::IntervalOutOfRange { r1, r2, r_w, r_e })
        }
    }
}

/// Radii delimiting the fast `[r_w, r_F]`, moderate `[r_F, r_D]` and slow
/// `[r_D, r_e]` zones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZonePartition {
    pub r_f: f64,
    pub r_d: f64,
    /// r(v_F) fell outside the annulus and was clamped.
    pub r_f_clamped: bool,
    /// r(v_D) fell outside the annulus and was clamped.
    pub r_d_clamped: bool,
}

impl ZonePartition {
    /// The three zone intervals, near-well first.
    pub fn intervals(&self, geometry: &Geometry) -> [(f64, f64); 3] {
        [
            (geometry.r_w, self.r_f),
            (self.r_f, self.r_d),
            (self.r_d, geometry.r_e),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small(v_f: f64, v_d: f64) -> Scenario {
        let geometry = Geometry {
            r_e: 100.0,
            ..Geometry::baseline()
        };
        let params = FlowParameters {
            v_f,
            v_d,
            ..FlowParameters::baseline()
        };
        Scenario::new(geometry, params, RegimeAssignment::FDPD, 1e-4).unwrap()
    }

    /// Bisection on the forward map, independent of the closed-form inverse.
    fn bisect_radius(scn: &Scenario, v: f64) -> f64 {
        let (mut lo, mut hi) = (scn.geometry().r_w, scn.geometry().r_e);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if scn.velocity(mid).unwrap() > v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn flux_density_examples() {
        let big = Scenario::baseline(RegimeAssignment::DARCY);
        assert_relative_eq!(big.flux_density(), 1.591_549_574_158_415e-11, max_relative = 1e-13);
        assert_relative_eq!(
            small(1e-5, 1e-7).flux_density(),
            1.591_563_754_992_748_4e-9,
            max_relative = 1e-13
        );
    }

    #[test]
    fn rejects_nonpositive_flux() {
        let scn = Scenario::baseline(RegimeAssignment::DARCY);
        assert!(scn.with_q_over_h(0.0).is_err());
        assert!(scn.with_q_over_h(-1.0).is_err());
        let bad = Geometry {
            r_w: 2.0,
            r_e: 1.0,
            h: 1.0,
        };
        assert!(scn.with_geometry(bad).is_err());
    }

    #[test]
    fn velocity_endpoints() {
        let scn = Scenario::baseline(RegimeAssignment::DARCY);
        assert_eq!(scn.velocity(1000.0).unwrap(), 0.0);
        assert_relative_eq!(
            scn.velocity(0.3).unwrap(),
            5.305_164_769_729_845e-5,
            max_relative = 1e-13
        );
        let mid = scn.velocity(10.0).unwrap();
        assert!(mid > 0.0 && mid < scn.well_velocity());
        assert!(scn.velocity(0.1).is_err());
        assert!(scn.velocity(1000.5).is_err());
    }

    #[test]
    fn radius_of_velocity_examples() {
        let scn = small(1e-5, 1e-7);
        assert_eq!(scn.radius_of_velocity(0.0).unwrap(), 100.0);
        assert_relative_eq!(
            scn.radius_of_velocity(scn.well_velocity()).unwrap(),
            0.3,
            max_relative = 1e-13
        );
        let r = scn.radius_of_velocity(1e-5).unwrap();
        assert_relative_eq!(r, bisect_radius(&scn, 1e-5), max_relative = 1e-12);
        assert_relative_eq!(r, 1.591_160_804_042_413, max_relative = 1e-12);
        assert!(scn.radius_of_velocity(-1e-9).is_err());
        assert!(scn.radius_of_velocity(1.0).is_err());
    }

    #[test]
    fn partition_examples() {
        let part = small(1e-5, 1e-7).partition();
        assert_relative_eq!(part.r_f, 1.591_160_804_042_413, max_relative = 1e-12);
        assert_relative_eq!(part.r_d, 73.402_974_185_837_07, max_relative = 1e-12);
        assert!(!part.r_f_clamped && !part.r_d_clamped);

        let no_fast = small(1.0, 1e-7).partition();
        assert_eq!(no_fast.r_f, 0.3);
        assert!(no_fast.r_f_clamped);

        let no_slow = small(1e-5, 0.0).partition();
        assert_eq!(no_slow.r_d, 100.0);
        assert!(!no_slow.r_d_clamped);
    }

    /// Double-double arithmetic, enough to evaluate the printed inverse
    /// formula without its cancellation near the well.
    #[derive(Clone, Copy)]
    struct Dd(f64, f64);

    impl Dd {
        fn new(x: f64) -> Dd {
            Dd(x, 0.0)
        }
        fn quick(s: f64, e: f64) -> Dd {
            let hi = s + e;
            Dd(hi, e - (hi - s))
        }
        fn add(self, o: Dd) -> Dd {
            let s = self.0 + o.0;
            let bb = s - self.0;
            let err = (self.0 - (s - bb)) + (o.0 - bb);
            Dd::quick(s, err + self.1 + o.1)
        }
        fn neg(self) -> Dd {
            Dd(-self.0, -self.1)
        }
        fn mul(self, o: Dd) -> Dd {
            let p = self.0 * o.0;
            let e = self.0.mul_add(o.0, -p) + self.0 * o.1 + self.1 * o.0;
            Dd::quick(p, e)
        }
        fn sqrt(self) -> Dd {
            let s = self.0.sqrt();
            let rem = self.add(Dd::new(s).mul(Dd::new(s)).neg());
            Dd::quick(s, rem.0 / (2.0 * s))
        }
        fn to_f64(self) -> f64 {
            self.0 + self.1
        }
    }

    #[test]
    fn printed_and_rationalized_inverse_agree() {
        for scn in [Scenario::baseline(RegimeAssignment::DARCY), small(1e-5, 1e-7)] {
            let g = scn.geometry();
            let qh = scn.q_over_h();
            let span = Dd::new(g.r_e).mul(Dd::new(g.r_e)).add(Dd::new(g.r_w).mul(Dd::new(g.r_w)).neg());
            let printed = |v: f64| {
                let pv = Dd::new(PI).mul(span).mul(Dd::new(v));
                let c = Dd::new(qh).mul(Dd::new(g.r_e));
                let root = pv.mul(pv).add(c.mul(c)).sqrt();
                root.add(pv.neg()).to_f64() / qh
            };
            let v_max = scn.well_velocity();
            let (lo, hi) = (1e-12f64.ln(), v_max.ln());
            for i in 0..=200 {
                let v = (lo + (hi - lo) * i as f64 / 200.0).exp().min(v_max);
                let r = scn.radius_of_velocity(v).unwrap();
                assert_relative_eq!(r, printed(v), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn velocity_strictly_decreasing_and_round_trip() {
        for scn in [Scenario::baseline(RegimeAssignment::DARCY), small(1e-5, 1e-7)] {
            let g = *scn.geometry();
            let n = 100;
            let mut prev = f64::INFINITY;
            for i in 0..n {
                let t = i as f64 / (n - 1) as f64;
                let r = (g.r_w.ln() + t * (g.r_e.ln() - g.r_w.ln())).exp().min(g.r_e);
                let v = scn.velocity(r).unwrap();
                assert!(v < prev || (i == n - 1 && v == 0.0));
                prev = v;
                let back = scn.radius_of_velocity(v).unwrap();
                assert_relative_eq!(back, r, max_relative = 1e-10);
            }
        }
    }
}
