//! Well productivity index under pre-Darcy, Darcy and Forchheimer flow.
//!
//! A [`Scenario`] fixes the drainage annulus, the constitutive parameters,
//! the assignment of laws to the three radial zones and the production rate.
//! [`compute_pi`] returns the pseudo-steady-state productivity index from
//! closed-form and quadrature zone integrals; [`oracle`] recomputes it along
//! independent routes, and [`prefit`] estimates pre-Darcy parameters from
//! laboratory measurements.

// `!(x >= 0.0)` rejects NaN along with negatives; quadrature nodes are kept
// at their tabulated precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod error;
pub mod kinematics;
pub mod model;
pub mod ode;
pub mod oracle;
pub mod prefit;
pub mod productivity;
pub mod quadrature;

pub use error::{Error, Result};
pub use kinematics::{Geometry, Scenario, ZonePartition};
pub use model::{FlowParameters, RegimeAssignment, ZoneLaw};
pub use prefit::{fit_segments, synthesize_measurements, FitResult, FlowMeasurement};
pub use productivity::{
    compute_pi, darcy_pi, darcy_ratio, PiResult, SolverOptions, ZoneContributions,
};
pub use quadrature::{IntegralResult, Tolerance};
