//! Adaptive Gauss–Kronrod integration and the zone integrals S_D, S_F, S_pD.
//!
//! All three zone integrals share the weight `(r_e² − r²)² / r`:
//!
//! ```text
//! S_D [r1,r2] = α ∫ (r_e² − r²)² r⁻¹ dr
//! S_F [r1,r2] = ∫ [α + βA (r_e² − r²) r⁻¹] (r_e² − r²)² r⁻¹ dr
//! S_pD[r1,r2] = λ A^(−s) ∫ (r_e² − r²)^(2−s) r^(s−1) dr
//! ```
//!
//! S_D and S_F have closed forms; S_pD is evaluated by quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::kinematics::Scenario;

/// Default cap on the number of panels kept by the adaptive integrator.
pub const DEFAULT_MAX_PANELS: usize = 2000;

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub subdivisions: usize,
}

/// Accuracy targets for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-300,
            max_panels: DEFAULT_MAX_PANELS,
        }
    }
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            rel,
            ..Tolerance::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

// Kronrod abscissae on [0, 1] (odd indices are the 7-point Gauss nodes).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties resolved by position for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 15-point Kronrod evaluation with the embedded 7-point Gauss estimate.
fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let width = half.abs();
    let value = kronrod * half;
    res_abs *= width;
    res_asc *= width;
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, error }
}

/// Globally adaptive integration of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets `max(tol.abs, tol.rel·|value|)`. Panels are summed in
/// position order so the result does not depend on the refinement history.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<IntegralResult> {
    if !(a <= b) {
        return Err(Error::Domain {
            what: "integration interval",
            value: a,
            reason: "lower limit must not exceed upper limit",
        });
    }
    if a == b {
        return Ok(IntegralResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            subdivisions: 0,
        });
    }

    let first = gauss_kronrod_15(&f, a, b);
    if !first.value.is_finite() {
        return Err(Error::Domain {
            what: "integrand",
            value: first.value,
            reason: "integrand is not finite on the interval",
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut total = first.value;
    let mut total_err = first.error;

    loop {
        if total_err <= tol.target(total) {
            break;
        }
        if heap.len() >= tol.max_panels {
            return Err(non_convergence(heap));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point.
            heap.push(worst);
            return Err(non_convergence(heap));
        }
        let left = gauss_kronrod_15(&f, worst.a, mid);
        let right = gauss_kronrod_15(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if !total.is_finite() {
            return Err(Error::Domain {
                what: "integrand",
                value: total,
                reason: "integrand is not finite on the interval",
            });
        }
    }

    let (value, err, panels) = ordered_sum(heap);
    Ok(IntegralResult {
        value,
        abs_error_estimate: err,
        subdivisions: panels,
    })
}

fn ordered_sum(heap: BinaryHeap<Panel>) -> (f64, f64, usize) {
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let err = panels.iter().map(|p| p.error).sum();
    (value, err, panels.len())
}

fn non_convergence(heap: BinaryHeap<Panel>) -> Error {
    let (estimate, error_estimate, panels) = ordered_sum(heap);
    Error::QuadratureNonConvergence {
        estimate,
        error_estimate,
        panels,
    }
}

/// ∫ (r_e² − r²)² / r dr over `[r1, r2]`, closed form.
fn darcy_kernel_integral(r_e: f64, r1: f64, r2: f64) -> f64 {
    if r1 == r2 {
        return 0.0;
    }
    let re2 = r_e * r_e;
    let d1 = r2 - r1;
    let log_ratio = (d1 / r1).ln_1p();
    let d2 = d1 * (r2 + r1);
    let d4 = d2 * (r2 * r2 + r1 * r1);
    re2 * re2 * log_ratio - re2 * d2 + 0.25 * d4
}

/// ∫ (r_e² − r²)³ / r² dr over `[r1, r2]`, closed form.
fn forchheimer_kernel_integral(r_e: f64, r1: f64, r2: f64) -> f64 {
    if r1 == r2 {
        return 0.0;
    }
    let re2 = r_e * r_e;
    let d1 = r2 - r1;
    let inv = d1 / (r1 * r2); // 1/r1 − 1/r2
    let d3 = d1 * (r2 * r2 + r2 * r1 + r1 * r1);
    let d5 = d1 * (r2.powi(4) + r2.powi(3) * r1 + r2 * r2 * r1 * r1 + r2 * r1.powi(3) + r1.powi(4));
    re2 * re2 * re2 * inv - 3.0 * re2 * re2 * d1 + re2 * d3 - 0.2 * d5
}

/// Darcy zone integral S_D[r1, r2].
pub fn s_darcy(scn: &Scenario, r1: f64, r2: f64) -> Result<f64> {
    scn.check_interval(r1, r2)?;
    Ok(scn.params().alpha * darcy_kernel_integral(scn.geometry().r_e, r1, r2))
}

/// Forchheimer zone integral S_F[r1, r2].
pub fn s_forch(scn: &Scenario, r1: f64, r2: f64) -> Result<f64> {
    scn.check_interval(r1, r2)?;
    let r_e = scn.geometry().r_e;
    let p = scn.params();
    let inertial = p.beta * scn.flux_density() * forchheimer_kernel_integral(r_e, r1, r2);
    Ok(p.alpha * darcy_kernel_integral(r_e, r1, r2) + inertial)
}

/// Pre-Darcy zone integral S_pD[r1, r2], by adaptive quadrature.
pub fn s_predarcy(scn: &Scenario, r1: f64, r2: f64, tol: &Tolerance) -> Result<f64> {
    scn.check_interval(r1, r2)?;
    if r1 == r2 {
        return Ok(0.0);
    }
    let r_e = scn.geometry().r_e;
    let p = scn.params();
    let s = p.s;
    let kernel = |r: f64| ((r_e - r) * (r_e + r)).powf(2.0 - s) * r.powf(s - 1.0);
    let integral = integrate(kernel, r1, r2, tol)?;
    Ok(p.lambda * scn.flux_density().powf(-s) * integral.value)
}

/// S_D[r1, r2] by quadrature of the Darcy integrand, bypassing the closed form.
pub fn s_darcy_quadrature(scn: &Scenario, r1: f64, r2: f64, tol: &Tolerance) -> Result<f64> {
    scn.check_interval(r1, r2)?;
    let r_e = scn.geometry().r_e;
    let alpha = scn.params().alpha;
    let f = |r: f64| {
        let w = (r_e - r) * (r_e + r);
        alpha * w * w / r
    };
    Ok(integrate(f, r1, r2, tol)?.value)
}

/// S_F[r1, r2] by quadrature of the Forchheimer integrand.
pub fn s_forch_quadrature(scn: &Scenario, r1: f64, r2: f64, tol: &Tolerance) -> Result<f64> {
    scn.check_interval(r1, r2)?;
    let r_e = scn.geometry().r_e;
    let p = *scn.params();
    let a = scn.flux_density();
    let f = |r: f64| {
        let w = (r_e - r) * (r_e + r);
        (p.alpha + p.beta * a * w / r) * w * w / r
    };
    Ok(integrate(f, r1, r2, tol)?.value)
}
