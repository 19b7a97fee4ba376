//! Recovering pre-Darcy parameters from (velocity, pressure gradient) data.
//!
//! Data are fitted in log-log coordinates with two segments: a free-slope
//! line `ln|∇p| = ln λ + (1 − s) ln v` below the breakpoint and a unit-slope
//! Darcy line `ln|∇p| = ln α + ln v` above it. Every admissible breakpoint is
//! tried and the one with the smallest total squared residual wins.

use std::io::Read;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::FlowParameters;

/// Minimum number of points on each side of a breakpoint.
pub const MIN_SEGMENT_POINTS: usize = 3;
/// Minimum number of measurements accepted by [`fit_segments`].
pub const MIN_POINTS: usize = 2 * MIN_SEGMENT_POINTS;
/// Partial F statistic a two-segment fit needs before it is preferred over a
/// single Darcy line.
pub const SPLIT_F_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowMeasurement {
    /// Superficial velocity, m/s.
    pub v: f64,
    /// Pressure-gradient magnitude, Pa/m.
    pub grad_p: f64,
}

impl FlowMeasurement {
    pub fn new(v: f64, grad_p: f64) -> Result<Self> {
        let m = FlowMeasurement { v, grad_p };
        m.check(0)?;
        Ok(m)
    }

    fn check(&self, row: usize) -> Result<()> {
        if !(self.v.is_finite() && self.v > 0.0) {
            return Err(Error::InvalidMeasurement {
                row,
                reason: format!("velocity must be positive, got {}", self.v),
            });
        }
        if !(self.grad_p.is_finite() && self.grad_p > 0.0) {
            return Err(Error::InvalidMeasurement {
                row,
                reason: format!("pressure gradient must be positive, got {}", self.grad_p),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub s_hat: f64,
    pub lambda_hat: f64,
    pub alpha_hat: f64,
    /// Breakpoint velocity; 0 when no pre-Darcy segment was found.
    pub v_d_hat: f64,
    /// Total squared residual in natural-log space.
    pub sse_total: f64,
    /// Points below and above the breakpoint.
    pub points_per_segment: (usize, usize),
    /// Slope of an unconstrained line through the Darcy segment.
    pub darcy_slope_free: f64,
    /// No breakpoint improved on a single Darcy line.
    pub darcy_only: bool,
}

impl FitResult {
    /// Pressure gradient predicted by the fitted two-segment model.
    pub fn predict(&self, v: f64) -> f64 {
        if v < self.v_d_hat {
            self.lambda_hat * v.powf(1.0 - self.s_hat)
        } else {
            self.alpha_hat * v
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct LineFit {
    intercept: f64,
    slope: f64,
    sse: f64,
}

/// Least squares with the slope constrained to `[lo, hi]`.
fn fit_line(x: &[f64], y: &[f64], lo: f64, hi: f64) -> Option<LineFit> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = (sxy / sxx).clamp(lo, hi);
    Some(fixed_slope(x, y, slope))
}

fn fixed_slope(x: &[f64], y: &[f64], slope: f64) -> LineFit {
    let n = x.len() as f64;
    let intercept = x.iter().zip(y).map(|(xi, yi)| yi - slope * xi).sum::<f64>() / n;
    let sse = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    LineFit {
        intercept,
        slope,
        sse,
    }
}

fn free_slope(x: &[f64], y: &[f64]) -> f64 {
    fit_line(x, y, f64::NEG_INFINITY, f64::INFINITY).map_or(f64::NAN, |f| f.slope)
}

/// Segmented log-log fit of pre-Darcy and Darcy branches.
pub fn fit_segments(data: &[FlowMeasurement]) -> Result<FitResult> {
    if data.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            required: MIN_POINTS,
            got: data.len(),
        });
    }
    for (i, m) in data.iter().enumerate() {
        m.check(i + 1)?;
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.v.total_cmp(&b.v).then(a.grad_p.total_cmp(&b.grad_p)));
    if sorted.first().map(|m| m.v) == sorted.last().map(|m| m.v) {
        return Err(Error::DegenerateData("all velocities are equal".into()));
    }

    let x: Vec<f64> = sorted.iter().map(|m| m.v.ln()).collect();
    let y: Vec<f64> = sorted.iter().map(|m| m.grad_p.ln()).collect();
    let n = x.len();

    let darcy_all = fixed_slope(&x, &y, 1.0);

    // Best split: (sse, index of first Darcy point, lower fit, upper fit).
    let mut best: Option<(f64, usize, LineFit, LineFit)> = None;
    for k in MIN_SEGMENT_POINTS..=n - MIN_SEGMENT_POINTS {
        if x[k - 1] == x[k] {
            continue;
        }
        let Some(lower) = fit_line(&x[..k], &y[..k], 0.0, 1.0) else {
            continue;
        };
        let upper = fixed_slope(&x[k..], &y[k..], 1.0);
        let sse = lower.sse + upper.sse;
        // Strict comparison keeps the smaller breakpoint on ties.
        if best.as_ref().is_none_or(|b| sse < b.0) {
            best = Some((sse, k, lower, upper));
        }
    }

    let darcy_only_result = || FitResult {
        s_hat: 0.0,
        lambda_hat: darcy_all.intercept.exp(),
        alpha_hat: darcy_all.intercept.exp(),
        v_d_hat: 0.0,
        sse_total: darcy_all.sse,
        points_per_segment: (0, n),
        darcy_slope_free: free_slope(&x, &y),
        darcy_only: true,
    };

    let Some((sse, k, lower, upper)) = best else {
        if x.iter().all(|xi| *xi == x[0]) {
            return Err(Error::DegenerateData("all velocities are equal".into()));
        }
        return Err(Error::DegenerateData(
            "no breakpoint leaves a segment with distinct velocities".into(),
        ));
    };

    let s_hat = 1.0 - lower.slope;
    let exact_darcy = darcy_all.sse <= n as f64 * 1e-24;
    let significant = if sse <= 0.0 {
        darcy_all.sse > 0.0
    } else {
        let dof = (n - 4).max(1) as f64;
        ((darcy_all.sse - sse) / 3.0) / (sse / dof) > SPLIT_F_THRESHOLD
    };
    if exact_darcy || !significant || s_hat <= 0.0 {
        return Ok(darcy_only_result());
    }

    Ok(FitResult {
        s_hat,
        lambda_hat: lower.intercept.exp(),
        alpha_hat: upper.intercept.exp(),
        v_d_hat: (sorted[k - 1].v * sorted[k].v).sqrt(),
        sse_total: sse,
        points_per_segment: (k, n - k),
        darcy_slope_free: free_slope(&x[k..], &y[k..]),
        darcy_only: false,
    })
}

/// Measurements generated from the composite law, `|∇p| = g(v)·v`, with
/// multiplicative log-normal noise `exp(noise_rel · N(0, 1))`.
///
/// The law at each velocity is selected from `params.v_d` and `params.v_f`.
/// A fixed seed always produces the same output.
pub fn synthesize_measurements(
    params: &FlowParameters,
    v_grid: &[f64],
    noise_rel: f64,
    seed: u64,
) -> Vec<FlowMeasurement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    v_grid
        .iter()
        .map(|&v| {
            let clean = params.pressure_gradient(params.law_at_speed(v), v);
            let grad_p = if noise_rel > 0.0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                clean * (noise_rel * z).exp()
            } else {
                clean
            };
            FlowMeasurement { v, grad_p }
        })
        .collect()
}

/// Reads measurements from CSV with header `v_m_per_s,grad_p_pa_per_m`.
pub fn read_measurements<R: Read>(reader: R) -> Result<Vec<FlowMeasurement>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(iv), Some(ig)) = (col("v_m_per_s"), col("grad_p_pa_per_m")) else {
        return Err(Error::Csv(format!(
            "expected header `v_m_per_s,grad_p_pa_per_m`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    };
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let field = |idx: usize, what: &str| -> Result<f64> {
            let raw = record.get(idx).unwrap_or("");
            raw.parse::<f64>().map_err(|_| Error::InvalidMeasurement {
                row,
                reason: format!("cannot parse {what} `{raw}`"),
            })
        };
        let m = FlowMeasurement {
            v: field(iv, "velocity")?,
            grad_p: field(ig, "pressure gradient")?,
        };
        m.check(row)?;
        out.push(m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    fn lab_params(s: f64) -> FlowParameters {
        FlowParameters {
            alpha: 1.01e10,
            lambda: 1.01e10,
            s,
            v_d: 5e-8,
            v_f: 1.0,
            ..FlowParameters::baseline()
        }
    }

    #[test]
    fn noiseless_round_trip() {
        let grid = log_grid(1e-9, 1e-6, 20);
        for s in [0.1, 0.3, 0.5772, 0.6562, 0.9] {
            let data = synthesize_measurements(&lab_params(s), &grid, 0.0, 1);
            let fit = fit_segments(&data).unwrap();
            assert!((fit.s_hat - s).abs() < 1e-6, "s = {s}: {}", fit.s_hat);
            assert_relative_eq!(fit.lambda_hat, 1.01e10, max_relative = 1e-6);
            assert_relative_eq!(fit.alpha_hat, 1.01e10, max_relative = 1e-9);
            let (below, above) = fit.points_per_segment;
            assert!(grid[below - 1] < 5e-8 && 5e-8 <= grid[below]);
            assert!(fit.v_d_hat > grid[below - 1] && fit.v_d_hat < grid[below]);
            assert_eq!(below + above, 20);
            assert!(!fit.darcy_only);
            assert_relative_eq!(fit.darcy_slope_free, 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn pure_darcy_falls_back() {
        let grid = log_grid(1e-7, 1e-5, 12);
        let data = synthesize_measurements(&lab_params(0.6), &grid, 0.0, 1);
        let fit = fit_segments(&data).unwrap();
        assert!(fit.darcy_only);
        assert_eq!(fit.s_hat, 0.0);
        assert_eq!(fit.lambda_hat, fit.alpha_hat);
        assert_relative_eq!(fit.alpha_hat, 1.01e10, max_relative = 1e-12);

        let noisy = synthesize_measurements(&lab_params(0.6), &grid, 0.01, 11);
        assert!(fit_segments(&noisy).unwrap().darcy_only);
    }

    #[test]
    fn noisy_recovery() {
        let grid = log_grid(1e-9, 1e-6, 20);
        for trial in 0..100 {
            let data = synthesize_measurements(&lab_params(0.6562), &grid, 0.01, 1000 + trial);
            let fit = fit_segments(&data).unwrap();
            assert!((fit.s_hat - 0.6562).abs() <= 0.05, "trial {trial}: {}", fit.s_hat);
        }
    }

    #[test]
    fn synthesized_branches() {
        let p = lab_params(0.4);
        let data = synthesize_measurements(&p, &[1e-9, 1e-6], 0.0, 0);
        assert_eq!(data[0].grad_p, p.lambda * 1e-9f64.powf(0.6));
        assert_eq!(data[1].grad_p, p.alpha * 1e-6);
        let a = synthesize_measurements(&p, &[1e-9, 1e-8, 1e-7], 0.05, 42);
        let b = synthesize_measurements(&p, &[1e-9, 1e-8, 1e-7], 0.05, 42);
        assert_eq!(a, b);
        assert_ne!(a, synthesize_measurements(&p, &[1e-9, 1e-8, 1e-7], 0.05, 43));
    }

    #[test]
    fn input_errors() {
        let five: Vec<_> = (1..=5).map(|i| FlowMeasurement { v: i as f64, grad_p: 1.0 }).collect();
        assert!(matches!(
            fit_segments(&five),
            Err(Error::InsufficientData { required: 6, got: 5 })
        ));
        let same: Vec<_> = (0..8).map(|i| FlowMeasurement { v: 1.0, grad_p: i as f64 + 1.0 }).collect();
        assert!(matches!(fit_segments(&same), Err(Error::DegenerateData(_))));
        let mut bad = five.clone();
        bad.push(FlowMeasurement { v: -1.0, grad_p: 1.0 });
        assert!(matches!(
            fit_segments(&bad),
            Err(Error::InvalidMeasurement { row: 6, .. })
        ));
        assert!(FlowMeasurement::new(0.0, 1.0).is_err());
    }

    #[test]
    fn csv_reading() {
        let text = "v_m_per_s, grad_p_pa_per_m\n1e-8, 3.5\n# comment\n2e-8,7.0\n";
        let data = read_measurements(text.as_bytes()).unwrap();
        assert_eq!(data, vec![
            FlowMeasurement { v: 1e-8, grad_p: 3.5 },
            FlowMeasurement { v: 2e-8, grad_p: 7.0 },
        ]);
        let bad = "v_m_per_s,grad_p_pa_per_m\n1e-8,3\n0,2\n";
        assert!(matches!(
            read_measurements(bad.as_bytes()),
            Err(Error::InvalidMeasurement { row: 2, .. })
        ));
        assert!(read_measurements("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_measurements("v_m_per_s,grad_p_pa_per_m\nx,2\n".as_bytes()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn permutation_and_scale(seed in 0u64..1000, c in 1e-3f64..1e3, rot in 0usize..20) {
            let grid = log_grid(1e-9, 1e-6, 20);
            let data = synthesize_measurements(&lab_params(0.5), &grid, 0.01, seed);
            let fit = fit_segments(&data).unwrap();

            let mut shuffled = data.clone();
            shuffled.rotate_left(rot);
            shuffled.reverse();
            prop_assert_eq!(fit_segments(&shuffled).unwrap(), fit);

            let scaled: Vec<_> = data
                .iter()
                .map(|m| FlowMeasurement { v: m.v, grad_p: m.grad_p * c })
                .collect();
            let sfit = fit_segments(&scaled).unwrap();
            prop_assert!((sfit.s_hat - fit.s_hat).abs() < 1e-12);
            prop_assert_eq!(sfit.v_d_hat, fit.v_d_hat);
            prop_assert!((sfit.lambda_hat / (c * fit.lambda_hat) - 1.0).abs() < 1e-12);
            prop_assert!((sfit.alpha_hat / (c * fit.alpha_hat) - 1.0).abs() < 1e-12);
        }
    }
}
