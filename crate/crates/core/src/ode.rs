//! Embedded Runge–Kutta (Dormand–Prince 5(4)) for scalar first-order ODEs.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            max_steps: 100_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights equal the last row of A (FSAL); these are the
// differences to the embedded fourth-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(x, y)` from `(x0, y0)` to `x1` (either direction) and
/// returns every accepted point, `x0` and `x1` included.
pub fn integrate<F>(f: F, x0: f64, y0: f64, x1: f64, ctl: &StepControl) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64, f64) -> f64,
{
    let mut out = vec![(x0, y0)];
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(out);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = span.abs() / 64.0;
    let mut k = [0.0; 7];
    k[0] = f(x, y);

    for _ in 0..ctl.max_steps {
        let remaining = (x1 - x).abs();
        if remaining == 0.0 {
            return Ok(out);
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        if step <= 8.0 * f64::EPSILON * x.abs().max(1.0) && !last {
            return Err(Error::StepSizeUnderflow { r: x });
        }
        let hs = dir * step;

        for i in 1..7 {
            let incr: f64 = (0..i).map(|j| A[i][j] * k[j]).sum();
            k[i] = f(x + C[i] * hs, y + hs * incr);
        }
        let y_new = y + hs * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let err_est = (hs * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
        let scale = ctl.abs_tol + ctl.rel_tol * y.abs().max(y_new.abs());
        let ratio = err_est / scale;

        if !y_new.is_finite() {
            h = step * 0.25;
            if h <= 8.0 * f64::EPSILON * x.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { r: x });
            }
            continue;
        }

        if ratio <= 1.0 {
            x = if last { x1 } else { x + hs };
            y = y_new;
            k[0] = k[6];
            out.push((x, y));
            let grow = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = step * grow;
        } else {
            h = step * (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Err(Error::StepSizeUnderflow { r: x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let pts = integrate(|_, y| -y, 0.0, 1.0, 3.0, &StepControl::default()).unwrap();
        let (x, y) = *pts.last().unwrap();
        assert_eq!(x, 3.0);
        assert_relative_eq!(y, (-3.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn backward_integration() {
        // y' = 2x, y(2) = 4  =>  y(0) = 0
        let pts = integrate(|x, _| 2.0 * x, 2.0, 4.0, 0.0, &StepControl::default()).unwrap();
        let (x, y) = *pts.last().unwrap();
        assert_eq!(x, 0.0);
        assert!(y.abs() < 1e-12);
        assert!(pts.windows(2).all(|w| w[1].0 < w[0].0));
    }

    #[test]
    fn blow_up_is_reported() {
        // y' = y², y(0) = 1 blows up at x = 1.
        let res = integrate(|_, y| y * y, 0.0, 1.0, 2.0, &StepControl::default());
        assert!(matches!(res, Err(Error::StepSizeUnderflow { .. })));
    }
}
