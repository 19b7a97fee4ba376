//! `nondarcy fit`: segmented fit of measurement files.

use std::io::Write;
use std::path::Path;

use nondarcy_core::prefit::{fit_segments, read_measurements};
use nondarcy_core::{FitResult, FlowMeasurement};

use crate::error::{CliError, CliResult};
use crate::report::{sci, sig};

pub fn load(path: &Path) -> CliResult<Vec<FlowMeasurement>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_measurements(file).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn run_fit(path: &Path) -> CliResult<(Vec<FlowMeasurement>, FitResult)> {
    let data = load(path)?;
    let fit = fit_segments(&data)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((data, fit))
}

pub fn render(fit: &FitResult) -> String {
    let mut s = format!(
        "s_hat       {}\n\
         lambda_hat  {}\n\
         alpha_hat   {}\n\
         v_D_hat     {} m/s\n\
         SSE         {}\n\
         points      {} below, {} above\n\
         darcy slope {} (unconstrained)\n",
        sig(fit.s_hat, 7),
        sci(fit.lambda_hat),
        sci(fit.alpha_hat),
        sci(fit.v_d_hat),
        sci(fit.sse_total),
        fit.points_per_segment.0,
        fit.points_per_segment.1,
        sig(fit.darcy_slope_free, 7),
    );
    if fit.darcy_only {
        s += "no pre-Darcy segment detected; data fitted by a single Darcy line\n";
    }
    s
}

pub fn write_result_csv<W: Write>(fit: &FitResult, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "s_hat",
        "lambda_hat",
        "alpha_hat",
        "v_D_hat",
        "sse",
        "points_below",
        "points_above",
        "darcy_slope_free",
        "darcy_only",
    ])?;
    w.write_record([
        sci(fit.s_hat),
        sci(fit.lambda_hat),
        sci(fit.alpha_hat),
        sci(fit.v_d_hat),
        sci(fit.sse_total),
        fit.points_per_segment.0.to_string(),
        fit.points_per_segment.1.to_string(),
        sci(fit.darcy_slope_free),
        fit.darcy_only.to_string(),
    ])?;
    w.flush().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(())
}

/// Fitted curve on `points` log-spaced velocities spanning the data.
pub fn write_model_csv<W: Write>(
    fit: &FitResult,
    data: &[FlowMeasurement],
    points: usize,
    out: W,
) -> CliResult<()> {
    let lo = data.iter().map(|m| m.v).fold(f64::INFINITY, f64::min);
    let hi = data.iter().map(|m| m.v).fold(0.0, f64::max);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["v_m_per_s", "grad_p_pa_per_m", "segment"])?;
    let n = points.max(2);
    for i in 0..n {
        let v = if i + 1 == n {
            hi
        } else {
            (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()
        };
        let segment = if v < fit.v_d_hat { "pre-darcy" } else { "darcy" };
        w.write_record([sci(v), sci(fit.predict(v)), segment.to_string()])?;
    }
    w.flush().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(())
}
