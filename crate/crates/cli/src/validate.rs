//! Self-check suites run by `nondarcy validate`.

use std::fmt;

use nondarcy_core::oracle::{compressible_velocity, pi_from_dissipation, pi_from_profile};
use nondarcy_core::prefit::{fit_segments, synthesize_measurements};
use nondarcy_core::quadrature::{s_darcy, s_darcy_quadrature, s_forch, s_forch_quadrature};
use nondarcy_core::{
    compute_pi, FlowParameters, Geometry, RegimeAssignment, Scenario, SolverOptions,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Flux grid of the first reference table, m²/s.
pub const FLUX_GRID: [f64; 10] = [2e-7, 1e-4, 1e-3, 5.95e-3, 1e-2, 3.18e-2, 1e-1, 1.0, 1e1, 1e4];

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub measured: f64,
    /// Acceptance rule in words, e.g. `<= 1e-6`.
    pub criterion: String,
    pub passed: bool,
}

impl PropertyCheck {
    fn at_most(name: &'static str, measured: f64, tol: f64) -> Self {
        PropertyCheck {
            name,
            measured,
            criterion: format!("<= {tol:e}"),
            passed: measured <= tol,
        }
    }

    fn within(name: &'static str, measured: f64, lo: f64, hi: f64) -> Self {
        PropertyCheck {
            name,
            measured,
            criterion: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&measured),
        }
    }
}

impl fmt::Display for PropertyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<38} measured {:<12.4e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.criterion
        )
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn baseline_with(regime: RegimeAssignment, q: f64, s: f64) -> CliResult<Scenario> {
    let params = FlowParameters {
        s,
        ..FlowParameters::baseline()
    };
    Ok(Scenario::baseline(regime).with_params(params)?.with_q_over_h(q)?)
}

/// Largest relative gap between the zone-integral PI and the two oracle
/// routes over every preset, five fluxes and three exponents.
fn oracle_checks(opts: &SolverOptions) -> CliResult<Vec<PropertyCheck>> {
    let fluxes = [2e-7, 1e-4, 1e-2, 1.0, 1e4];
    let exponents = [0.3, 0.7, 1.0];
    let mut cases = Vec::with_capacity(105);
    for (_, regime) in RegimeAssignment::PRESETS {
        for q in fluxes {
            for s in exponents {
                cases.push((regime, q, s));
            }
        }
    }
    let gaps = cases
        .par_iter()
        .map(|&(regime, q, s)| {
            let scn = baseline_with(regime, q, s)?;
            let direct = compute_pi(&scn, opts)?.j_raw;
            let profile = pi_from_profile(&scn, opts)?.j_raw;
            let energy = pi_from_dissipation(&scn, opts)?;
            Ok((rel(direct, profile), rel(direct, energy)))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let max_of = |pick: fn(&(f64, f64)) -> f64| gaps.iter().map(pick).fold(0.0, f64::max);
    Ok(vec![
        PropertyCheck::at_most("oracle_profile_equivalence", max_of(|g| g.0), 1e-6),
        PropertyCheck::at_most("oracle_energy_equivalence", max_of(|g| g.1), 1e-6),
    ])
}

/// Quasi-random points in [0, 1)² from the R2 additive recurrence.
fn r2_points(n: usize) -> impl Iterator<Item = (f64, f64)> {
    const G: f64 = 1.324_717_957_244_746;
    (1..=n).map(|i| {
        let i = i as f64;
        ((0.5 + i / G).fract(), (0.5 + i / (G * G)).fract())
    })
}

fn closed_form_checks(opts: &SolverOptions) -> CliResult<Vec<PropertyCheck>> {
    let tol = opts.tolerance;
    let mut worst = [0.0f64; 2];
    for (k, (u, w)) in r2_points(100).enumerate() {
        let q = 10f64.powf(-6.0 + 8.0 * ((k as f64 * 0.618_033_988_75).fract()));
        let scn = baseline_with(RegimeAssignment::FORCHHEIMER, q, 0.7)?;
        let g = *scn.geometry();
        let span = g.r_e - g.r_w;
        let (a, b) = {
            let x = g.r_w + u * span;
            let y = g.r_w + w * span;
            (x.min(y), x.max(y))
        };
        if b - a < 1e-9 * span {
            continue;
        }
        worst[0] = worst[0].max(rel(s_darcy(&scn, a, b)?, s_darcy_quadrature(&scn, a, b, &tol)?));
        worst[1] = worst[1].max(rel(s_forch(&scn, a, b)?, s_forch_quadrature(&scn, a, b, &tol)?));
    }
    Ok(vec![
        PropertyCheck::at_most("darcy_closed_form_vs_quadrature", worst[0], 1e-9),
        PropertyCheck::at_most("forchheimer_closed_form_vs_quadrature", worst[1], 1e-9),
    ])
}

fn round_trip_checks() -> CliResult<Vec<PropertyCheck>> {
    let mut out = Vec::new();
    for (name, r_e) in [("inverse_round_trip_re1000", 1000.0), ("inverse_round_trip_re100", 100.0)] {
        let geometry = Geometry {
            r_e,
            ..Geometry::baseline()
        };
        let scn = Scenario::new(geometry, FlowParameters::baseline(), RegimeAssignment::DARCY, 1e-4)?;
        let (lo, hi) = (geometry.r_w.ln(), geometry.r_e.ln());
        let mut worst = 0.0f64;
        for i in 0..100 {
            let r = (lo + (hi - lo) * i as f64 / 99.0).exp().clamp(geometry.r_w, geometry.r_e);
            let back = scn.radius_of_velocity(scn.velocity(r)?)?;
            worst = worst.max(rel(back, r));
        }
        out.push(PropertyCheck::at_most(name, worst, 1e-10));
    }

    let grid: Vec<f64> = (0..20)
        .map(|i| 10f64.powf(-9.0 + 3.0 * i as f64 / 19.0))
        .collect();
    let mut worst = 0.0f64;
    for s in [0.1, 0.3, 0.5772, 0.6562, 0.9] {
        let params = FlowParameters {
            s,
            v_d: 5e-8,
            v_f: 1.0,
            ..FlowParameters::baseline()
        };
        let fit = fit_segments(&synthesize_measurements(&params, &grid, 0.0, 0))?;
        worst = worst.max((fit.s_hat - s).abs());
    }
    out.push(PropertyCheck::at_most("prefit_round_trip_s", worst, 1e-6));
    Ok(out)
}

fn monotonicity_checks(opts: &SolverOptions) -> CliResult<Vec<PropertyCheck>> {
    let mut out = Vec::new();

    let j = |regime, q, s| -> CliResult<f64> { Ok(compute_pi(&baseline_with(regime, q, s)?, opts)?.j_raw) };

    // Largest ratio of successive values; strictly decreasing means < 1.
    let forch: Vec<f64> = FLUX_GRID
        .iter()
        .map(|&q| j(RegimeAssignment::FORCHHEIMER, q, 0.7))
        .collect::<CliResult<_>>()?;
    let ratio = forch.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    out.push(PropertyCheck {
        name: "forchheimer_decreasing_in_flux",
        measured: ratio,
        criterion: "< 1".into(),
        passed: ratio < 1.0,
    });

    let darcy: Vec<f64> = FLUX_GRID
        .iter()
        .map(|&q| j(RegimeAssignment::DARCY, q, 0.7))
        .collect::<CliResult<_>>()?;
    let spread = darcy.iter().map(|v| rel(*v, darcy[0])).fold(0.0, f64::max);
    out.push(PropertyCheck::at_most("darcy_flux_independent", spread, 0.0));

    for (name, regime) in [
        ("ddpd_nonincreasing_in_s", RegimeAssignment::DDPD),
        ("fdpd_nonincreasing_in_s", RegimeAssignment::FDPD),
    ] {
        let mut worst_rise = 0.0f64;
        for q in [1e-4, 1e-2] {
            let values: Vec<f64> = (0..=20)
                .map(|i| j(regime, q, i as f64 / 20.0))
                .collect::<CliResult<_>>()?;
            for w in values.windows(2) {
                worst_rise = worst_rise.max((w[1] - w[0]) / w[0]);
            }
        }
        out.push(PropertyCheck::at_most(name, worst_rise, 0.0));
    }

    let fdd = j(RegimeAssignment::FDD, 1e-4, 0.7)?;
    let tiny_vd = FlowParameters {
        v_d: 1e-16,
        ..FlowParameters::baseline()
    };
    let limit = compute_pi(
        &Scenario::baseline(RegimeAssignment::FDPD).with_params(tiny_vd)?,
        opts,
    )?
    .j_raw;
    out.push(PropertyCheck::at_most("fdpd_small_vd_limit_is_fdd", rel(limit, fdd), 1e-10));
    Ok(out)
}

/// Nondimensional FDpD scenario used for the compressibility check.
pub fn unit_scenario() -> Scenario {
    let geometry = Geometry {
        r_e: 1.0,
        r_w: 0.1,
        h: 1.0,
    };
    let params = FlowParameters {
        alpha: 1.0,
        beta: 1.0,
        lambda: 1.0,
        s: 0.5,
        gamma: 0.0,
        v_d: 0.1,
        v_f: 1.0,
    };
    Scenario::new(geometry, params, RegimeAssignment::FDPD, 1.0).expect("valid unit scenario")
}

fn gamma_check() -> CliResult<PropertyCheck> {
    let scn = unit_scenario();
    let big = compressible_velocity(&scn, 1e-3)?.max_deviation();
    let small = compressible_velocity(&scn, 1e-4)?.max_deviation();
    Ok(PropertyCheck::within("compressibility_linear_in_gamma", big / small, 9.0, 11.0))
}

/// Runs every suite; numerical failures abort, property failures do not.
pub fn run_validation(opts: &SolverOptions) -> CliResult<Vec<PropertyCheck>> {
    let mut checks = oracle_checks(opts)?;
    checks.extend(closed_form_checks(opts)?);
    checks.extend(round_trip_checks()?);
    checks.extend(monotonicity_checks(opts)?);
    checks.push(gamma_check()?);
    Ok(checks)
}

/// Error naming every failed property, if any.
pub fn failures(checks: &[PropertyCheck]) -> Option<CliError> {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.to_string())
        .collect();
    (!failed.is_empty()).then_some(CliError::Validation(failed))
}
