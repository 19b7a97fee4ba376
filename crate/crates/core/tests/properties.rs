use approx::assert_relative_eq;
use nondarcy_core::oracle::{pi_from_dissipation, pi_from_profile};
use nondarcy_core::{compute_pi, darcy_ratio, FlowParameters, Geometry, RegimeAssignment, Scenario, SolverOptions};
use proptest::prelude::*;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn scenario(regime: RegimeAssignment, q: f64, s: f64) -> Scenario {
    let params = FlowParameters {
        s,
        ..FlowParameters::baseline()
    };
    Scenario::baseline(regime)
        .with_params(params)
        .unwrap()
        .with_q_over_h(q)
        .unwrap()
}

fn j_dim(scn: &Scenario) -> f64 {
    compute_pi(scn, &opts()).unwrap().j_dimensionless
}

#[test]
fn darcy_pi_ignores_flux_and_exponent() {
    let reference = j_dim(&scenario(RegimeAssignment::DARCY, 1e-4, 0.7));
    for q in [1e-9, 2e-7, 1e-2, 1e4] {
        for s in [0.0, 0.5, 1.0] {
            assert_eq!(j_dim(&scenario(RegimeAssignment::DARCY, q, s)).to_bits(), reference.to_bits());
        }
    }
}

#[test]
fn dimensionless_pi_invariant_under_resistance_and_thickness_scaling() {
    for (_, regime) in RegimeAssignment::PRESETS {
        let base = scenario(regime, 1e-2, 0.6);
        let reference = j_dim(&base);
        for c in [1e-3, 7.0, 1e5] {
            let p = base.params();
            let scaled = FlowParameters {
                alpha: p.alpha * c,
                beta: p.beta * c,
                lambda: p.lambda * c,
                ..*p
            };
            assert_relative_eq!(j_dim(&base.with_params(scaled).unwrap()), reference, max_relative = 1e-12);

            let thicker = Geometry {
                h: base.geometry().h * c,
                ..*base.geometry()
            };
            assert_relative_eq!(j_dim(&base.with_geometry(thicker).unwrap()), reference, max_relative = 1e-12);
        }
    }
}

#[test]
fn vanishing_inertia_and_exponent_collapse_to_darcy() {
    let params = FlowParameters {
        beta: 0.0,
        s: 0.0,
        ..FlowParameters::baseline()
    };
    let darcy = j_dim(&scenario(RegimeAssignment::DARCY, 1e-2, 0.0));
    for (_, regime) in RegimeAssignment::PRESETS {
        let scn = scenario(regime, 1e-2, 0.0).with_params(params).unwrap();
        assert_relative_eq!(j_dim(&scn), darcy, max_relative = 1e-10);
        assert_relative_eq!(darcy_ratio(&scn, &opts()).unwrap(), 1.0, max_relative = 1e-10);
    }
}

#[test]
fn composite_bounded_by_its_parts() {
    for q in [2e-7, 1e-4, 1e-2, 1.0, 1e4] {
        for s in [0.1, 0.5, 0.9] {
            let fdpd = j_dim(&scenario(RegimeAssignment::FDPD, q, s));
            let fdd = j_dim(&scenario(RegimeAssignment::FDD, q, s));
            let ddpd = j_dim(&scenario(RegimeAssignment::DDPD, q, s));
            assert!(fdpd <= fdd * (1.0 + 1e-12), "Q/h={q} s={s}");
            assert!(fdpd <= ddpd * (1.0 + 1e-12), "Q/h={q} s={s}");
        }
    }
}

#[test]
fn fdpd_without_fast_or_slow_zone_is_darcy() {
    let params = FlowParameters {
        v_d: 0.0,
        v_f: 1e3,
        ..FlowParameters::baseline()
    };
    let scn = Scenario::baseline(RegimeAssignment::FDPD).with_params(params).unwrap();
    let part = scn.partition();
    assert!(part.r_f_clamped);
    assert_eq!(j_dim(&scn), j_dim(&scn.with_regime(RegimeAssignment::DARCY)));
}

#[test]
fn energy_route_agrees_on_presets() {
    for (_, regime) in RegimeAssignment::PRESETS {
        let scn = scenario(regime, 3.18e-2, 0.7);
        let direct = compute_pi(&scn, &opts()).unwrap().j_raw;
        assert_relative_eq!(pi_from_dissipation(&scn, &opts()).unwrap(), direct, max_relative = 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_route_matches_zone_integrals(
        preset in 0usize..7,
        log_q in -7.0f64..4.0,
        s in 0.0f64..1.0,
        log_re in 1.5f64..3.5,
    ) {
        let regime = RegimeAssignment::PRESETS[preset].1;
        let geometry = Geometry { r_e: 10f64.powf(log_re), ..Geometry::baseline() };
        let params = FlowParameters { s, ..FlowParameters::baseline() };
        let scn = Scenario::new(geometry, params, regime, 10f64.powf(log_q)).unwrap();
        let direct = compute_pi(&scn, &opts()).unwrap().j_raw;
        let profile = pi_from_profile(&scn, &opts()).unwrap().j_raw;
        prop_assert!(((direct - profile) / direct).abs() <= 1e-6, "{direct} vs {profile}");
    }

    #[test]
    fn forchheimer_pi_decreases_with_flux(log_q in -7.0f64..4.0, step in 0.01f64..1.0) {
        let lo = j_dim(&scenario(RegimeAssignment::FORCHHEIMER, 10f64.powf(log_q), 0.7));
        let hi = j_dim(&scenario(RegimeAssignment::FORCHHEIMER, 10f64.powf(log_q + step), 0.7));
        prop_assert!(hi < lo);
    }
}
