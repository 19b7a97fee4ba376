//! Number formatting and the `pi` report.

use nondarcy_core::{PiResult, Scenario};

/// CSV number format: scientific with ten significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

/// `x` rounded to `digits` significant figures, fixed notation when the
/// magnitude is moderate and scientific otherwise.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    // Round first so a carry (0.99996 -> 1.000) moves the exponent.
    let rounded: f64 = format!("{x:.*e}", digits - 1).parse().unwrap_or(x);
    let exp = rounded.abs().log10().floor() as i32;
    if (-3..4).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{rounded:.decimals$}")
    } else {
        format!("{x:.*e}", digits - 1)
    }
}

/// Human-readable report of one PI evaluation.
pub fn render_pi(scn: &Scenario, pi: &PiResult, raw: bool) -> String {
    let part = &pi.zone_partition;
    let c = &pi.contributions;
    let headline = if raw {
        format!("J = {} m^3/(Pa s)", sig(pi.j_raw, 4))
    } else {
        format!("J = {} (dimensionless)", sig(pi.j_dimensionless, 4))
    };
    let clamp_note = |clamped: bool| if clamped { " (clamped)" } else { "" };
    format!(
        "{headline}\n\
         regime            {}\n\
         q_over_h          {} m^2/s\n\
         j_dimensionless   {}\n\
         j_raw             {} m^3/(Pa s)\n\
         r_F               {} m{}\n\
         r_D               {} m{}\n\
         S near-well       {}\n\
         S middle          {}\n\
         S near-boundary   {}\n",
        scn.regime(),
        sci(scn.q_over_h()),
        sci(pi.j_dimensionless),
        sci(pi.j_raw),
        sci(part.r_f),
        clamp_note(part.r_f_clamped),
        sci(part.r_d),
        clamp_note(part.r_d_clamped),
        sci(c.near_well),
        sci(c.middle),
        sci(c.near_boundary),
    )
}
