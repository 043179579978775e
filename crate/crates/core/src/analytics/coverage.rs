//! Load-aware SIR coverage probabilities: the macro tier in closed form, the
//! small-cell tier through the exclusion-aware Laplace-transform integrals,
//! the D2D link, and the two limiting regimes that collapse the integrals
//! back to closed forms.

use super::{AnalyticsError, DerivedQuantities};
use crate::params::NetworkConfig;
use crate::specfn::{
    c_alpha, chord_lengths, delta_fn, gamma_fn, integrate_1d, z_fn_theta, ChordIntersections,
    QuadratureSettings,
};

/// DL/UL coverage of one tier; `None` marks an empty mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierCoverage {
    pub dl: Option<f64>,
    pub ul: Option<f64>,
}

/// Macro-tier coverage. Interference stays within the macro band: active DL
/// stations beyond the serving distance plus the transmitting macro users.
pub fn coverage_macro(
    cfg: &NetworkConfig,
    dq: &DerivedQuantities,
) -> Result<TierCoverage, AnalyticsError> {
    let ca = c_alpha(cfg.alpha)?;
    let e = 2.0 / cfg.alpha;

    let dl_cells = cfg.q_dm * cfg.lambda_m;
    let dl = if dl_cells == 0.0 {
        None
    } else {
        let denom = dq.lam_d_m * dq.a_d_m * delta_fn(cfg.gamma_m_d, cfg.alpha)?
            + dq.lam_u_m * dq.a_d_m * ca * (cfg.q_m * cfg.gamma_m_d / cfg.p_m).powf(e)
            + dl_cells;
        Some(dl_cells / denom)
    };

    let ul_cells = (1.0 - cfg.q_dm) * cfg.lambda_m;
    let ul = if ul_cells == 0.0 {
        None
    } else {
        let denom = ca
            * cfg.gamma_m_u.powf(e)
            * dq.a_u_m
            * (dq.lam_d_m * (cfg.p_m / cfg.q_m).powf(e) + dq.lam_u_m)
            + ul_cells;
        Some(ul_cells / denom)
    };
    Ok(TierCoverage { dl, ul })
}

/// Exponent of the Laplace transform of interference from a field of density
/// `lam` (transmit power `q_pow`) that is excluded from the ball of radius
/// `iota` around a point at distance `r` from the receiver.
///
/// Splits into the far field beyond the circle of radius ι+r around the
/// receiver and the chord-bounded annular remainder inside it; the inside
/// geometry depends on whether the receiver sits inside the exclusion ball.
pub(crate) fn exclusion_laplace_exponent(
    s: f64,
    r: f64,
    iota: f64,
    lam: f64,
    q_pow: f64,
    alpha: f64,
    settings: &QuadratureSettings,
) -> Result<f64, AnalyticsError> {
    if lam == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    if iota.is_infinite() {
        // The exclusion region swallows every interferer.
        return Ok(0.0);
    }
    let outer = iota + r;
    let far = std::f64::consts::PI
        * lam
        * outer
        * outer
        * delta_fn(s * q_pow / outer.powf(alpha), alpha)?;

    let chord = |theta: f64, want_far: bool| -> f64 {
        match chord_lengths(r, iota, theta) {
            Ok(ChordIntersections::Inside { far }) => far,
            Ok(ChordIntersections::Outside { near, far }) => {
                if want_far {
                    far
                } else {
                    near
                }
            }
            Err(_) => f64::NAN,
        }
    };

    let near_field = if r <= iota {
        // Receiver inside the exclusion ball: interferers start at the chord
        // exit and end at the outer circle, for every direction.
        lam * z_fn_theta(
            0.0,
            std::f64::consts::PI,
            |theta| chord(theta, true),
            |_| outer,
            s,
            q_pow,
            alpha,
            settings,
        )?
    } else {
        // Receiver outside: rays below the tangent angle cross the ball,
        // leaving two live radial stretches; beyond it the sector is whole.
        let tangent = (iota / r).asin();
        let before = z_fn_theta(
            0.0,
            tangent,
            |_| 0.0,
            |theta| chord(theta, false),
            s,
            q_pow,
            alpha,
            settings,
        )?;
        let after_ball = z_fn_theta(
            0.0,
            tangent,
            |theta| chord(theta, true),
            |_| outer,
            s,
            q_pow,
            alpha,
            settings,
        )?;
        let free = z_fn_theta(
            tangent,
            std::f64::consts::PI,
            |_| 0.0,
            |_| outer,
            s,
            q_pow,
            alpha,
            settings,
        )?;
        lam * (before + after_ball + free)
    };
    Ok(far + near_field)
}

/// Small-cell-tier coverage: the serving-distance integral with the in-band
/// interference constants and the D2D Laplace factor, split at the exclusion
/// radius where the interferer geometry changes.
pub fn coverage_small(
    cfg: &NetworkConfig,
    dq: &DerivedQuantities,
) -> Result<TierCoverage, AnalyticsError> {
    let ca = c_alpha(cfg.alpha)?;
    let e = 2.0 / cfg.alpha;

    let f_const = if cfg.q_ds * cfg.lambda_s == 0.0 {
        0.0
    } else {
        dq.lam_d_s * delta_fn(cfg.gamma_s_d, cfg.alpha)?
            + dq.lam_u_s * ca * (cfg.q_s * cfg.gamma_s_d / cfg.p_s).powf(e)
            + cfg.q_ds * cfg.lambda_s / dq.a_d_s
    };
    let g_const = if (1.0 - cfg.q_ds) * cfg.lambda_s == 0.0 {
        0.0
    } else {
        ca * cfg.gamma_s_u.powf(e) * (dq.lam_d_s * (cfg.p_s / cfg.q_s).powf(e) + dq.lam_u_s)
            + (1.0 - cfg.q_ds) * cfg.lambda_s / dq.a_u_s
    };

    let dl = small_mode_coverage(
        cfg,
        dq,
        cfg.q_ds * cfg.lambda_s,
        dq.a_d_s,
        f_const,
        cfg.gamma_s_d,
        cfg.p_s,
    )?;
    let ul = small_mode_coverage(
        cfg,
        dq,
        (1.0 - cfg.q_ds) * cfg.lambda_s,
        dq.a_u_s,
        g_const,
        cfg.gamma_s_u,
        cfg.q_s,
    )?;
    Ok(TierCoverage { dl, ul })
}

fn small_mode_coverage(
    cfg: &NetworkConfig,
    dq: &DerivedQuantities,
    cell_density: f64,
    assoc: f64,
    interference_const: f64,
    gamma: f64,
    link_power: f64,
) -> Result<Option<f64>, AnalyticsError> {
    if cell_density == 0.0 || assoc == 0.0 {
        return Ok(None);
    }
    let alpha = cfg.alpha;
    let lam_d = dq.lambda_d2d;
    let iota = dq.iota_s;
    let nested = QuadratureSettings::nested();
    let outer = QuadratureSettings {
        rel_tol: 1e-7,
        max_subdivisions: 200,
        transform_infinite: true,
    };

    let integrand = |v: f64| -> f64 {
        let envelope = (-std::f64::consts::PI * v * interference_const).exp();
        if envelope == 0.0 {
            return 0.0;
        }
        if lam_d == 0.0 {
            return envelope;
        }
        let s = gamma * v.powf(alpha / 2.0) / link_power;
        match exclusion_laplace_exponent(s, v.sqrt(), iota, lam_d, cfg.q_d, alpha, &nested) {
            Ok(exp) => envelope * (-exp).exp(),
            Err(_) => f64::NAN,
        }
    };

    let split = iota * iota;
    let total = if split.is_finite() {
        integrate_1d(&integrand, 0.0, split, &outer)?
            + integrate_1d(&integrand, split, f64::INFINITY, &outer)?
    } else {
        // Infinite exclusion radius: no D2D survives and a single piece
        // covers the whole range.
        integrate_1d(&integrand, 0.0, f64::INFINITY, &outer)?
    };
    if total.is_nan() {
        return Err(AnalyticsError::Undefined(
            "inner Laplace evaluation failed inside the coverage integral".into(),
        ));
    }
    Ok(Some(std::f64::consts::PI * cell_density / assoc * total))
}

/// Coverage of the typical D2D link.
#[derive(Debug, Clone, PartialEq)]
pub struct D2dCoverage {
    pub value: Option<f64>,
    /// Set when the link length exceeds an exclusion radius, outside the
    /// regime the expressions were built for; the value is still computed
    /// with the geometry generalized accordingly.
    pub regime_warning: Option<String>,
}

/// Coverage of the typical D2D receiver: the product of the three
/// exclusion-aware Laplace factors for DL small cells, transmitting
/// small-cell users, and the other active D2D transmitters.
pub fn coverage_d2d(
    cfg: &NetworkConfig,
    dq: &DerivedQuantities,
) -> Result<D2dCoverage, AnalyticsError> {
    if cfg.zeta * cfg.lambda_u == 0.0 {
        return Ok(D2dCoverage { value: None, regime_warning: None });
    }
    let regime_warning = if cfg.r_d > dq.iota_s || cfg.r_d > dq.iota_d {
        Some(format!(
            "r_d = {} m exceeds an exclusion radius (iota_s = {:.3}, iota_d = {:.3}); \
             approximation regime exceeded",
            cfg.r_d, dq.iota_s, dq.iota_d
        ))
    } else {
        None
    };
    let s = cfg.gamma_d * cfg.r_d.powf(cfg.alpha) / cfg.q_d;
    let nested = QuadratureSettings::nested();
    let i1 = exclusion_laplace_exponent(s, cfg.r_d, dq.iota_s, dq.lam_d_s, cfg.p_s, cfg.alpha, &nested)?;
    let i2 = exclusion_laplace_exponent(s, cfg.r_d, dq.iota_s, dq.lam_u_s, cfg.q_s, cfg.alpha, &nested)?;
    let i3 =
        exclusion_laplace_exponent(s, cfg.r_d, dq.iota_d, dq.lambda_d2d, cfg.q_d, cfg.alpha, &nested)?;
    Ok(D2dCoverage {
        value: Some((-(i1 + i2 + i3)).exp()),
        regime_warning,
    })
}

/// Small-tier coverage in the no-D2D limit (vanishing protection threshold):
/// both modes collapse to closed-form ratios.
pub fn asymptotic_no_d2d(
    cfg: &NetworkConfig,
    dq: &DerivedQuantities,
) -> Result<TierCoverage, AnalyticsError> {
    let ca = c_alpha(cfg.alpha)?;
    let e = 2.0 / cfg.alpha;

    let dl_cells = cfg.q_ds * cfg.lambda_s;
    let dl = if dl_cells == 0.0 {
        None
    } else {
        let denom = dq.lam_d_s * dq.a_d_s * delta_fn(cfg.gamma_s_d, cfg.alpha)?
            + dq.lam_u_s * dq.a_d_s * ca * (cfg.q_s * cfg.gamma_s_d / cfg.p_s).powf(e)
            + dl_cells;
        Some(dl_cells / denom)
    };

    let ul_cells = (1.0 - cfg.q_ds) * cfg.lambda_s;
    let ul = if ul_cells == 0.0 {
        None
    } else {
        let denom = ca
            * cfg.gamma_s_u.powf(e)
            * dq.a_u_s
            * (dq.lam_d_s * (cfg.p_s / cfg.q_s).powf(e) + dq.lam_u_s)
            + ul_cells;
        Some(ul_cells / denom)
    };
    Ok(TierCoverage { dl, ul })
}

/// Small-tier coverage when sensing toward small cells is disabled
/// (protection threshold pushed to infinity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoSensingCoverage {
    pub dl: Option<f64>,
    pub ul: Option<f64>,
    /// Density of active D2D transmitters in this limit, 1/𝒦_{o,d}.
    pub lambda_d2d: f64,
    /// True when the contention mass ζ·λ_u·𝒦_{o,d} is below 10, where the
    /// saturation approximation loses accuracy.
    pub approximation_flagged: bool,
}

pub fn asymptotic_no_sensing(
    cfg: &NetworkConfig,
    dq: &DerivedQuantities,
) -> Result<NoSensingCoverage, AnalyticsError> {
    let ca = c_alpha(cfg.alpha)?;
    let e = 2.0 / cfg.alpha;
    let gamma_term = gamma_fn(e)?;
    // Saturated density of contention winners.
    let d2d_term = |power: f64| {
        cfg.alpha * (cfg.rho_d / power).powf(e) / (2.0 * std::f64::consts::PI * gamma_term)
    };
    let lambda_sat = d2d_term(cfg.q_d);
    let contention_mass = cfg.zeta * cfg.lambda_u * dq.k_od;
    let approximation_flagged = !(contention_mass > 10.0);

    let dl_cells = cfg.q_ds * cfg.lambda_s;
    let dl = if dl_cells == 0.0 {
        None
    } else {
        let denom = dq.lam_d_s * dq.a_d_s * delta_fn(cfg.gamma_s_d, cfg.alpha)?
            + ca * cfg.gamma_s_d.powf(e)
                * dq.a_d_s
                * (dq.lam_u_s * (cfg.q_s / cfg.p_s).powf(e) + d2d_term(cfg.p_s))
            + dl_cells;
        Some(dl_cells / denom)
    };

    let ul_cells = (1.0 - cfg.q_ds) * cfg.lambda_s;
    let ul = if ul_cells == 0.0 {
        None
    } else {
        let denom = ca
            * cfg.gamma_s_u.powf(e)
            * dq.a_u_s
            * (dq.lam_d_s * (cfg.p_s / cfg.q_s).powf(e) + dq.lam_u_s + d2d_term(cfg.q_s))
            + ul_cells;
        Some(ul_cells / denom)
    };
    Ok(NoSensingCoverage {
        dl,
        ul,
        lambda_d2d: lambda_sat,
        approximation_flagged,
    })
}
