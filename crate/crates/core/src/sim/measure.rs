//! SIR measurement at a typical probe placed at the window center.
//!
//! The serving link is added to the snapshot under the conditioning of the
//! analysis: serving distance drawn from the association-weighted nearest
//! distribution (fixed r_d for the D2D probe), same-band same-mode stations
//! closer than the serving one removed, and the sensing exclusion balls
//! applied to the interferer sets. Interference itself comes from the
//! sampled processes with a fresh unit-mean exponential fade per link.

use super::geometry::{dist_sq, wrap, Vec2};
use super::realization::{ActiveSets, NetworkRealization};
use crate::analytics;
use crate::params::{LinkMode, NetworkConfig, Tier};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeKind {
    MacroDl,
    MacroUl,
    SmallDl,
    SmallUl,
    D2d,
}

pub const ALL_PROBES: [ProbeKind; 5] = [
    ProbeKind::MacroDl,
    ProbeKind::MacroUl,
    ProbeKind::SmallDl,
    ProbeKind::SmallUl,
    ProbeKind::D2d,
];

/// Per-configuration constants the probes need: serving-distance rates and
/// the exclusion radii. `None` rate marks an inapplicable probe.
#[derive(Debug, Clone, Copy)]
pub struct ProbeContext {
    pub rate_m_dl: Option<f64>,
    pub rate_m_ul: Option<f64>,
    pub rate_s_dl: Option<f64>,
    pub rate_s_ul: Option<f64>,
    pub d2d_applicable: bool,
    pub iota_s: f64,
    pub iota_d: f64,
    /// When set (ALOHA), no exclusion balls are applied anywhere.
    pub exclusion_balls: bool,
}

impl ProbeContext {
    pub fn new(cfg: &NetworkConfig) -> Self {
        let (iota_s, iota_d) = analytics::exclusion_radii(cfg);
        ProbeContext {
            rate_m_dl: analytics::serving_distance_rate(cfg, Tier::Macro, LinkMode::Dl),
            rate_m_ul: analytics::serving_distance_rate(cfg, Tier::Macro, LinkMode::Ul),
            rate_s_dl: analytics::serving_distance_rate(cfg, Tier::Small, LinkMode::Dl),
            rate_s_ul: analytics::serving_distance_rate(cfg, Tier::Small, LinkMode::Ul),
            d2d_applicable: cfg.zeta * cfg.lambda_u > 0.0,
            iota_s,
            iota_d,
            exclusion_balls: true,
        }
    }

    pub fn without_exclusion_balls(cfg: &NetworkConfig) -> Self {
        ProbeContext {
            exclusion_balls: false,
            ..ProbeContext::new(cfg)
        }
    }

    fn rate(&self, kind: ProbeKind) -> Option<f64> {
        match kind {
            ProbeKind::MacroDl => self.rate_m_dl,
            ProbeKind::MacroUl => self.rate_m_ul,
            ProbeKind::SmallDl => self.rate_s_dl,
            ProbeKind::SmallUl => self.rate_s_ul,
            ProbeKind::D2d => None,
        }
    }
}

/// Outcome of one probe attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SirSample {
    Sir(f64),
    /// The probe's mode does not exist under this configuration.
    NotApplicable,
    /// The drawn serving link was unusable in this window; resample.
    Discard,
}

fn exp_fade(rng: &mut impl Rng) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln()
}

/// Sum of faded received powers from `points`, keeping only points passing
/// `keep(position, distance² to origin)`.
///
/// Under the toroidal metric each kept point also contributes through its
/// 3x3 periodic images, and the infinite remainder beyond the image block
/// enters through its expected value (unit-mean fades, point density taken
/// from the realization itself). A bare nearest-image sum truncates the far
/// field and inflates coverage by several percent at macro distances; the
/// remainder's fluctuations are negligible, only its mean matters.
/// Exclusions are local, so they bind on the nearest image only.
fn interference<F: Fn(Vec2, f64) -> bool>(
    points: &[Vec2],
    origin: Vec2,
    power: f64,
    alpha: f64,
    window: f64,
    toroidal: bool,
    rng: &mut impl Rng,
    keep: F,
) -> f64 {
    let half = alpha / 2.0;
    let mut total = 0.0;
    for &p in points {
        let d2 = dist_sq(origin, p, window, toroidal);
        if !keep(p, d2) {
            continue;
        }
        if !toroidal {
            total += power * exp_fade(rng) / d2.powf(half);
            continue;
        }
        // Nearest-image displacement, each component in [-L/2, L/2].
        let mut dx = p.x - origin.x;
        let mut dy = p.y - origin.y;
        dx -= (dx / window).round() * window;
        dy -= (dy / window).round() * window;
        for kx in -1i32..=1 {
            for ky in -1i32..=1 {
                let ix = dx + kx as f64 * window;
                let iy = dy + ky as f64 * window;
                let id2 = ix * ix + iy * iy;
                total += power * exp_fade(rng) / id2.powf(half);
            }
        }
    }
    if toroidal && !points.is_empty() {
        // Mean interference of the periodic continuation beyond the 3x3
        // block, from the disk complement of equal area (radius 3L/sqrt(pi)).
        let density = points.len() as f64 / (window * window);
        let r_eff = 3.0 * window / std::f64::consts::PI.sqrt();
        total += power * density * 2.0 * std::f64::consts::PI * r_eff.powf(2.0 - alpha)
            / (alpha - 2.0);
    }
    total
}

/// Measures the SIR of the typical probe against one snapshot.
pub fn measure_sir(
    real: &NetworkRealization,
    active: &ActiveSets,
    retained_d2d: &[Vec2],
    cfg: &NetworkConfig,
    ctx: &ProbeContext,
    kind: ProbeKind,
    rng: &mut impl Rng,
) -> SirSample {
    let window = real.window;
    let toroidal = real.toroidal;
    let alpha = cfg.alpha;
    let origin = Vec2::new(window / 2.0, window / 2.0);

    // Serving distance: fixed for D2D, association-weighted nearest
    // otherwise. Links longer than half the window cannot be embedded.
    let r = match kind {
        ProbeKind::D2d => {
            if !ctx.d2d_applicable {
                return SirSample::NotApplicable;
            }
            cfg.r_d
        }
        _ => match ctx.rate(kind) {
            None => return SirSample::NotApplicable,
            Some(rate) => {
                let u: f64 = rng.gen::<f64>();
                let r = (-(1.0 - u).ln() / rate).sqrt();
                if r > window / 2.0 {
                    return SirSample::Discard;
                }
                r
            }
        },
    };
    let angle = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
    let serving_pos = Vec2::new(
        wrap(origin.x + r * angle.cos(), window),
        wrap(origin.y + r * angle.sin(), window),
    );

    let link_power = match kind {
        ProbeKind::MacroDl => cfg.p_m,
        ProbeKind::MacroUl => cfg.q_m,
        ProbeKind::SmallDl => cfg.p_s,
        ProbeKind::SmallUl => cfg.q_s,
        ProbeKind::D2d => cfg.q_d,
    };
    let signal = if r == 0.0 {
        return SirSample::Sir(f64::INFINITY);
    } else {
        link_power * exp_fade(rng) / r.powf(alpha)
    };

    let r2 = r * r;
    let keep_all = |_: Vec2, _: f64| true;
    let beyond_serving = |_: Vec2, d2: f64| d2 >= r2;
    let outside_ball = |center: Vec2, radius: f64, active_balls: bool| {
        move |p: Vec2, _d2: f64| {
            !active_balls
                || radius == 0.0
                || dist_sq(p, center, window, toroidal) >= radius * radius
        }
    };

    let total_interference = match kind {
        ProbeKind::MacroDl => {
            interference(&active.dl_mbs, origin, cfg.p_m, alpha, window, toroidal, rng, beyond_serving)
                + interference(&active.tx_users_m, origin, cfg.q_m, alpha, window, toroidal, rng, keep_all)
        }
        ProbeKind::MacroUl => {
            interference(&active.dl_mbs, origin, cfg.p_m, alpha, window, toroidal, rng, keep_all)
                + interference(&active.tx_users_m, origin, cfg.q_m, alpha, window, toroidal, rng, keep_all)
        }
        ProbeKind::SmallDl => {
            interference(&active.dl_sap, origin, cfg.p_s, alpha, window, toroidal, rng, beyond_serving)
                + interference(&active.tx_users_s, origin, cfg.q_s, alpha, window, toroidal, rng, keep_all)
                + interference(
                    retained_d2d,
                    origin,
                    cfg.q_d,
                    alpha,
                    window,
                    toroidal,
                    rng,
                    outside_ball(serving_pos, ctx.iota_s, ctx.exclusion_balls),
                )
        }
        ProbeKind::SmallUl => {
            interference(&active.dl_sap, origin, cfg.p_s, alpha, window, toroidal, rng, keep_all)
                + interference(&active.tx_users_s, origin, cfg.q_s, alpha, window, toroidal, rng, keep_all)
                + interference(
                    retained_d2d,
                    origin,
                    cfg.q_d,
                    alpha,
                    window,
                    toroidal,
                    rng,
                    outside_ball(serving_pos, ctx.iota_s, ctx.exclusion_balls),
                )
        }
        ProbeKind::D2d => {
            interference(
                &active.dl_sap,
                origin,
                cfg.p_s,
                alpha,
                window,
                toroidal,
                rng,
                outside_ball(serving_pos, ctx.iota_s, ctx.exclusion_balls),
            ) + interference(
                &active.tx_users_s,
                origin,
                cfg.q_s,
                alpha,
                window,
                toroidal,
                rng,
                outside_ball(serving_pos, ctx.iota_s, ctx.exclusion_balls),
            ) + interference(
                retained_d2d,
                origin,
                cfg.q_d,
                alpha,
                window,
                toroidal,
                rng,
                outside_ball(serving_pos, ctx.iota_d, ctx.exclusion_balls),
            )
        }
    };

    if total_interference == 0.0 {
        SirSample::Sir(f64::INFINITY)
    } else {
        SirSample::Sir(signal / total_interference)
    }
}
