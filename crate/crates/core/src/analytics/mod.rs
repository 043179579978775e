//! Closed-form network analysis: association and load, active densities,
//! CSMA retention, per-tier and overall coverage, and network throughput,
//! all as deterministic functions of [`NetworkConfig`].

mod coverage;

pub use coverage::{
    asymptotic_no_d2d, asymptotic_no_sensing, coverage_d2d, coverage_macro, coverage_small,
    D2dCoverage, NoSensingCoverage, TierCoverage,
};

use crate::params::{LinkMode, NetworkConfig, Tier};
use crate::specfn::{self, SpecFnError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Void-probability threshold below which a tier counts as fully loaded.
pub const FULLY_LOADED_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error(transparent)]
    SpecFn(#[from] SpecFnError),
    #[error("{0}")]
    Undefined(String),
}

/// Everything the coverage and throughput expressions need beyond the raw
/// configuration: association probabilities, void probabilities, active
/// densities, exclusion radii, and the D2D retention outcome.
///
/// `lam_u_m`/`lam_u_s` double as the transmitting-user densities of each
/// tier: the model identifies them with the active UL base-station density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub a_d_m: f64,
    pub a_d_s: f64,
    pub a_u_m: f64,
    pub a_u_s: f64,
    pub pe_d_m: f64,
    pub pe_d_s: f64,
    pub pe_u_m: f64,
    pub pe_u_s: f64,
    pub lam_d_m: f64,
    pub lam_d_s: f64,
    pub lam_u_m: f64,
    pub lam_u_s: f64,
    pub iota_s: f64,
    pub iota_d: f64,
    pub k_os: f64,
    pub k_od: f64,
    pub beta_ret: f64,
    pub lambda_d2d: f64,
}

impl DerivedQuantities {
    pub fn compute(cfg: &NetworkConfig) -> Result<Self, AnalyticsError> {
        let (a_d_m, a_d_s, a_u_m, a_u_s) = association_probabilities(cfg);
        let (pe_d_m, pe_d_s, pe_u_m, pe_u_s) = void_probabilities(cfg);
        let (lam_d_m, lam_d_s, lam_u_m, lam_u_s) = active_densities(cfg);
        let (iota_s, iota_d) = exclusion_radii(cfg);
        let (beta_ret, lambda_d2d, k_os, k_od) = retaining_probability(cfg)?;
        Ok(DerivedQuantities {
            a_d_m,
            a_d_s,
            a_u_m,
            a_u_s,
            pe_d_m,
            pe_d_s,
            pe_u_m,
            pe_u_s,
            lam_d_m,
            lam_d_s,
            lam_u_m,
            lam_u_s,
            iota_s,
            iota_d,
            k_os,
            k_od,
            beta_ret,
            lambda_d2d,
        })
    }

    /// The limiting regime behind the closed-form optimizers: every cell
    /// loaded (void probabilities zero) and no D2D activity.
    pub fn fully_loaded_no_d2d(cfg: &NetworkConfig) -> Self {
        let (a_d_m, a_d_s, a_u_m, a_u_s) = association_probabilities(cfg);
        let (iota_s, iota_d) = exclusion_radii(cfg);
        DerivedQuantities {
            a_d_m,
            a_d_s,
            a_u_m,
            a_u_s,
            pe_d_m: 0.0,
            pe_d_s: 0.0,
            pe_u_m: 0.0,
            pe_u_s: 0.0,
            lam_d_m: cfg.lambda_m * cfg.q_dm,
            lam_d_s: cfg.lambda_s * cfg.q_ds,
            lam_u_m: cfg.lambda_m * (1.0 - cfg.q_dm),
            lam_u_s: cfg.lambda_s * (1.0 - cfg.q_ds),
            iota_s,
            iota_d,
            k_os: f64::NAN,
            k_od: f64::NAN,
            beta_ret: 0.0,
            lambda_d2d: 0.0,
        }
    }

    pub fn active_density(&self, tier: Tier, mode: LinkMode) -> f64 {
        match (tier, mode) {
            (Tier::Macro, LinkMode::Dl) => self.lam_d_m,
            (Tier::Small, LinkMode::Dl) => self.lam_d_s,
            (Tier::Macro, LinkMode::Ul) => self.lam_u_m,
            (Tier::Small, LinkMode::Ul) => self.lam_u_s,
        }
    }

    /// Density of transmitting users associated with the tier.
    pub fn tx_user_density(&self, tier: Tier) -> f64 {
        self.active_density(tier, LinkMode::Ul)
    }

    pub fn association(&self, tier: Tier, mode: LinkMode) -> f64 {
        match (tier, mode) {
            (Tier::Macro, LinkMode::Dl) => self.a_d_m,
            (Tier::Small, LinkMode::Dl) => self.a_d_s,
            (Tier::Macro, LinkMode::Ul) => self.a_u_m,
            (Tier::Small, LinkMode::Ul) => self.a_u_s,
        }
    }

    pub fn void_probability(&self, tier: Tier, mode: LinkMode) -> f64 {
        match (tier, mode) {
            (Tier::Macro, LinkMode::Dl) => self.pe_d_m,
            (Tier::Small, LinkMode::Dl) => self.pe_d_s,
            (Tier::Macro, LinkMode::Ul) => self.pe_u_m,
            (Tier::Small, LinkMode::Ul) => self.pe_u_s,
        }
    }

    pub fn is_fully_loaded(&self, tier: Tier) -> bool {
        self.void_probability(tier, LinkMode::Dl) < FULLY_LOADED_THRESHOLD
            && self.void_probability(tier, LinkMode::Ul) < FULLY_LOADED_THRESHOLD
    }
}

/// Per-tier association probabilities (DL macro, DL small, UL macro,
/// UL small). A mode with zero effective density in both tiers gets the
/// all-zero convention.
pub fn association_probabilities(cfg: &NetworkConfig) -> (f64, f64, f64, f64) {
    let (a_d_m, a_d_s) = association_pair(cfg, LinkMode::Dl);
    let (a_u_m, a_u_s) = association_pair(cfg, LinkMode::Ul);
    (a_d_m, a_d_s, a_u_m, a_u_s)
}

fn association_pair(cfg: &NetworkConfig, mode: LinkMode) -> (f64, f64) {
    let e = 2.0 / cfg.alpha;
    let weight = |t: Tier| {
        cfg.mode_prob(t, mode) * cfg.density(t) // effective density of the mode
    };
    let w_m = weight(Tier::Macro);
    let w_s = weight(Tier::Small);
    if w_m + w_s == 0.0 {
        return (0.0, 0.0);
    }
    let pw = |t: Tier| cfg.assoc_power(t, mode) * cfg.bias(t, mode);
    // G-sum of the competitor relative to serving tier i.
    let g = |i: Tier| {
        let k = i.other();
        weight(k) * (pw(k) / pw(i)).powf(e)
    };
    let a = |i: Tier, w_i: f64| {
        if w_i == 0.0 {
            0.0
        } else {
            w_i / (w_i + g(i))
        }
    };
    (a(Tier::Macro, w_m), a(Tier::Small, w_s))
}

/// Probability that a cell of each tier/mode has no user to serve.
/// Modes with no cells at all report 1.
pub fn void_probabilities(cfg: &NetworkConfig) -> (f64, f64, f64, f64) {
    let (a_d_m, a_d_s, a_u_m, a_u_s) = association_probabilities(cfg);
    let recv_density = (1.0 - cfg.mu) * (1.0 - cfg.zeta) * cfg.lambda_u;
    let tx_density = cfg.mu * (1.0 - cfg.zeta) * cfg.lambda_u;
    let pe = |user_density: f64, assoc: f64, cell_density: f64| {
        if cell_density == 0.0 {
            1.0
        } else {
            (1.0 + user_density * assoc / (3.5 * cell_density)).powf(-3.5)
        }
    };
    (
        pe(recv_density, a_d_m, cfg.q_dm * cfg.lambda_m),
        pe(recv_density, a_d_s, cfg.q_ds * cfg.lambda_s),
        pe(tx_density, a_u_m, (1.0 - cfg.q_dm) * cfg.lambda_m),
        pe(tx_density, a_u_s, (1.0 - cfg.q_ds) * cfg.lambda_s),
    )
}

/// Probability that a cell of the tier serves exactly `n` users in the given
/// mode: a Poisson load mixed over the random cell-area distribution.
pub fn load_pmf(
    cfg: &NetworkConfig,
    tier: Tier,
    mode: LinkMode,
    n: u64,
) -> Result<f64, AnalyticsError> {
    let cell_density = cfg.mode_prob(tier, mode) * cfg.density(tier);
    if cell_density == 0.0 {
        return Err(AnalyticsError::Undefined(
            "load distribution undefined: the tier has no cells in this mode".into(),
        ));
    }
    if n == 0 {
        // The zero term IS the void probability; reuse the identical
        // expression so the two stay bit-for-bit consistent.
        let (pe_d_m, pe_d_s, pe_u_m, pe_u_s) = void_probabilities(cfg);
        return Ok(match (tier, mode) {
            (Tier::Macro, LinkMode::Dl) => pe_d_m,
            (Tier::Small, LinkMode::Dl) => pe_d_s,
            (Tier::Macro, LinkMode::Ul) => pe_u_m,
            (Tier::Small, LinkMode::Ul) => pe_u_s,
        });
    }
    let (a_d_m, a_d_s, a_u_m, a_u_s) = association_probabilities(cfg);
    let assoc = match (tier, mode) {
        (Tier::Macro, LinkMode::Dl) => a_d_m,
        (Tier::Small, LinkMode::Dl) => a_d_s,
        (Tier::Macro, LinkMode::Ul) => a_u_m,
        (Tier::Small, LinkMode::Ul) => a_u_s,
    };
    let user_density = match mode {
        LinkMode::Dl => (1.0 - cfg.mu) * (1.0 - cfg.zeta) * cfg.lambda_u,
        LinkMode::Ul => cfg.mu * (1.0 - cfg.zeta) * cfg.lambda_u,
    };
    let m = user_density * assoc / cell_density;
    if m == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let nf = n as f64;
    const C: f64 = 3.5;
    let ln_p = C * C.ln() + specfn::ln_gamma(nf + C)?
        - specfn::ln_gamma(nf + 1.0)?
        - specfn::ln_gamma(C)?
        + nf * m.ln()
        - (nf + C) * (C + m).ln();
    Ok(ln_p.exp())
}

/// Mean of the load distribution, preserved by the area mixture.
pub fn load_mean(cfg: &NetworkConfig, tier: Tier, mode: LinkMode) -> Result<f64, AnalyticsError> {
    let cell_density = cfg.mode_prob(tier, mode) * cfg.density(tier);
    if cell_density == 0.0 {
        return Err(AnalyticsError::Undefined("no cells in this mode".into()));
    }
    let (a_d_m, a_d_s, a_u_m, a_u_s) = association_probabilities(cfg);
    let assoc = match (tier, mode) {
        (Tier::Macro, LinkMode::Dl) => a_d_m,
        (Tier::Small, LinkMode::Dl) => a_d_s,
        (Tier::Macro, LinkMode::Ul) => a_u_m,
        (Tier::Small, LinkMode::Ul) => a_u_s,
    };
    let user_density = match mode {
        LinkMode::Dl => (1.0 - cfg.mu) * (1.0 - cfg.zeta) * cfg.lambda_u,
        LinkMode::Ul => cfg.mu * (1.0 - cfg.zeta) * cfg.lambda_u,
    };
    Ok(user_density * assoc / cell_density)
}

/// Densities of base stations that actually transmit or receive: mode-thinned
/// and void-thinned.
pub fn active_densities(cfg: &NetworkConfig) -> (f64, f64, f64, f64) {
    let (pe_d_m, pe_d_s, pe_u_m, pe_u_s) = void_probabilities(cfg);
    (
        cfg.lambda_m * cfg.q_dm * (1.0 - pe_d_m),
        cfg.lambda_s * cfg.q_ds * (1.0 - pe_d_s),
        cfg.lambda_m * (1.0 - cfg.q_dm) * (1.0 - pe_u_m),
        cfg.lambda_s * (1.0 - cfg.q_ds) * (1.0 - pe_u_s),
    )
}

/// Equivalent hard-core radii replacing the fading-dependent sensing regions;
/// a zero threshold pushes the radius to infinity.
pub fn exclusion_radii(cfg: &NetworkConfig) -> (f64, f64) {
    let neg_ln_eps = -cfg.epsilon.ln();
    let iota = |rho: f64| {
        if rho == 0.0 {
            f64::INFINITY
        } else if rho.is_infinite() {
            0.0
        } else {
            (neg_ln_eps / (rho / cfg.q_d)).powf(1.0 / cfg.alpha)
        }
    };
    (iota(cfg.rho_s), iota(cfg.rho_d))
}

/// Probability that a potential D2D transmitter survives both sensing stages,
/// with the resulting active-D2D density and the two sensing areas.
/// Returns `(beta, lambda_d2d, k_os, k_od)`.
pub fn retaining_probability(cfg: &NetworkConfig) -> Result<(f64, f64, f64, f64), AnalyticsError> {
    let gamma_term = specfn::gamma_fn(2.0 / cfg.alpha)?;
    let sensing_area = |rho: f64| {
        if rho == 0.0 {
            f64::INFINITY
        } else if rho.is_infinite() {
            0.0
        } else {
            2.0 * std::f64::consts::PI * gamma_term / (cfg.alpha * (rho / cfg.q_d).powf(2.0 / cfg.alpha))
        }
    };
    let k_os = sensing_area(cfg.rho_s);
    let k_od = sensing_area(cfg.rho_d);
    if cfg.rho_s == 0.0 || cfg.rho_d == 0.0 {
        // Infinite sensing areas silence everyone; skip the infinite
        // arithmetic entirely.
        return Ok((0.0, 0.0, k_os, k_od));
    }
    let (_, lam_d_s, _, lam_u_s) = active_densities(cfg);
    let hole = (-(lam_d_s + lam_u_s) * k_os).exp();
    let x = cfg.zeta * cfg.lambda_u * k_od;
    let contention = if x < 1e-8 {
        1.0 - 0.5 * x // series limit of (1 - e^-x)/x
    } else {
        (1.0 - (-x).exp()) / x
    };
    let beta = hole * contention;
    Ok((beta, beta * cfg.zeta * cfg.lambda_u, k_os, k_od))
}

/// Rate constant of the serving-distance distribution: π·(mode density)/𝒜.
/// `None` when the tier has no cells in the mode or is never chosen.
pub fn serving_distance_rate(cfg: &NetworkConfig, tier: Tier, mode: LinkMode) -> Option<f64> {
    let cell_density = cfg.mode_prob(tier, mode) * cfg.density(tier);
    if cell_density == 0.0 {
        return None;
    }
    let (a_d_m, a_d_s, a_u_m, a_u_s) = association_probabilities(cfg);
    let assoc = match (tier, mode) {
        (Tier::Macro, LinkMode::Dl) => a_d_m,
        (Tier::Small, LinkMode::Dl) => a_d_s,
        (Tier::Macro, LinkMode::Ul) => a_u_m,
        (Tier::Small, LinkMode::Ul) => a_u_s,
    };
    if assoc == 0.0 {
        return None;
    }
    Some(std::f64::consts::PI * cell_density / assoc)
}

/// Density of the distance between a user and its serving base station,
/// conditioned on association with the tier in the given mode.
pub fn distance_pdf(
    cfg: &NetworkConfig,
    tier: Tier,
    mode: LinkMode,
    y: f64,
) -> Result<f64, AnalyticsError> {
    if y < 0.0 {
        return Err(AnalyticsError::Undefined("distance must be >= 0".into()));
    }
    let rate = serving_distance_rate(cfg, tier, mode).ok_or_else(|| {
        AnalyticsError::Undefined(
            "distance distribution undefined: zero effective density for this tier/mode".into(),
        )
    })?;
    Ok(2.0 * rate * y * (-rate * y * y).exp())
}

/// Whether an estimate came from the closed forms or from simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportSource {
    Analytic,
    Simulated,
}

/// A probability estimate, with a 95% confidence half-width when simulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_half: Option<f64>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, ci_half: None }
    }
}

/// Coverage probabilities for every probe type. Entries are `None` when the
/// corresponding mode is empty (not applicable rather than zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub source: ReportSource,
    pub p_m_d: Option<Estimate>,
    pub p_m_u: Option<Estimate>,
    pub p_s_d: Option<Estimate>,
    pub p_s_u: Option<Estimate>,
    pub p_d2d: Option<Estimate>,
    pub overall_d: Option<Estimate>,
    pub overall_u: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Overall load-aware coverage report from the closed forms.
pub fn coverage_overall(cfg: &NetworkConfig) -> Result<CoverageReport, AnalyticsError> {
    let dq = DerivedQuantities::compute(cfg)?;
    coverage_overall_with(cfg, &dq)
}

pub fn coverage_overall_with(
    cfg: &NetworkConfig,
    dq: &DerivedQuantities,
) -> Result<CoverageReport, AnalyticsError> {
    let macro_cov = coverage_macro(cfg, dq)?;
    let small_cov = coverage_small(cfg, dq)?;
    let d2d = coverage_d2d(cfg, dq)?;
    let mut warnings = Vec::new();
    if let Some(w) = d2d.regime_warning {
        warnings.push(w);
    }

    let combine = |a_m: f64, a_s: f64, p_m: Option<f64>, p_s: Option<f64>| -> Option<f64> {
        if a_m + a_s == 0.0 {
            return None;
        }
        let mut total = 0.0;
        if a_m > 0.0 {
            total += a_m * p_m?;
        }
        if a_s > 0.0 {
            total += a_s * p_s?;
        }
        Some(total)
    };
    let overall_d = combine(dq.a_d_m, dq.a_d_s, macro_cov.dl, small_cov.dl);
    let overall_u = combine(dq.a_u_m, dq.a_u_s, macro_cov.ul, small_cov.ul);

    Ok(CoverageReport {
        source: ReportSource::Analytic,
        p_m_d: macro_cov.dl.map(Estimate::exact),
        p_m_u: macro_cov.ul.map(Estimate::exact),
        p_s_d: small_cov.dl.map(Estimate::exact),
        p_s_u: small_cov.ul.map(Estimate::exact),
        p_d2d: d2d.value.map(Estimate::exact),
        overall_d: overall_d.map(Estimate::exact),
        overall_u: overall_u.map(Estimate::exact),
        warnings,
    })
}

/// Area throughput of each link class and the bandwidth-weighted totals,
/// in bits/s/Hz/m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub t_m_d: f64,
    pub t_m_u: f64,
    pub t_s_d: f64,
    pub t_s_u: f64,
    pub t_d2d: f64,
    pub total_d: f64,
    pub total_u: f64,
}

/// Outage capacity with constant bit-rate coding: density × coverage ×
/// log2(1+γ) per link class, combined by the bandwidth partition with half
/// the D2D capacity counted in each direction.
pub fn throughput(cfg: &NetworkConfig) -> Result<ThroughputReport, AnalyticsError> {
    let dq = DerivedQuantities::compute(cfg)?;
    throughput_with(cfg, &dq)
}

pub fn throughput_with(
    cfg: &NetworkConfig,
    dq: &DerivedQuantities,
) -> Result<ThroughputReport, AnalyticsError> {
    let macro_cov = coverage_macro(cfg, dq)?;
    let small_cov = coverage_small(cfg, dq)?;
    let d2d = coverage_d2d(cfg, dq)?;

    let rate = |density: f64, cov: Option<f64>, gamma: f64| -> f64 {
        if density == 0.0 {
            0.0
        } else {
            density * cov.unwrap_or(0.0) * (1.0 + gamma).log2()
        }
    };
    let t_m_d = rate(dq.lam_d_m, macro_cov.dl, cfg.gamma_m_d);
    let t_s_d = rate(dq.lam_d_s, small_cov.dl, cfg.gamma_s_d);
    let t_m_u = rate(dq.tx_user_density(Tier::Macro), macro_cov.ul, cfg.gamma_m_u);
    let t_s_u = rate(dq.tx_user_density(Tier::Small), small_cov.ul, cfg.gamma_s_u);
    let t_d2d = rate(dq.lambda_d2d, d2d.value, cfg.gamma_d);

    Ok(ThroughputReport {
        t_m_d,
        t_m_u,
        t_s_d,
        t_s_u,
        t_d2d,
        total_d: cfg.eta * t_m_d + (1.0 - cfg.eta) * (t_s_d + 0.5 * t_d2d),
        total_u: cfg.eta * t_m_u + (1.0 - cfg.eta) * (t_s_u + 0.5 * t_d2d),
    })
}
