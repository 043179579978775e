//! Network configuration: scalar parameters, unit conversions, normalized
//! per-tier ratios, and input validation.
//!
//! Everything downstream computes in linear units: powers in mW, distances in
//! meters, densities in points per m², SIR thresholds as plain ratios. dBm/dB
//! only appear at the CLI boundary. Total bandwidth is normalized to 1, so
//! throughput is reported in bits/s/Hz/m².

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The two infrastructure tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    Macro,
    Small,
}

impl Tier {
    pub fn other(self) -> Tier {
        match self {
            Tier::Macro => Tier::Small,
            Tier::Small => Tier::Macro,
        }
    }
}

/// Transmission direction of a cell in a given timeslot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkMode {
    Dl,
    Ul,
}

/// Every scalar parameter of the network model, in linear units.
///
/// Densities are per m², powers in mW, `r_d` in meters, SIR thresholds and
/// biases as linear ratios, `rho_s`/`rho_d` in mW. `rho_min` (receiver
/// sensitivity, the lower end of sensing-threshold searches) has no default
/// and stays `None` unless supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub lambda_m: f64,
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub alpha: f64,
    pub p_m: f64,
    pub p_s: f64,
    pub q_m: f64,
    pub q_s: f64,
    pub q_d: f64,
    pub q_dm: f64,
    pub q_ds: f64,
    pub b_dm: f64,
    pub b_ds: f64,
    pub b_um: f64,
    pub b_us: f64,
    pub gamma_m_d: f64,
    pub gamma_m_u: f64,
    pub gamma_s_d: f64,
    pub gamma_s_u: f64,
    pub gamma_d: f64,
    pub r_d: f64,
    pub rho_s: f64,
    pub rho_d: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub zeta: f64,
    pub mu: f64,
    pub rho_min: Option<f64>,
}

impl NetworkConfig {
    pub fn density(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.lambda_m,
            Tier::Small => self.lambda_s,
        }
    }

    /// DL transmit power of the tier's base stations.
    pub fn dl_power(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.p_m,
            Tier::Small => self.p_s,
        }
    }

    /// UL transmit power of users associated with the tier.
    pub fn ul_power(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.q_m,
            Tier::Small => self.q_s,
        }
    }

    /// Probability that a cell of the tier is in DL mode.
    pub fn dl_prob(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.q_dm,
            Tier::Small => self.q_ds,
        }
    }

    pub fn mode_prob(&self, tier: Tier, mode: LinkMode) -> f64 {
        match mode {
            LinkMode::Dl => self.dl_prob(tier),
            LinkMode::Ul => 1.0 - self.dl_prob(tier),
        }
    }

    pub fn bias(&self, tier: Tier, mode: LinkMode) -> f64 {
        match (tier, mode) {
            (Tier::Macro, LinkMode::Dl) => self.b_dm,
            (Tier::Small, LinkMode::Dl) => self.b_ds,
            (Tier::Macro, LinkMode::Ul) => self.b_um,
            (Tier::Small, LinkMode::Ul) => self.b_us,
        }
    }

    /// Association weight of a tier in the given mode: transmit power of the
    /// link source times the bias factor.
    pub fn assoc_power(&self, tier: Tier, mode: LinkMode) -> f64 {
        match mode {
            LinkMode::Dl => self.dl_power(tier),
            LinkMode::Ul => self.ul_power(tier),
        }
    }

    pub fn sir_threshold(&self, tier: Tier, mode: LinkMode) -> f64 {
        match (tier, mode) {
            (Tier::Macro, LinkMode::Dl) => self.gamma_m_d,
            (Tier::Macro, LinkMode::Ul) => self.gamma_m_u,
            (Tier::Small, LinkMode::Dl) => self.gamma_s_d,
            (Tier::Small, LinkMode::Ul) => self.gamma_s_u,
        }
    }

    /// Sets the named scalar field. Used by sweep drivers; `rho_min` is
    /// addressable like any other field.
    pub fn set_field(&mut self, name: &str, value: f64) -> Result<(), ParamError> {
        match name {
            "lambda_m" => self.lambda_m = value,
            "lambda_s" => self.lambda_s = value,
            "lambda_u" => self.lambda_u = value,
            "alpha" => self.alpha = value,
            "p_m" => self.p_m = value,
            "p_s" => self.p_s = value,
            "q_m" => self.q_m = value,
            "q_s" => self.q_s = value,
            "q_d" => self.q_d = value,
            "q_dm" => self.q_dm = value,
            "q_ds" => self.q_ds = value,
            "b_dm" => self.b_dm = value,
            "b_ds" => self.b_ds = value,
            "b_um" => self.b_um = value,
            "b_us" => self.b_us = value,
            "gamma_m_d" => self.gamma_m_d = value,
            "gamma_m_u" => self.gamma_m_u = value,
            "gamma_s_d" => self.gamma_s_d = value,
            "gamma_s_u" => self.gamma_s_u = value,
            "gamma_d" => self.gamma_d = value,
            "r_d" => self.r_d = value,
            "rho_s" => self.rho_s = value,
            "rho_d" => self.rho_d = value,
            "epsilon" => self.epsilon = value,
            "eta" => self.eta = value,
            "zeta" => self.zeta = value,
            "mu" => self.mu = value,
            "rho_min" => self.rho_min = Some(value),
            other => return Err(ParamError::UnknownField(other.to_string())),
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("required field `{0}` has no default and was not provided")]
    MissingField(&'static str),
    #[error("unknown configuration field `{0}`")]
    UnknownField(String),
    #[error("non-finite input {0}")]
    NonFinite(f64),
    #[error("{0}")]
    Domain(String),
}

/// Builder seeded with the standard default values. The scenario-dependent
/// fields (`lambda_s`, `lambda_u`, `eta`, `zeta`) have no default and must be
/// set before [`ConfigBuilder::build`] succeeds.
#[derive(Debug, Clone, Copy)]
pub struct ConfigBuilder {
    pub lambda_m: f64,
    pub lambda_s: Option<f64>,
    pub lambda_u: Option<f64>,
    pub alpha: f64,
    pub p_m: f64,
    pub p_s: f64,
    pub q_m: f64,
    pub q_s: f64,
    pub q_d: f64,
    pub q_dm: f64,
    pub q_ds: f64,
    pub b_dm: f64,
    pub b_ds: f64,
    pub b_um: f64,
    pub b_us: f64,
    pub gamma_m_d: f64,
    pub gamma_m_u: f64,
    pub gamma_s_d: f64,
    pub gamma_s_u: f64,
    pub gamma_d: f64,
    pub r_d: f64,
    pub rho_s: f64,
    pub rho_d: f64,
    pub epsilon: f64,
    pub eta: Option<f64>,
    pub zeta: Option<f64>,
    pub mu: f64,
    pub rho_min: Option<f64>,
}

impl ConfigBuilder {
    pub fn lambda_s(mut self, v: f64) -> Self {
        self.lambda_s = Some(v);
        self
    }

    pub fn lambda_u(mut self, v: f64) -> Self {
        self.lambda_u = Some(v);
        self
    }

    pub fn eta(mut self, v: f64) -> Self {
        self.eta = Some(v);
        self
    }

    pub fn zeta(mut self, v: f64) -> Self {
        self.zeta = Some(v);
        self
    }

    pub fn build(self) -> Result<NetworkConfig, ParamError> {
        Ok(NetworkConfig {
            lambda_m: self.lambda_m,
            lambda_s: self.lambda_s.ok_or(ParamError::MissingField("lambda_s"))?,
            lambda_u: self.lambda_u.ok_or(ParamError::MissingField("lambda_u"))?,
            alpha: self.alpha,
            p_m: self.p_m,
            p_s: self.p_s,
            q_m: self.q_m,
            q_s: self.q_s,
            q_d: self.q_d,
            q_dm: self.q_dm,
            q_ds: self.q_ds,
            b_dm: self.b_dm,
            b_ds: self.b_ds,
            b_um: self.b_um,
            b_us: self.b_us,
            gamma_m_d: self.gamma_m_d,
            gamma_m_u: self.gamma_m_u,
            gamma_s_d: self.gamma_s_d,
            gamma_s_u: self.gamma_s_u,
            gamma_d: self.gamma_d,
            r_d: self.r_d,
            rho_s: self.rho_s,
            rho_d: self.rho_d,
            epsilon: self.epsilon,
            eta: self.eta.ok_or(ParamError::MissingField("eta"))?,
            zeta: self.zeta.ok_or(ParamError::MissingField("zeta"))?,
            mu: self.mu,
            rho_min: self.rho_min,
        })
    }
}

/// Default parameter set: macro density 1/(π·500²) per m², 46/20 dBm macro
/// DL/UL power, 26/10 dBm small-cell DL/UL power, 0 dBm D2D power, 0 dB SIR
/// thresholds, 20 m D2D links, −60 dBm sensing thresholds, μ = 0.5,
/// ε = 10⁻⁵, DL-mode probability 0.5 per tier, unit biases.
///
/// Scenario-dependent fields stay unset and must be provided.
pub fn default_config() -> ConfigBuilder {
    ConfigBuilder {
        lambda_m: 1.0 / (std::f64::consts::PI * 500.0 * 500.0),
        lambda_s: None,
        lambda_u: None,
        alpha: 4.0,
        p_m: dbm_to_mw(46.0).unwrap(),
        p_s: dbm_to_mw(26.0).unwrap(),
        q_m: dbm_to_mw(20.0).unwrap(),
        q_s: dbm_to_mw(10.0).unwrap(),
        q_d: dbm_to_mw(0.0).unwrap(),
        q_dm: 0.5,
        q_ds: 0.5,
        b_dm: 1.0,
        b_ds: 1.0,
        b_um: 1.0,
        b_us: 1.0,
        gamma_m_d: db_to_linear(0.0).unwrap(),
        gamma_m_u: db_to_linear(0.0).unwrap(),
        gamma_s_d: db_to_linear(0.0).unwrap(),
        gamma_s_u: db_to_linear(0.0).unwrap(),
        gamma_d: db_to_linear(0.0).unwrap(),
        r_d: 20.0,
        rho_s: dbm_to_mw(-60.0).unwrap(),
        rho_d: dbm_to_mw(-60.0).unwrap(),
        epsilon: 1e-5,
        eta: None,
        zeta: None,
        mu: 0.5,
        rho_min: None,
    }
}

pub fn dbm_to_mw(x_dbm: f64) -> Result<f64, ParamError> {
    if !x_dbm.is_finite() {
        return Err(ParamError::NonFinite(x_dbm));
    }
    Ok(10f64.powf(x_dbm / 10.0))
}

pub fn mw_to_dbm(x_mw: f64) -> Result<f64, ParamError> {
    if !x_mw.is_finite() || x_mw <= 0.0 {
        return Err(ParamError::Domain(format!(
            "mw_to_dbm requires a positive finite value, got {x_mw}"
        )));
    }
    Ok(10.0 * x_mw.log10())
}

pub fn db_to_linear(x_db: f64) -> Result<f64, ParamError> {
    dbm_to_mw(x_db)
}

pub fn linear_to_db(x: f64) -> Result<f64, ParamError> {
    mw_to_dbm(x)
}

/// The seven ratios of tier `k`'s parameters relative to serving tier `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatParams {
    pub lambda_hat: f64,
    pub q_d_hat: f64,
    pub q_u_hat: f64,
    pub p_hat: f64,
    pub q_hat: f64,
    pub b_d_hat: f64,
    pub b_u_hat: f64,
}

/// Normalized parameters of tier `k` conditioned on serving tier `i`.
/// Undefined (rejected) when any of tier `i`'s parameters in a denominator
/// is zero.
pub fn hat_params(cfg: &NetworkConfig, k: Tier, i: Tier) -> Result<HatParams, ParamError> {
    let ratio = |num: f64, den: f64, what: &str| -> Result<f64, ParamError> {
        if den == 0.0 {
            Err(ParamError::Domain(format!(
                "normalized ratio {what} undefined: serving-tier value is zero"
            )))
        } else {
            Ok(num / den)
        }
    };
    Ok(HatParams {
        lambda_hat: ratio(cfg.density(k), cfg.density(i), "lambda_hat")?,
        q_d_hat: ratio(cfg.dl_prob(k), cfg.dl_prob(i), "q_d_hat")?,
        q_u_hat: ratio(1.0 - cfg.dl_prob(k), 1.0 - cfg.dl_prob(i), "q_u_hat")?,
        p_hat: ratio(cfg.dl_power(k), cfg.dl_power(i), "p_hat")?,
        q_hat: ratio(cfg.ul_power(k), cfg.ul_power(i), "q_hat")?,
        b_d_hat: ratio(
            cfg.bias(k, LinkMode::Dl),
            cfg.bias(i, LinkMode::Dl),
            "b_d_hat",
        )?,
        b_u_hat: ratio(
            cfg.bias(k, LinkMode::Ul),
            cfg.bias(i, LinkMode::Ul),
            "b_u_hat",
        )?,
    })
}

/// Diagnostic result of [`validate`]: hard violations and degenerate-regime
/// warnings, never an abrupt failure.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationOutcome {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

pub fn validate(cfg: &NetworkConfig) -> ValidationOutcome {
    let mut out = ValidationOutcome::default();
    let err = |out: &mut ValidationOutcome, m: String| out.errors.push(m);
    let warn = |out: &mut ValidationOutcome, m: String| out.warnings.push(m);

    if !(cfg.alpha > 2.0) {
        err(&mut out, format!("alpha must exceed 2 (got {})", cfg.alpha));
    }
    for (name, v) in [
        ("lambda_m", cfg.lambda_m),
        ("lambda_s", cfg.lambda_s),
        ("lambda_u", cfg.lambda_u),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            err(&mut out, format!("density {name} must be finite and >= 0 (got {v})"));
        }
    }
    for (name, v) in [
        ("p_m", cfg.p_m),
        ("p_s", cfg.p_s),
        ("q_m", cfg.q_m),
        ("q_s", cfg.q_s),
        ("q_d", cfg.q_d),
    ] {
        if !(v.is_finite() && v > 0.0) {
            err(&mut out, format!("power {name} must be finite and > 0 (got {v})"));
        }
    }
    for (name, v) in [("q_dm", cfg.q_dm), ("q_ds", cfg.q_ds)] {
        if !(0.0..=1.0).contains(&v) {
            err(&mut out, format!("probability {name} must lie in [0,1] (got {v})"));
        }
    }
    for (name, v) in [
        ("b_dm", cfg.b_dm),
        ("b_ds", cfg.b_ds),
        ("b_um", cfg.b_um),
        ("b_us", cfg.b_us),
    ] {
        if !(v.is_finite() && v > 0.0) {
            err(&mut out, format!("bias {name} must be finite and > 0 (got {v})"));
        }
    }
    for (name, v) in [
        ("gamma_m_d", cfg.gamma_m_d),
        ("gamma_m_u", cfg.gamma_m_u),
        ("gamma_s_d", cfg.gamma_s_d),
        ("gamma_s_u", cfg.gamma_s_u),
        ("gamma_d", cfg.gamma_d),
    ] {
        if !(v.is_finite() && v > 0.0) {
            err(&mut out, format!("SIR threshold {name} must be finite and > 0 (got {v})"));
        }
    }
    if !(cfg.r_d.is_finite() && cfg.r_d >= 0.0) {
        err(&mut out, format!("r_d must be finite and >= 0 (got {})", cfg.r_d));
    }
    for (name, v) in [("rho_s", cfg.rho_s), ("rho_d", cfg.rho_d)] {
        if v.is_nan() || v < 0.0 {
            err(&mut out, format!("threshold {name} must be >= 0 (got {v})"));
        }
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        err(&mut out, format!("epsilon must lie in (0,1) (got {})", cfg.epsilon));
    }
    for (name, v) in [("eta", cfg.eta), ("zeta", cfg.zeta), ("mu", cfg.mu)] {
        if !(0.0..=1.0).contains(&v) {
            err(&mut out, format!("fraction {name} must lie in [0,1] (got {v})"));
        }
    }
    if let Some(rm) = cfg.rho_min {
        if !(rm.is_finite() && rm >= 0.0) {
            err(&mut out, format!("rho_min must be finite and >= 0 (got {rm})"));
        }
    }
    if !out.is_ok() {
        return out;
    }

    // Degenerate but legal regimes.
    if cfg.q_dm == 0.0 {
        warn(&mut out, "macro DL mode empty (q_dm = 0)".into());
    }
    if cfg.q_dm == 1.0 {
        warn(&mut out, "macro UL mode empty (q_dm = 1)".into());
    }
    if cfg.q_ds == 0.0 {
        warn(&mut out, "small-cell DL mode empty (q_ds = 0)".into());
    }
    if cfg.q_ds == 1.0 {
        warn(&mut out, "small-cell UL mode empty (q_ds = 1)".into());
    }
    if cfg.rho_s == 0.0 {
        warn(&mut out, "rho_s = 0: every potential D2D transmitter is silenced".into());
    }
    if cfg.rho_d == 0.0 {
        warn(&mut out, "rho_d = 0: every potential D2D transmitter is silenced".into());
    }
    // Exclusion radii smaller than the link length leave the closed-form
    // geometry outside its assumed regime.
    let neg_ln_eps = -cfg.epsilon.ln();
    for (name, rho) in [("iota_s", cfg.rho_s), ("iota_d", cfg.rho_d)] {
        if rho > 0.0 && rho.is_finite() {
            let iota = (neg_ln_eps / (rho / cfg.q_d)).powf(1.0 / cfg.alpha);
            if cfg.r_d > iota {
                warn(
                    &mut out,
                    format!(
                        "r_d = {} m exceeds exclusion radius {name} = {iota:.3} m; \
                         D2D coverage leaves the assumed geometric regime",
                        cfg.r_d
                    ),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_match_published_values() {
        let b = default_config();
        assert_eq!(b.alpha, 4.0);
        assert!((b.p_m - 39810.717055349695).abs() / 39810.7 < 1e-12);
        assert!((b.p_s - 398.1071705534973).abs() / 398.1 < 1e-12);
        assert_eq!(b.q_m, 100.0);
        assert_eq!(b.q_s, 10.0);
        assert_eq!(b.q_d, 1.0);
        assert_eq!(b.epsilon, 1e-5);
        assert_eq!(b.mu, 0.5);
        assert_eq!(b.r_d, 20.0);
        assert!((b.rho_s - 1e-6).abs() < 1e-18);
        assert!((b.gamma_m_d - 1.0).abs() < 1e-15);
        assert!((b.lambda_m - 1.2732395447351628e-6).abs() < 1e-18);
    }

    #[test]
    fn scenario_fields_are_required() {
        let err = default_config().lambda_u(1e-4).eta(0.5).zeta(0.1).build();
        match err {
            Err(ParamError::MissingField(f)) => assert_eq!(f, "lambda_s"),
            other => panic!("expected MissingField(lambda_s), got {other:?}"),
        }
    }

    #[test]
    fn unit_conversions() {
        assert_eq!(dbm_to_mw(0.0).unwrap(), 1.0);
        assert!((dbm_to_mw(-60.0).unwrap() - 1e-6).abs() < 1e-18);
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        assert!(dbm_to_mw(f64::NAN).is_err());
        assert!(dbm_to_mw(f64::INFINITY).is_err());
        assert!(mw_to_dbm(0.0).is_err());
    }

    proptest! {
        #[test]
        fn dbm_round_trip(exp in -12.0f64..6.0) {
            let x = 10f64.powf(exp);
            let back = dbm_to_mw(mw_to_dbm(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() <= 1e-12 * x);
        }
    }

    fn fig3_config() -> NetworkConfig {
        let lm = default_config().lambda_m;
        default_config()
            .lambda_s(5.0 * lm)
            .lambda_u(100.0 * lm)
            .eta(0.5)
            .zeta(0.1)
            .build()
            .unwrap()
    }

    #[test]
    fn hat_params_of_self_are_unity() {
        let cfg = fig3_config();
        for t in [Tier::Macro, Tier::Small] {
            let h = hat_params(&cfg, t, t).unwrap();
            assert_eq!(h.lambda_hat, 1.0);
            assert_eq!(h.q_d_hat, 1.0);
            assert_eq!(h.q_u_hat, 1.0);
            assert_eq!(h.p_hat, 1.0);
            assert_eq!(h.q_hat, 1.0);
            assert_eq!(h.b_d_hat, 1.0);
            assert_eq!(h.b_u_hat, 1.0);
        }
    }

    #[test]
    fn hat_params_rejects_zero_denominator() {
        let mut cfg = fig3_config();
        cfg.q_dm = 0.0;
        assert!(hat_params(&cfg, Tier::Small, Tier::Macro).is_err());
    }

    #[test]
    fn validate_flags_alpha_boundary() {
        let mut cfg = fig3_config();
        cfg.alpha = 2.0;
        let out = validate(&cfg);
        assert!(!out.is_ok());
        assert!(out.errors.iter().any(|e| e.contains("alpha must exceed 2")));
    }

    #[test]
    fn validate_warns_on_empty_ul_mode() {
        let mut cfg = fig3_config();
        cfg.q_dm = 1.0;
        let out = validate(&cfg);
        assert!(out.is_ok());
        assert!(out.warnings.iter().any(|w| w.contains("macro UL mode empty")));
    }

    #[test]
    fn validate_accepts_figure_parameter_points() {
        let lm = default_config().lambda_m;
        // The scenario settings used across the reported experiments.
        let scenarios = [
            (5.0, 100.0, 0.1),
            (5.0, 1000.0, 0.01),
            (20.0, 1000.0, 0.01),
            (100.0, 10_000.0, 0.1),
        ];
        for (ls, lu, zeta) in scenarios {
            let cfg = default_config()
                .lambda_s(ls * lm)
                .lambda_u(lu * lm)
                .eta(0.5)
                .zeta(zeta)
                .build()
                .unwrap();
            let out = validate(&cfg);
            assert!(out.is_ok(), "scenario ({ls},{lu},{zeta}) rejected: {:?}", out.errors);
        }
    }

    #[test]
    fn validate_warns_when_link_exceeds_exclusion_radius() {
        let mut cfg = fig3_config();
        cfg.rho_s = dbm_to_mw(-30.0).unwrap(); // iota_s ~ 10.4 m < r_d = 20 m
        let out = validate(&cfg);
        assert!(out.is_ok());
        assert!(out.warnings.iter().any(|w| w.contains("iota_s")));
    }
}
