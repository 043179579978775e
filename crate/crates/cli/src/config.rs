//! Config-file loading: a flat JSON object mirroring the network parameters,
//! with powers in dBm, SIR thresholds in dB, sensing thresholds in dBm, and
//! densities either absolute (per m²) or relative to the macro density via
//! the "5x" suffix form. Everything converts to linear units here; nothing
//! downstream sees a decibel.

use anyhow::{anyhow, Context};
use serde::Deserialize;
use std::path::Path;
use tddnet_core::params::{self, NetworkConfig};

/// Absolute density in per-m², or a multiple of `lambda_m` written "5x".
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Density {
    Absolute(f64),
    Relative(String),
}

impl Density {
    fn resolve(&self, lambda_m: f64, field: &str) -> anyhow::Result<f64> {
        match self {
            Density::Absolute(v) => Ok(*v),
            Density::Relative(s) => {
                let stripped = s.trim().strip_suffix(['x', 'X']).ok_or_else(|| {
                    anyhow!("field `{field}`: relative density must look like \"5x\" (got {s:?})")
                })?;
                let mult: f64 = stripped
                    .trim()
                    .parse()
                    .with_context(|| format!("field `{field}`: bad multiplier in {s:?}"))?;
                Ok(mult * lambda_m)
            }
        }
    }
}

/// On-disk configuration; every field optional, defaults from the standard
/// parameter table. Unknown keys are rejected to catch typos.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub lambda_m: Option<f64>,
    pub lambda_s: Option<Density>,
    pub lambda_u: Option<Density>,
    pub alpha: Option<f64>,
    /// dBm.
    pub p_m: Option<f64>,
    pub p_s: Option<f64>,
    pub q_m: Option<f64>,
    pub q_s: Option<f64>,
    pub q_d: Option<f64>,
    pub q_dm: Option<f64>,
    pub q_ds: Option<f64>,
    pub b_dm: Option<f64>,
    pub b_ds: Option<f64>,
    pub b_um: Option<f64>,
    pub b_us: Option<f64>,
    /// dB.
    pub gamma_m_d: Option<f64>,
    pub gamma_m_u: Option<f64>,
    pub gamma_s_d: Option<f64>,
    pub gamma_s_u: Option<f64>,
    pub gamma_d: Option<f64>,
    /// meters.
    pub r_d: Option<f64>,
    /// dBm.
    pub rho_s: Option<f64>,
    pub rho_d: Option<f64>,
    pub epsilon: Option<f64>,
    pub eta: Option<f64>,
    pub zeta: Option<f64>,
    pub mu: Option<f64>,
    /// dBm.
    pub rho_min: Option<f64>,
}

impl ConfigFile {
    pub fn into_network_config(self) -> anyhow::Result<NetworkConfig> {
        let mut b = params::default_config();
        if let Some(v) = self.lambda_m {
            b.lambda_m = v;
        }
        if let Some(v) = self.alpha {
            b.alpha = v;
        }
        let dbm = |x: f64, field: &str| {
            params::dbm_to_mw(x).map_err(|e| anyhow!("field `{field}`: {e}"))
        };
        if let Some(v) = self.p_m {
            b.p_m = dbm(v, "p_m")?;
        }
        if let Some(v) = self.p_s {
            b.p_s = dbm(v, "p_s")?;
        }
        if let Some(v) = self.q_m {
            b.q_m = dbm(v, "q_m")?;
        }
        if let Some(v) = self.q_s {
            b.q_s = dbm(v, "q_s")?;
        }
        if let Some(v) = self.q_d {
            b.q_d = dbm(v, "q_d")?;
        }
        if let Some(v) = self.q_dm {
            b.q_dm = v;
        }
        if let Some(v) = self.q_ds {
            b.q_ds = v;
        }
        if let Some(v) = self.b_dm {
            b.b_dm = v;
        }
        if let Some(v) = self.b_ds {
            b.b_ds = v;
        }
        if let Some(v) = self.b_um {
            b.b_um = v;
        }
        if let Some(v) = self.b_us {
            b.b_us = v;
        }
        if let Some(v) = self.gamma_m_d {
            b.gamma_m_d = dbm(v, "gamma_m_d")?;
        }
        if let Some(v) = self.gamma_m_u {
            b.gamma_m_u = dbm(v, "gamma_m_u")?;
        }
        if let Some(v) = self.gamma_s_d {
            b.gamma_s_d = dbm(v, "gamma_s_d")?;
        }
        if let Some(v) = self.gamma_s_u {
            b.gamma_s_u = dbm(v, "gamma_s_u")?;
        }
        if let Some(v) = self.gamma_d {
            b.gamma_d = dbm(v, "gamma_d")?;
        }
        if let Some(v) = self.r_d {
            b.r_d = v;
        }
        if let Some(v) = self.rho_s {
            b.rho_s = dbm(v, "rho_s")?;
        }
        if let Some(v) = self.rho_d {
            b.rho_d = dbm(v, "rho_d")?;
        }
        if let Some(v) = self.epsilon {
            b.epsilon = v;
        }
        if let Some(v) = self.eta {
            b.eta = Some(v);
        }
        if let Some(v) = self.zeta {
            b.zeta = Some(v);
        }
        if let Some(v) = self.mu {
            b.mu = v;
        }
        if let Some(v) = self.rho_min {
            b.rho_min = Some(dbm(v, "rho_min")?);
        }
        if let Some(d) = &self.lambda_s {
            b.lambda_s = Some(d.resolve(b.lambda_m, "lambda_s")?);
        }
        if let Some(d) = &self.lambda_u {
            b.lambda_u = Some(d.resolve(b.lambda_m, "lambda_u")?);
        }
        b.build().map_err(|e| anyhow!("{e}"))
    }
}

pub fn load_config(path: &Path) -> anyhow::Result<NetworkConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let file: ConfigFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    file.into_network_config()
}

/// Converts one swept value from config-file units to the linear field unit.
pub fn swept_value_to_linear(
    param: &str,
    value: f64,
    relative_to_lambda_m: bool,
    lambda_m: f64,
) -> anyhow::Result<f64> {
    let linear = match param {
        "p_m" | "p_s" | "q_m" | "q_s" | "q_d" | "rho_s" | "rho_d" | "rho_min" => {
            params::dbm_to_mw(value).map_err(|e| anyhow!("{e}"))?
        }
        "gamma_m_d" | "gamma_m_u" | "gamma_s_d" | "gamma_s_u" | "gamma_d" => {
            params::db_to_linear(value).map_err(|e| anyhow!("{e}"))?
        }
        "lambda_m" | "lambda_s" | "lambda_u" => {
            if relative_to_lambda_m {
                value * lambda_m
            } else {
                value
            }
        }
        _ => value,
    };
    Ok(linear)
}
