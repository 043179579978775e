//! Closed-form and numerical parameter optimization: per-tier UL/DL
//! configuration, relative station density, bias factors, bandwidth
//! partition, and the two-stage sensing-threshold search.
//!
//! The closed forms hold in the fully-loaded, D2D-free regime. Each one
//! ships with a grid-argmax cross-check of the same analytic objective; a
//! disagreement beyond one grid step is reported in the result, never
//! patched over.

use crate::analytics::{
    self, asymptotic_no_d2d, coverage_macro, AnalyticsError, DerivedQuantities,
};
use crate::params::{LinkMode, NetworkConfig, Tier};
use crate::specfn::{c_alpha, delta_fn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptMethod {
    ClosedForm,
    Grid,
    TwoStage,
}

/// Grid-argmax cross-check of a closed-form optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub grid_argmax: f64,
    pub grid_objective: f64,
    /// Ratio between adjacent grid points.
    pub grid_step_ratio: f64,
    pub within_one_step: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<String>,
}

/// Outcome of one optimization: named argument(s), the objective evaluated
/// at them, and how the answer was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub arguments: Vec<(String, f64)>,
    pub objective: f64,
    pub method: OptMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_bar_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime_warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

/// Per-tier coverage in the fully-loaded, D2D-free regime; mode
/// probabilities are clamped away from the endpoints so boundary optima
/// evaluate as their limits.
fn regime_tier_coverage(cfg: &NetworkConfig, tier: Tier, mode: LinkMode) -> f64 {
    let mut c = *cfg;
    c.q_dm = c.q_dm.clamp(1e-9, 1.0 - 1e-9);
    c.q_ds = c.q_ds.clamp(1e-9, 1.0 - 1e-9);
    let dq = DerivedQuantities::fully_loaded_no_d2d(&c);
    let cov = match tier {
        Tier::Macro => coverage_macro(&c, &dq).expect("closed form"),
        Tier::Small => asymptotic_no_d2d(&c, &dq).expect("closed form"),
    };
    match mode {
        LinkMode::Dl => cov.dl.unwrap_or(0.0),
        LinkMode::Ul => cov.ul.unwrap_or(0.0),
    }
}

/// Association-weighted overall coverage in the same regime.
fn regime_overall_coverage(cfg: &NetworkConfig, mode: LinkMode) -> f64 {
    let mut c = *cfg;
    c.q_dm = c.q_dm.clamp(1e-9, 1.0 - 1e-9);
    c.q_ds = c.q_ds.clamp(1e-9, 1.0 - 1e-9);
    let dq = DerivedQuantities::fully_loaded_no_d2d(&c);
    let p_m = regime_tier_coverage(&c, Tier::Macro, mode);
    let p_s = regime_tier_coverage(&c, Tier::Small, mode);
    match mode {
        LinkMode::Dl => dq.a_d_m * p_m + dq.a_d_s * p_s,
        LinkMode::Ul => dq.a_u_m * p_m + dq.a_u_s * p_s,
    }
}

fn regime_warning(cfg: &NetworkConfig) -> Option<String> {
    let dq = DerivedQuantities::compute(cfg).ok()?;
    let mut issues = Vec::new();
    if !dq.is_fully_loaded(Tier::Macro) || !dq.is_fully_loaded(Tier::Small) {
        issues.push("network is not fully loaded");
    }
    if dq.lambda_d2d > 0.0 {
        issues.push(
            "active D2D transmitters present (closed form assumes a vanishing protection threshold)",
        );
    }
    if issues.is_empty() {
        None
    } else {
        Some(format!("closed-form regime assumption violated: {}", issues.join("; ")))
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (ll, lh) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (ll + (lh - ll) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn grid_argmax(values: &[(f64, f64)]) -> (f64, f64) {
    values
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid")
}

fn oracle_against_grid<F: Fn(f64) -> f64 + Sync>(
    closed_form: f64,
    objective: F,
    points: usize,
    span: f64,
) -> OracleCheck {
    let grid = log_grid(closed_form / span, closed_form * span, points);
    let values: Vec<(f64, f64)> = grid.iter().map(|&x| (x, objective(x))).collect();
    let (argmax, best) = grid_argmax(&values);
    let step = (grid[1] / grid[0]).max(1.0 + 1e-15);
    let within = (argmax / closed_form).ln().abs() <= step.ln() * (1.0 + 1e-9);
    OracleCheck {
        grid_argmax: argmax,
        grid_objective: best,
        grid_step_ratio: step,
        within_one_step: within,
        discrepancy: if within {
            None
        } else {
            Some(format!(
                "closed form {closed_form:.6e} is more than one grid step from the grid argmax {argmax:.6e}"
            ))
        },
    }
}

/// Mode-probability choice maximizing the per-tier coverage in the
/// fully-loaded, D2D-free regime. The UL optimum sits at zero DL share; the
/// DL optimum is a boundary point decided by the interference-balance case
/// analysis with a threshold on the other tier's DL share.
pub fn optimal_uldl_config(
    cfg: &NetworkConfig,
    tier: Tier,
    mode: LinkMode,
) -> Result<OptimizationResult, AnalyticsError> {
    let warning = regime_warning(cfg);
    let e = 2.0 / cfg.alpha;
    let arg_name = match tier {
        Tier::Macro => "q_dm",
        Tier::Small => "q_ds",
    };
    let objective = |q: f64| {
        let mut c = *cfg;
        match tier {
            Tier::Macro => c.q_dm = q,
            Tier::Small => c.q_ds = q,
        }
        regime_tier_coverage(&c, tier, mode)
    };

    let (q_star, case, q_bar) = match mode {
        LinkMode::Ul => {
            let case = if cfg.dl_power(tier) > cfg.ul_power(tier) {
                "ul-coverage-decreasing-in-dl-share"
            } else {
                "ul-station-power-below-user-power"
            };
            (0.0, case.to_string(), None)
        }
        LinkMode::Dl => {
            let gamma = cfg.sir_threshold(tier, LinkMode::Dl);
            let delta_i = delta_fn(gamma, cfg.alpha)?;
            let c_i =
                c_alpha(cfg.alpha)? * (cfg.ul_power(tier) * gamma / cfg.dl_power(tier)).powf(e);
            if delta_i <= c_i {
                (1.0, "dl-dominated-by-ul-interference".to_string(), None)
            } else {
                let other = tier.other();
                let lambda_ratio = cfg.density(tier) / cfg.density(other);
                let pw_ratio = (cfg.dl_power(tier) * cfg.bias(tier, LinkMode::Dl))
                    / (cfg.dl_power(other) * cfg.bias(other, LinkMode::Dl));
                let q_bar = lambda_ratio * pw_ratio.powf(e) / (delta_i / c_i - 1.0);
                if cfg.dl_prob(other) < q_bar {
                    (1.0, "other-tier-dl-share-below-threshold".to_string(), Some(q_bar))
                } else {
                    (0.0, "dl-dominated-by-dl-interference".to_string(), Some(q_bar))
                }
            }
        }
    };

    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let values: Vec<(f64, f64)> = grid.iter().map(|&q| (q, objective(q))).collect();
    let (argmax, best) = grid_argmax(&values);
    let within = (argmax - q_star).abs() <= 0.05 + 1e-12;
    Ok(OptimizationResult {
        arguments: vec![(arg_name.to_string(), q_star)],
        objective: objective(q_star),
        method: OptMethod::ClosedForm,
        q_bar_threshold: q_bar,
        case: Some(case),
        degenerate: false,
        regime_warning: warning,
        oracle: Some(OracleCheck {
            grid_argmax: argmax,
            grid_objective: best,
            grid_step_ratio: 1.05,
            within_one_step: within,
            discrepancy: if within {
                None
            } else {
                Some(format!("boundary case analysis gave {q_star}, grid argmax {argmax}"))
            },
        }),
    })
}

/// Small-tier density (relative to the macro tier) maximizing the overall
/// coverage in the fully-loaded, D2D-free regime.
pub fn optimal_density(
    cfg: &NetworkConfig,
    mode: LinkMode,
) -> Result<OptimizationResult, AnalyticsError> {
    let warning = regime_warning(cfg);
    let e = 2.0 / cfg.alpha;
    let ca = c_alpha(cfg.alpha)?;

    let lambda_hat = match mode {
        LinkMode::Dl => {
            let num = cfg.q_dm * cfg.p_m.powf(e) * delta_fn(cfg.gamma_m_d, cfg.alpha)?
                + (1.0 - cfg.q_dm) * (cfg.q_m * cfg.gamma_m_d).powf(e);
            let den = (cfg.b_ds / cfg.b_dm).powf(e)
                * (cfg.q_ds * cfg.p_s.powf(e) * delta_fn(cfg.gamma_s_d, cfg.alpha)?
                    + (1.0 - cfg.q_ds) * ca * (cfg.q_s * cfg.gamma_s_d).powf(e));
            num / den
        }
        LinkMode::Ul => {
            (cfg.gamma_m_u / ((cfg.b_us / cfg.b_um) * cfg.gamma_s_u)).powf(e)
                * (cfg.q_dm * cfg.p_m.powf(e) + (1.0 - cfg.q_dm) * cfg.q_m.powf(e))
                / (cfg.q_ds * cfg.p_s.powf(e) + (1.0 - cfg.q_ds) * cfg.q_s.powf(e))
        }
    };

    let objective = |lh: f64| {
        let mut c = *cfg;
        c.lambda_s = lh * c.lambda_m;
        regime_overall_coverage(&c, mode)
    };
    let oracle = oracle_against_grid(lambda_hat, objective, 50, 50.0);
    Ok(OptimizationResult {
        arguments: vec![("lambda_hat_s".to_string(), lambda_hat)],
        objective: objective(lambda_hat),
        method: OptMethod::ClosedForm,
        q_bar_threshold: None,
        case: None,
        degenerate: false,
        regime_warning: warning,
        oracle: Some(oracle),
    })
}

/// Small-tier bias (relative to the macro tier) maximizing the overall
/// coverage in the fully-loaded, D2D-free regime.
pub fn optimal_bias(
    cfg: &NetworkConfig,
    mode: LinkMode,
) -> Result<OptimizationResult, AnalyticsError> {
    let warning = regime_warning(cfg);
    let e = 2.0 / cfg.alpha;
    let ca = c_alpha(cfg.alpha)?;
    let lambda_hat = cfg.lambda_s / cfg.lambda_m;

    let bias_hat = match mode {
        LinkMode::Dl => {
            let num = cfg.p_m.powf(e) * cfg.q_dm * delta_fn(cfg.gamma_m_d, cfg.alpha)?
                + (1.0 - cfg.q_dm) * (cfg.q_m * cfg.gamma_m_d).powf(e);
            let den = lambda_hat
                * (cfg.p_s.powf(e) * cfg.q_ds * delta_fn(cfg.gamma_s_d, cfg.alpha)?
                    + (1.0 - cfg.q_ds) * ca * (cfg.q_s * cfg.gamma_s_d).powf(e));
            (num / den).powf(cfg.alpha / 2.0)
        }
        LinkMode::Ul => {
            let num = cfg.gamma_m_u.powf(e)
                * (cfg.q_dm * cfg.p_m.powf(e) + (1.0 - cfg.q_dm) * cfg.q_m.powf(e));
            let den = lambda_hat
                * cfg.gamma_s_u.powf(e)
                * (cfg.q_ds * cfg.p_s.powf(e) + (1.0 - cfg.q_ds) * cfg.q_s.powf(e));
            (num / den).powf(cfg.alpha / 2.0)
        }
    };

    let objective = |bh: f64| {
        let mut c = *cfg;
        match mode {
            LinkMode::Dl => c.b_ds = bh * c.b_dm,
            LinkMode::Ul => c.b_us = bh * c.b_um,
        }
        regime_overall_coverage(&c, mode)
    };
    let oracle = oracle_against_grid(bias_hat, objective, 50, 50.0);
    let arg = match mode {
        LinkMode::Dl => "b_hat_ds",
        LinkMode::Ul => "b_hat_us",
    };
    Ok(OptimizationResult {
        arguments: vec![(arg.to_string(), bias_hat)],
        objective: objective(bias_hat),
        method: OptMethod::ClosedForm,
        q_bar_threshold: None,
        case: None,
        degenerate: false,
        regime_warning: warning,
        oracle: Some(oracle),
    })
}

/// Bandwidth split: all spectrum to whichever side carries more DL
/// throughput; indifferent when they tie.
pub fn optimal_bandwidth(cfg: &NetworkConfig) -> Result<OptimizationResult, AnalyticsError> {
    let t = analytics::throughput(cfg)?;
    let macro_side = t.t_m_d;
    let small_side = t.t_s_d + 0.5 * t.t_d2d;
    let (eta, case, degenerate) = if macro_side > small_side {
        (1.0, "macro-tier-dominant", false)
    } else if macro_side < small_side {
        (0.0, "small-tier-dominant", false)
    } else {
        (0.5, "indifferent", true)
    };
    let objective = eta * macro_side + (1.0 - eta) * small_side;
    Ok(OptimizationResult {
        arguments: vec![("eta".to_string(), eta)],
        objective,
        method: OptMethod::ClosedForm,
        q_bar_threshold: None,
        case: Some(case.to_string()),
        degenerate,
        regime_warning: None,
        oracle: None,
    })
}

/// Which total throughput the sensing search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SensingObjective {
    DlThroughput,
    UlThroughput,
}

fn sensing_objective_value(
    cfg: &NetworkConfig,
    objective: SensingObjective,
    rho_s: f64,
    rho_d: f64,
) -> f64 {
    let mut c = *cfg;
    c.rho_s = rho_s;
    c.rho_d = rho_d;
    match analytics::throughput(&c) {
        Ok(t) => match objective {
            SensingObjective::DlThroughput => t.total_d,
            SensingObjective::UlThroughput => t.total_u,
        },
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Golden-section maximum on a log-scaled axis, within [lo, hi].
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c.exp());
    let mut fd = f(d.exp());
    while (b - a) > rel_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d.exp());
        }
    }
    let x = (0.5 * (a + b)).exp();
    (x, f(x))
}

/// One coordinate pass: log grid then golden-section refinement around the
/// grid argmax, to 1% relative.
fn line_search<F: Fn(f64) -> f64 + Sync>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let grid = log_grid(lo, hi, points);
    let values: Vec<(f64, f64)> = grid.par_iter().map(|&x| (x, f(x))).collect();
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let bracket_lo = grid[best.saturating_sub(1)];
    let bracket_hi = grid[(best + 1).min(grid.len() - 1)];
    if bracket_lo == bracket_hi {
        return values[best];
    }
    let (x, v) = golden_max(&f, bracket_lo, bracket_hi, 0.01);
    if v >= values[best].1 {
        (x, v)
    } else {
        values[best]
    }
}

/// Two-stage sensing-threshold search over [rho_min, Q_d]: protection
/// threshold first at the configured contention threshold, then the
/// contention threshold at the found optimum.
pub fn optimal_sensing(
    cfg: &NetworkConfig,
    objective: SensingObjective,
    stage_points: usize,
) -> Result<OptimizationResult, AnalyticsError> {
    let rho_min = cfg.rho_min.ok_or_else(|| {
        AnalyticsError::Undefined(
            "rho_min (receiver sensitivity) is required to bound the sensing search".into(),
        )
    })?;
    if !(rho_min > 0.0 && rho_min < cfg.q_d) {
        return Err(AnalyticsError::Undefined(format!(
            "sensing search domain [{rho_min}, {}] is empty or degenerate",
            cfg.q_d
        )));
    }
    let points = stage_points.max(5);

    if cfg.zeta * cfg.lambda_u == 0.0 {
        // No D2D users: the objective cannot depend on either threshold.
        let v = sensing_objective_value(cfg, objective, rho_min, cfg.rho_d);
        return Ok(OptimizationResult {
            arguments: vec![
                ("rho_s".to_string(), rho_min),
                ("rho_d".to_string(), cfg.rho_d),
            ],
            objective: v,
            method: OptMethod::TwoStage,
            q_bar_threshold: None,
            case: Some("degenerate".to_string()),
            degenerate: true,
            regime_warning: None,
            oracle: None,
        });
    }

    let (rho_s_star, _) = line_search(
        |rs| sensing_objective_value(cfg, objective, rs, cfg.rho_d),
        rho_min,
        cfg.q_d,
        points,
    );
    let (rho_d_star, best) = line_search(
        |rd| sensing_objective_value(cfg, objective, rho_s_star, rd),
        rho_min,
        cfg.q_d,
        points,
    );

    Ok(OptimizationResult {
        arguments: vec![
            ("rho_s".to_string(), rho_s_star),
            ("rho_d".to_string(), rho_d_star),
        ],
        objective: best,
        method: OptMethod::TwoStage,
        q_bar_threshold: None,
        case: None,
        degenerate: false,
        regime_warning: None,
        oracle: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_config;

    const LAMBDA_M: f64 = 1.2732395447351628e-6;

    fn base_config() -> NetworkConfig {
        default_config()
            .lambda_s(5.0 * LAMBDA_M)
            .lambda_u(100.0 * LAMBDA_M)
            .eta(0.5)
            .zeta(0.1)
            .build()
            .unwrap()
    }

    #[test]
    fn ul_share_optimum_is_zero_with_grid_agreement() {
        let cfg = base_config();
        for tier in [Tier::Macro, Tier::Small] {
            let r = optimal_uldl_config(&cfg, tier, LinkMode::Ul).unwrap();
            assert_eq!(r.arguments[0].1, 0.0);
            let oracle = r.oracle.unwrap();
            assert!(oracle.within_one_step, "{tier:?}: {oracle:?}");
        }
    }

    #[test]
    fn dl_share_case_analysis_matches_grid() {
        let cfg = base_config();
        for tier in [Tier::Macro, Tier::Small] {
            let r = optimal_uldl_config(&cfg, tier, LinkMode::Dl).unwrap();
            let q = r.arguments[0].1;
            assert!(q == 0.0 || q == 1.0);
            assert!(r.oracle.unwrap().within_one_step, "{tier:?}");
        }
        // Pushing user power above station power forces the UL-dominated
        // case and the all-DL optimum.
        let mut flipped = base_config();
        flipped.q_s = flipped.p_s * 10.0;
        let r = optimal_uldl_config(&flipped, Tier::Small, LinkMode::Dl).unwrap();
        assert_eq!(r.arguments[0].1, 1.0);
        assert!(r.oracle.unwrap().within_one_step);
    }

    #[test]
    fn density_symmetric_ul_optimum_is_unity() {
        let mut cfg = base_config();
        cfg.p_s = cfg.p_m;
        cfg.q_s = cfg.q_m;
        let r = optimal_density(&cfg, LinkMode::Ul).unwrap();
        assert!((r.arguments[0].1 - 1.0).abs() < 1e-12, "{:?}", r.arguments);
        assert!(r.oracle.unwrap().within_one_step);
    }

    #[test]
    fn density_scales_with_ul_bias() {
        let cfg = base_config();
        let base = optimal_density(&cfg, LinkMode::Ul).unwrap().arguments[0].1;
        let mut biased = cfg;
        biased.b_us = 2.0 * biased.b_um;
        let shifted = optimal_density(&biased, LinkMode::Ul).unwrap().arguments[0].1;
        let factor = 2f64.powf(-2.0 / cfg.alpha);
        assert!(
            (shifted / base - factor).abs() < 1e-12,
            "{shifted} vs {base} * {factor}"
        );
    }

    #[test]
    fn density_dl_closed_form_within_grid_step() {
        let cfg = base_config();
        let r = optimal_density(&cfg, LinkMode::Dl).unwrap();
        let arg = r.arguments[0].1;
        let oracle = r.oracle.unwrap();
        assert!(
            oracle.within_one_step,
            "closed form {arg} vs grid {}",
            oracle.grid_argmax
        );
    }

    #[test]
    fn bias_symmetric_ul_optimum_is_unity() {
        let mut cfg = base_config();
        cfg.p_s = cfg.p_m;
        cfg.q_s = cfg.q_m;
        cfg.lambda_s = cfg.lambda_m;
        let r = optimal_bias(&cfg, LinkMode::Ul).unwrap();
        assert!((r.arguments[0].1 - 1.0).abs() < 1e-12);
        assert!(r.oracle.unwrap().within_one_step);
    }

    #[test]
    fn bias_scales_with_density() {
        let cfg = base_config();
        let base = optimal_bias(&cfg, LinkMode::Dl).unwrap().arguments[0].1;
        let mut denser = cfg;
        denser.lambda_s *= 2.0;
        let shifted = optimal_bias(&denser, LinkMode::Dl).unwrap().arguments[0].1;
        let factor = 2f64.powf(-cfg.alpha / 2.0);
        assert!((shifted / base - factor).abs() < 1e-9);
    }

    #[test]
    fn bias_optimum_decreases_with_density_like_reported() {
        let mut sparse = base_config();
        sparse.lambda_u = 1000.0 * LAMBDA_M;
        sparse.zeta = 0.01;
        let mut dense = sparse;
        dense.lambda_s = 20.0 * LAMBDA_M;
        let b_sparse = optimal_bias(&sparse, LinkMode::Dl).unwrap().arguments[0].1;
        let b_dense = optimal_bias(&dense, LinkMode::Dl).unwrap().arguments[0].1;
        assert!(b_dense < b_sparse);
    }

    #[test]
    fn bandwidth_rule_matches_sign() {
        let cfg = base_config();
        let t = analytics::throughput(&cfg).unwrap();
        let r = optimal_bandwidth(&cfg).unwrap();
        let expected = if t.t_m_d > t.t_s_d + 0.5 * t.t_d2d { 1.0 } else { 0.0 };
        assert_eq!(r.arguments[0].1, expected);

        // Starving the macro tier flips the decision.
        let mut no_macro = cfg;
        no_macro.q_dm = 0.0;
        let r = optimal_bandwidth(&no_macro).unwrap();
        assert_eq!(r.arguments[0].1, 0.0);
    }

    #[test]
    fn sensing_degenerate_without_d2d_users() {
        let mut cfg = base_config();
        cfg.zeta = 0.0;
        cfg.rho_min = Some(1e-10);
        let r = optimal_sensing(&cfg, SensingObjective::DlThroughput, 9).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.case.as_deref(), Some("degenerate"));
    }

    #[test]
    fn sensing_requires_rho_min() {
        let cfg = base_config();
        assert!(optimal_sensing(&cfg, SensingObjective::DlThroughput, 9).is_err());
    }

    #[test]
    fn sensing_result_dominates_domain_endpoints() {
        let mut cfg = base_config();
        cfg.rho_min = Some(1e-10);
        let r = optimal_sensing(&cfg, SensingObjective::DlThroughput, 9).unwrap();
        let rho_s = r.arguments[0].1;
        let at = |rs: f64, rd: f64| {
            sensing_objective_value(&cfg, SensingObjective::DlThroughput, rs, rd)
        };
        // Solver tolerance is 1% relative; endpoints may not beat the
        // search by more than that.
        let slack = 0.01 * r.objective.abs();
        for endpoint in [1e-10, cfg.q_d] {
            assert!(
                r.objective >= at(rho_s, endpoint) - slack,
                "rho_d endpoint {endpoint} beats the search"
            );
            assert!(
                r.objective >= at(endpoint, cfg.rho_d) - slack,
                "rho_s endpoint {endpoint} beats stage one"
            );
        }
    }
}
