//! Figure-data reproduction: one CSV per reported experiment (fig3 through
//! fig8, with the density study split into its (a)/(b) panels), parameters
//! baked in from the corresponding captions and recorded in a sidecar
//! manifest. Desk-scale runs default to 1000 iterations; `--full` restores
//! the 10000-iteration validation scale.

use crate::sweep::format_num;
use anyhow::Context;
use serde_json::json;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use tddnet_core::analytics::{self, DerivedQuantities};
use tddnet_core::params::{default_config, NetworkConfig};
use tddnet_core::sim::{self, SimSettings};

fn dbm(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub struct FigureSettings {
    pub iterations: u64,
    pub seed: u64,
    pub workers: Option<usize>,
}

fn sim_settings(fs: &FigureSettings, iterations: u64) -> SimSettings {
    SimSettings {
        iterations,
        window: 5000.0,
        seed: fs.seed,
        workers: fs.workers,
        toroidal: true,
    }
}

fn lambda_m() -> f64 {
    default_config().lambda_m
}

fn scenario(ls_mult: f64, lu_mult: f64, zeta: f64) -> NetworkConfig {
    let lm = lambda_m();
    default_config()
        .lambda_s(ls_mult * lm)
        .lambda_u(lu_mult * lm)
        .eta(0.5)
        .zeta(zeta)
        .build()
        .expect("scenario config")
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Option<f64>>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    w.write_record(header)?;
    for row in rows {
        let rec: Vec<String> = row.iter().map(|c| c.map(format_num).unwrap_or_default()).collect();
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

type FigResult = anyhow::Result<serde_json::Value>;

/// Coverage accuracy study: small-cell and D2D coverage over the protection
/// threshold, analytic and simulated.
fn fig3(dir: &Path, fs: &FigureSettings) -> FigResult {
    let settings = sim_settings(fs, fs.iterations);
    let mut rows = Vec::new();
    for i in 0..17 {
        let rho_dbm = -100.0 + 5.0 * i as f64;
        let mut cfg = scenario(5.0, 100.0, 0.1);
        cfg.rho_s = dbm(rho_dbm);
        let dq = DerivedQuantities::compute(&cfg)?;
        let small = analytics::coverage_small(&cfg, &dq)?;
        let d2d = analytics::coverage_d2d(&cfg, &dq)?;
        let rep = sim::estimate_coverage(&cfg, &settings);
        rows.push(vec![
            Some(rho_dbm),
            small.dl,
            rep.p_s_d.map(|e| e.value),
            rep.p_s_d.and_then(|e| e.ci_half),
            small.ul,
            rep.p_s_u.map(|e| e.value),
            rep.p_s_u.and_then(|e| e.ci_half),
            d2d.value,
            rep.p_d2d.map(|e| e.value),
            rep.p_d2d.and_then(|e| e.ci_half),
            Some(dq.beta_ret),
        ]);
    }
    write_csv(
        &dir.join("fig3.csv"),
        &[
            "rho_s_dbm",
            "p_s_d_analytic",
            "p_s_d_sim",
            "ci_half_p_s_d",
            "p_s_u_analytic",
            "p_s_u_sim",
            "ci_half_p_s_u",
            "p_d2d_analytic",
            "p_d2d_sim",
            "ci_half_p_d2d",
            "beta",
        ],
        &rows,
    )?;
    Ok(json!({
        "file": "fig3.csv",
        "sweep": "rho_s, -100..-20 dBm",
        "params": {"lambda_s": "5x", "lambda_u": "100x", "q_dm": 0.5, "q_ds": 0.5,
                    "rho_d_dbm": -60.0, "biases": 1.0, "zeta": 0.1},
        "iterations": settings.iterations,
    }))
}

/// Coverage over the small-tier DL share.
fn fig4(dir: &Path, fs: &FigureSettings) -> FigResult {
    let settings = sim_settings(fs, fs.iterations);
    let mut rows = Vec::new();
    for i in 0..9 {
        let q_ds = 0.1 + 0.1 * i as f64;
        let mut cfg = scenario(5.0, 100.0, 0.1);
        cfg.q_ds = q_ds;
        let dq = DerivedQuantities::compute(&cfg)?;
        let report = analytics::coverage_overall_with(&cfg, &dq)?;
        let rep = sim::estimate_coverage(&cfg, &settings);
        rows.push(vec![
            Some(q_ds),
            report.p_s_d.map(|e| e.value),
            rep.p_s_d.map(|e| e.value),
            rep.p_s_d.and_then(|e| e.ci_half),
            report.p_s_u.map(|e| e.value),
            rep.p_s_u.map(|e| e.value),
            rep.p_s_u.and_then(|e| e.ci_half),
            report.p_d2d.map(|e| e.value),
            rep.p_d2d.map(|e| e.value),
            rep.p_d2d.and_then(|e| e.ci_half),
        ]);
    }
    write_csv(
        &dir.join("fig4.csv"),
        &[
            "q_ds",
            "p_s_d_analytic",
            "p_s_d_sim",
            "ci_half_p_s_d",
            "p_s_u_analytic",
            "p_s_u_sim",
            "ci_half_p_s_u",
            "p_d2d_analytic",
            "p_d2d_sim",
            "ci_half_p_d2d",
        ],
        &rows,
    )?;
    Ok(json!({
        "file": "fig4.csv",
        "sweep": "q_ds, 0.1..0.9",
        "params": {"lambda_s": "5x", "lambda_u": "100x", "biases": 1.0, "zeta": 0.1,
                    "rho_s_dbm": -60.0, "rho_d_dbm": -60.0},
        "iterations": settings.iterations,
    }))
}

/// DL coverage over the small-cell density: per-tier panel (a) and the
/// overall panel (b) with its interior maximum.
fn fig5(dir: &Path) -> FigResult {
    let mut rows_a = Vec::new();
    let mut rows_b = Vec::new();
    for i in 0..21 {
        let mult = 10f64.powf(2.0 * i as f64 / 20.0); // 1..100
        let cfg = scenario(mult, 1000.0, 0.01);
        let dq = DerivedQuantities::compute(&cfg)?;
        let rep = analytics::coverage_overall_with(&cfg, &dq)?;
        rows_a.push(vec![
            Some(mult),
            rep.p_m_d.map(|e| e.value),
            rep.p_s_d.map(|e| e.value),
            rep.p_d2d.map(|e| e.value),
        ]);
        rows_b.push(vec![Some(mult), rep.overall_d.map(|e| e.value)]);
    }
    write_csv(
        &dir.join("fig5a.csv"),
        &["lambda_s_over_lambda_m", "p_m_d", "p_s_d", "p_d2d"],
        &rows_a,
    )?;
    write_csv(
        &dir.join("fig5b.csv"),
        &["lambda_s_over_lambda_m", "overall_d"],
        &rows_b,
    )?;
    Ok(json!({
        "file": ["fig5a.csv", "fig5b.csv"],
        "sweep": "lambda_s/lambda_m, 1..100 (log)",
        "params": {"lambda_u": "1000x", "q_dm": 0.5, "q_ds": 0.5, "biases": 1.0,
                    "zeta": 0.01, "rho_s_dbm": -60.0, "rho_d_dbm": -60.0},
    }))
}

/// Overall DL coverage over the small-tier DL bias, at two densities.
fn fig6(dir: &Path) -> FigResult {
    let mut rows = Vec::new();
    for i in 0..25 {
        let bias = 10f64.powf(-1.5 + 3.0 * i as f64 / 24.0); // ~0.03..31.6
        let mut overall = Vec::new();
        for ls in [5.0, 20.0] {
            let mut cfg = scenario(ls, 1000.0, 0.01);
            cfg.b_ds = bias;
            let dq = DerivedQuantities::compute(&cfg)?;
            let rep = analytics::coverage_overall_with(&cfg, &dq)?;
            overall.push(rep.overall_d.map(|e| e.value));
        }
        rows.push(vec![Some(bias), overall[0], overall[1]]);
    }
    write_csv(
        &dir.join("fig6.csv"),
        &["b_ds", "overall_d_lambda_s_5x", "overall_d_lambda_s_20x"],
        &rows,
    )?;
    Ok(json!({
        "file": "fig6.csv",
        "sweep": "b_ds, 0.03..31.6 (log)",
        "params": {"lambda_u": "1000x", "q_dm": 0.5, "q_ds": 0.5, "zeta": 0.01,
                    "rho_s_dbm": -60.0, "rho_d_dbm": -60.0,
                    "lambda_s": ["5x", "20x"]},
    }))
}

/// Total network throughput over each sensing threshold, the other held at
/// -20 dBm.
fn fig7(dir: &Path) -> FigResult {
    let base = {
        let mut c = scenario(100.0, 1e4, 0.1);
        c.rho_d = dbm(-20.0);
        c
    };
    let mut rows_a = Vec::new();
    for i in 0..26 {
        let rho_dbm = -100.0 + 4.0 * i as f64;
        let mut cfg = base;
        cfg.rho_s = dbm(rho_dbm);
        let t = analytics::throughput(&cfg)?;
        rows_a.push(vec![Some(rho_dbm), Some(t.total_d), Some(t.total_u)]);
    }
    write_csv(
        &dir.join("fig7a.csv"),
        &["rho_s_dbm", "total_d", "total_u"],
        &rows_a,
    )?;

    let mut rows_b = Vec::new();
    for i in 0..26 {
        let rho_dbm = -100.0 + 4.0 * i as f64;
        let mut cfg = base;
        cfg.rho_s = dbm(-20.0);
        cfg.rho_d = dbm(rho_dbm);
        let t = analytics::throughput(&cfg)?;
        rows_b.push(vec![Some(rho_dbm), Some(t.total_d), Some(t.total_u)]);
    }
    write_csv(
        &dir.join("fig7b.csv"),
        &["rho_d_dbm", "total_d", "total_u"],
        &rows_b,
    )?;
    Ok(json!({
        "file": ["fig7a.csv", "fig7b.csv"],
        "sweep": "rho_s (a) or rho_d (b), -100..0 dBm; the other at -20 dBm",
        "params": {"lambda_s": "100x", "lambda_u": "10000x", "q_dm": 0.5, "q_ds": 0.5,
                    "zeta": 0.1, "eta": 0.5},
    }))
}

/// Sensing access versus ALOHA at matched activity: coverage of the
/// small-cell DL and D2D probes as the retaining probability varies.
fn fig8(dir: &Path, fs: &FigureSettings) -> FigResult {
    // The dense study is heavy; trim the iteration count at either scale.
    let iters = if fs.iterations >= 10_000 { 2000 } else { fs.iterations.min(300) };
    let settings = sim_settings(fs, iters);
    let base = {
        let mut c = scenario(100.0, 1e4, 0.1);
        c.rho_d = dbm(-20.0);
        c
    };
    let mut rows = Vec::new();
    for rho_dbm in [-85.0f64, -80.0, -75.0, -70.0, -67.0, -64.0] {
        let mut cfg = base;
        cfg.rho_s = dbm(rho_dbm);
        let dq = DerivedQuantities::compute(&cfg)?;
        let (csma, aloha) = sim::estimate_access_comparison(&cfg, &settings, dq.beta_ret);
        rows.push(vec![
            Some(rho_dbm),
            Some(dq.beta_ret),
            csma.p_s_d.map(|e| e.value),
            csma.p_s_d.and_then(|e| e.ci_half),
            aloha.p_s_d.map(|e| e.value),
            aloha.p_s_d.and_then(|e| e.ci_half),
            csma.p_d2d.map(|e| e.value),
            csma.p_d2d.and_then(|e| e.ci_half),
            aloha.p_d2d.map(|e| e.value),
            aloha.p_d2d.and_then(|e| e.ci_half),
        ]);
    }
    write_csv(
        &dir.join("fig8.csv"),
        &[
            "rho_s_dbm",
            "beta",
            "csma_p_s_d",
            "ci_half_csma_p_s_d",
            "aloha_p_s_d",
            "ci_half_aloha_p_s_d",
            "csma_p_d2d",
            "ci_half_csma_p_d2d",
            "aloha_p_d2d",
            "ci_half_aloha_p_d2d",
        ],
        &rows,
    )?;
    Ok(json!({
        "file": "fig8.csv",
        "sweep": "rho_s, -85..-64 dBm (x-axis: matched activity p = beta)",
        "params": {"lambda_s": "100x", "lambda_u": "10000x", "q_dm": 0.5, "q_ds": 0.5,
                    "zeta": 0.1, "rho_d_dbm": -20.0},
        "iterations": settings.iterations,
    }))
}

/// Emits every figure CSV into `dir` plus a manifest of the parameters
/// used. Individual figure failures are isolated and recorded.
pub fn run_figures(dir: &Path, fs: &FigureSettings) -> anyhow::Result<bool> {
    std::fs::create_dir_all(dir)?;
    let figures: Vec<(&str, Box<dyn Fn() -> FigResult>)> = vec![
        ("fig3", Box::new(|| fig3(dir, fs))),
        ("fig4", Box::new(|| fig4(dir, fs))),
        ("fig5", Box::new(|| fig5(dir))),
        ("fig6", Box::new(|| fig6(dir))),
        ("fig7", Box::new(|| fig7(dir))),
        ("fig8", Box::new(|| fig8(dir, fs))),
    ];
    let mut manifest = serde_json::Map::new();
    manifest.insert("schema_version".into(), json!(1));
    manifest.insert(
        "defaults".into(),
        json!({
            "window_m": 5000.0,
            "seed": fs.seed,
            "alpha": 4.0,
            "lambda_m_per_m2": lambda_m(),
            "powers_dbm": {"p_m": 46.0, "p_s": 26.0, "q_m": 20.0, "q_s": 10.0, "q_d": 0.0},
            "sir_thresholds_db": 0.0,
            "r_d_m": 20.0,
            "epsilon": 1e-5,
            "mu": 0.5,
        }),
    );
    let mut ok = true;
    let mut entries = serde_json::Map::new();
    for (name, f) in figures {
        eprintln!("figures: generating {name}...");
        match f() {
            Ok(meta) => {
                entries.insert(name.into(), meta);
            }
            Err(e) => {
                ok = false;
                entries.insert(name.into(), json!({"error": e.to_string()}));
                eprintln!("figures: {name} failed: {e}");
            }
        }
    }
    manifest.insert("figures".into(), serde_json::Value::Object(entries));
    let mut f = File::create(dir.join("manifest.json"))?;
    writeln!(f, "{}", serde_json::to_string_pretty(&manifest)?)?;
    Ok(ok)
}
