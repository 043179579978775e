//! Parameter sweeps: a swept scalar, an engine choice, and a list of
//! requested outputs, emitted as one CSV row per sweep value with a stable
//! column layout and a status column. Failed points keep the run alive.

use crate::config::swept_value_to_linear;
use anyhow::{anyhow, bail};
use rayon::prelude::*;
use serde::Deserialize;
use std::io::Write;
use tddnet_core::analytics::{self, CoverageReport, DerivedQuantities, ThroughputReport};
use tddnet_core::params::NetworkConfig;
use tddnet_core::sim::{self, SimSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Simulate,
    Both,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeScale {
    Lin,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: RangeScale,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOverrides {
    pub iterations: Option<u64>,
    pub window: Option<f64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub toroidal: Option<bool>,
}

/// On-disk sweep description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Name of the swept scalar, matching the config-file field names;
    /// values are interpreted in config-file units (dBm/dB where those
    /// apply).
    pub param: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub range: Option<SweepRange>,
    pub engine: Engine,
    pub outputs: Vec<String>,
    /// Density sweeps may be written as multiples of `lambda_m`.
    #[serde(default)]
    pub relative_to_lambda_m: bool,
    #[serde(default)]
    pub sim: Option<SimOverrides>,
}

const COVERAGE_OUTPUTS: [&str; 7] =
    ["p_m_d", "p_m_u", "p_s_d", "p_s_u", "p_d2d", "overall_d", "overall_u"];
const ANALYTIC_ONLY_OUTPUTS: [&str; 9] = [
    "t_m_d",
    "t_m_u",
    "t_s_d",
    "t_s_u",
    "t_d2d",
    "total_d",
    "total_u",
    "beta",
    "lambda_d2d",
];

fn is_coverage_output(name: &str) -> bool {
    COVERAGE_OUTPUTS.contains(&name)
}

impl SweepSpec {
    pub fn validate(&self, cfg: &NetworkConfig) -> anyhow::Result<Vec<f64>> {
        let mut probe = *cfg;
        probe
            .set_field(&self.param, 1.0)
            .map_err(|e| anyhow!("sweep parameter: {e}"))?;
        for o in &self.outputs {
            if !is_coverage_output(o) && !ANALYTIC_ONLY_OUTPUTS.contains(&o.as_str()) {
                bail!("unknown sweep output `{o}`");
            }
            if matches!(self.engine, Engine::Simulate) && !is_coverage_output(o) {
                bail!("output `{o}` is analytic; use engine \"analytic\" or \"both\"");
            }
        }
        let values = match (&self.values, &self.range) {
            (Some(v), None) => v.clone(),
            (None, Some(r)) => {
                if r.count < 2 {
                    bail!("sweep range needs count >= 2");
                }
                (0..r.count)
                    .map(|i| {
                        let t = i as f64 / (r.count - 1) as f64;
                        match r.scale {
                            RangeScale::Lin => r.start + t * (r.stop - r.start),
                            RangeScale::Log => {
                                (r.start.ln() + t * (r.stop.ln() - r.start.ln())).exp()
                            }
                        }
                    })
                    .collect()
            }
            _ => bail!("sweep needs exactly one of `values` or `range`"),
        };
        if values.len() < 2 {
            bail!("sweep needs at least two values");
        }
        Ok(values)
    }

    /// Column names after `swept_param,value`, before `status`. A pure
    /// function of the spec.
    pub fn columns(&self) -> Vec<String> {
        let mut cols = Vec::new();
        for o in &self.outputs {
            match self.engine {
                Engine::Analytic => cols.push(o.clone()),
                Engine::Simulate => {
                    cols.push(o.clone());
                    if is_coverage_output(o) {
                        cols.push(format!("ci_half_{o}"));
                    }
                }
                Engine::Both => {
                    if is_coverage_output(o) {
                        cols.push(format!("{o}_analytic"));
                        cols.push(format!("{o}_sim"));
                        cols.push(format!("ci_half_{o}"));
                    } else {
                        cols.push(o.clone());
                    }
                }
            }
        }
        cols
    }
}

struct PointOutput {
    value: f64,
    cells: Vec<Option<f64>>,
    status: String,
}

fn coverage_field(report: &CoverageReport, name: &str) -> (Option<f64>, Option<f64>) {
    let e = match name {
        "p_m_d" => &report.p_m_d,
        "p_m_u" => &report.p_m_u,
        "p_s_d" => &report.p_s_d,
        "p_s_u" => &report.p_s_u,
        "p_d2d" => &report.p_d2d,
        "overall_d" => &report.overall_d,
        "overall_u" => &report.overall_u,
        _ => &None,
    };
    match e {
        Some(est) => (Some(est.value), est.ci_half),
        None => (None, None),
    }
}

fn analytic_scalar(
    name: &str,
    t: &ThroughputReport,
    dq: &DerivedQuantities,
) -> Option<f64> {
    Some(match name {
        "t_m_d" => t.t_m_d,
        "t_m_u" => t.t_m_u,
        "t_s_d" => t.t_s_d,
        "t_s_u" => t.t_s_u,
        "t_d2d" => t.t_d2d,
        "total_d" => t.total_d,
        "total_u" => t.total_u,
        "beta" => dq.beta_ret,
        "lambda_d2d" => dq.lambda_d2d,
        _ => return None,
    })
}

fn run_point(
    spec: &SweepSpec,
    base: &NetworkConfig,
    sim_settings: &SimSettings,
    raw_value: f64,
) -> PointOutput {
    let mut cells = Vec::new();
    let status = (|| -> anyhow::Result<()> {
        let linear = swept_value_to_linear(
            &spec.param,
            raw_value,
            spec.relative_to_lambda_m,
            base.lambda_m,
        )?;
        let mut cfg = *base;
        cfg.set_field(&spec.param, linear).map_err(|e| anyhow!("{e}"))?;
        let outcome = tddnet_core::params::validate(&cfg);
        if !outcome.is_ok() {
            bail!("invalid point: {}", outcome.errors.join("; "));
        }

        let needs_analytic = !matches!(spec.engine, Engine::Simulate)
            || spec.outputs.iter().any(|o| !is_coverage_output(o));
        let analytic: Option<(CoverageReport, ThroughputReport, DerivedQuantities)> =
            if needs_analytic {
                let dq = DerivedQuantities::compute(&cfg).map_err(|e| anyhow!("{e}"))?;
                let cov = analytics::coverage_overall_with(&cfg, &dq).map_err(|e| anyhow!("{e}"))?;
                let t = analytics::throughput_with(&cfg, &dq).map_err(|e| anyhow!("{e}"))?;
                Some((cov, t, dq))
            } else {
                None
            };
        let simulated: Option<CoverageReport> = if matches!(spec.engine, Engine::Simulate | Engine::Both)
        {
            Some(sim::estimate_coverage(&cfg, sim_settings))
        } else {
            None
        };

        for o in &spec.outputs {
            match spec.engine {
                Engine::Analytic => {
                    let (cov, t, dq) = analytic.as_ref().unwrap();
                    if is_coverage_output(o) {
                        cells.push(coverage_field(cov, o).0);
                    } else {
                        cells.push(analytic_scalar(o, t, dq));
                    }
                }
                Engine::Simulate => {
                    let rep = simulated.as_ref().unwrap();
                    let (v, ci) = coverage_field(rep, o);
                    cells.push(v);
                    cells.push(ci);
                }
                Engine::Both => {
                    if is_coverage_output(o) {
                        let (cov, ..) = analytic.as_ref().unwrap();
                        let rep = simulated.as_ref().unwrap();
                        let (sv, ci) = coverage_field(rep, o);
                        cells.push(coverage_field(cov, o).0);
                        cells.push(sv);
                        cells.push(ci);
                    } else {
                        let (_, t, dq) = analytic.as_ref().unwrap();
                        cells.push(analytic_scalar(o, t, dq));
                    }
                }
            }
        }
        Ok(())
    })();

    match status {
        Ok(()) => PointOutput {
            value: raw_value,
            cells,
            status: "ok".to_string(),
        },
        Err(e) => {
            // Pad so the row shape stays stable.
            let width = match_width(spec);
            PointOutput {
                value: raw_value,
                cells: vec![None; width],
                status: format!("error: {e}"),
            }
        }
    }
}

fn match_width(spec: &SweepSpec) -> usize {
    spec.columns().len()
}

/// Runs the sweep and writes RFC-4180 CSV to `out`. Sweep points evaluate
/// in parallel; emission order follows the value list.
pub fn run_sweep<W: Write>(
    spec: &SweepSpec,
    base: &NetworkConfig,
    sim_defaults: &SimSettings,
    out: W,
) -> anyhow::Result<()> {
    let values = spec.validate(base)?;
    let mut settings = *sim_defaults;
    if let Some(s) = &spec.sim {
        if let Some(v) = s.iterations {
            settings.iterations = v;
        }
        if let Some(v) = s.window {
            settings.window = v;
        }
        if let Some(v) = s.seed {
            settings.seed = v;
        }
        if let Some(v) = s.workers {
            settings.workers = Some(v);
        }
        if let Some(v) = s.toroidal {
            settings.toroidal = v;
        }
    }

    // Simulation already parallelizes internally; parallelize across points
    // only for analytic sweeps.
    let points: Vec<PointOutput> = if matches!(spec.engine, Engine::Analytic) {
        values
            .par_iter()
            .map(|v| run_point(spec, base, &settings, *v))
            .collect()
    } else {
        values
            .iter()
            .map(|v| run_point(spec, base, &settings, *v))
            .collect()
    };

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["swept_param".to_string(), "value".to_string()];
    header.extend(spec.columns());
    header.push("status".to_string());
    w.write_record(&header)?;
    for p in points {
        let mut row = vec![spec.param.clone(), format_num(p.value)];
        for c in &p.cells {
            row.push(c.map(format_num).unwrap_or_default());
        }
        row.push(p.status);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip float formatting keeps the output byte-stable.
pub fn format_num(v: f64) -> String {
    format!("{v}")
}
